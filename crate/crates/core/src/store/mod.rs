//! Append-only negative table with a write-through record cache.
//!
//! An insert runs the secret through the encoder, explodes the result into
//! one row per character and appends those rows (plus optional decoys) to
//! the table file in a single write. Verification recomputes the encoding
//! for each key group stored under a name. A raw query returns matching rows
//! verbatim and never reassembles anything.

mod table;
mod tuple;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::cache::{CacheEntry, CacheStats, RecordCache, DEFAULT_CAPACITY};
use crate::codec::{make_timestamp, Clock, CodecError, SystemClock, TimestampKey};
use crate::crypto::{CryptoError, Encoder, RsaPublicKey};

pub use table::{parse as parse_table, render as render_table, HEADER};
pub use tuple::{negative_convert, NegativeTuple, STORED_VALUE_LEN};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("record name is empty")]
    EmptyName,
    #[error("record name {0:?} contains a tab or line break")]
    InvalidName(String),
    #[error("cannot fragment {0:?}: fragments must be printable ASCII other than '*'")]
    InvalidFragment(String),
    #[error("record {name:?} already has a group under key {key}; retry in the next second")]
    DuplicateInsert { name: String, key: TimestampKey },
    #[error("no record named {0:?}")]
    UnknownRecord(String),
    #[error("table is corrupt at line {line}: {reason}")]
    CorruptTable { line: usize, reason: String },
    #[error("table {path} already exists and is not empty")]
    AlreadyInitialized { path: PathBuf },
    #[error("storage failure: {0}")]
    StorageFailure(#[from] io::Error),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

pub struct StoreOptions {
    pub encoder: Encoder,
    pub cache_capacity: usize,
    pub clock: Box<dyn Clock>,
    /// Seeds decoy generation; entropy when `None`.
    pub chaff_seed: Option<u64>,
}

impl Default for StoreOptions {
    fn default() -> Self {
        Self {
            encoder: Encoder::default(),
            cache_capacity: DEFAULT_CAPACITY,
            clock: Box::new(SystemClock),
            chaff_seed: None,
        }
    }
}

struct State {
    rows: Vec<NegativeTuple>,
    index: HashMap<String, Vec<usize>>,
    rng: ChaCha20Rng,
}

impl State {
    fn group_for(&self, name: &str) -> Option<CacheEntry> {
        let positions = self.index.get(name)?;
        Some(entry_from_rows(name, positions.iter().map(|&i| &self.rows[i])))
    }

    fn has_group(&self, name: &str, key: &TimestampKey) -> bool {
        self.index
            .get(name)
            .is_some_and(|ps| ps.iter().any(|&i| &self.rows[i].key == key))
    }
}

fn entry_from_rows<'a>(name: &str, rows: impl Iterator<Item = &'a NegativeTuple>) -> CacheEntry {
    let mut groups: BTreeMap<TimestampKey, Vec<(u32, char)>> = BTreeMap::new();
    for row in rows {
        groups
            .entry(row.key.clone())
            .or_default()
            .push((row.ordinal, row.fragment));
    }
    CacheEntry {
        record_name: name.to_owned(),
        groups,
    }
}

/// Reassembles a key group if its ordinals are exactly `0..width`.
fn reassemble(group: &[(u32, char)], width: usize) -> Option<String> {
    if group.len() != width {
        return None;
    }
    let mut slots = vec![None; width];
    for &(ordinal, fragment) in group {
        let slot = slots.get_mut(ordinal as usize)?;
        if slot.replace(fragment).is_some() {
            return None;
        }
    }
    slots.into_iter().collect()
}

pub struct TableStore {
    path: Option<PathBuf>,
    encoder: Encoder,
    clock: Box<dyn Clock>,
    cache: RecordCache,
    state: RwLock<State>,
    // serializes writers so the file append and the in-memory update stay paired
    writer: Mutex<()>,
}

impl std::fmt::Debug for TableStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TableStore")
            .field("path", &self.path)
            .field("encoder", &self.encoder)
            .field("rows", &self.len())
            .finish_non_exhaustive()
    }
}

impl TableStore {
    /// Loads the table at `path`. A missing file is an empty store; the file
    /// is created on the first insert.
    pub fn open(path: impl Into<PathBuf>, options: StoreOptions) -> Result<Self, StoreError> {
        let path = path.into();
        let rows = match File::open(&path) {
            Ok(mut file) => {
                let mut bytes = Vec::new();
                file.read_to_end(&mut bytes)?;
                table::parse(&bytes)?
            }
            Err(err) if err.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(err) => return Err(err.into()),
        };
        Ok(Self::from_rows(Some(path), rows, options))
    }

    /// A store with no backing file.
    pub fn in_memory(options: StoreOptions) -> Self {
        Self::from_rows(None, Vec::new(), options)
    }

    /// Writes a header-only table. Fails if a non-empty file is already there.
    pub fn create(path: impl AsRef<Path>) -> Result<(), StoreError> {
        let path = path.as_ref();
        if path.metadata().is_ok_and(|m| m.len() > 0) {
            return Err(StoreError::AlreadyInitialized {
                path: path.to_owned(),
            });
        }
        let mut file = File::create(path)?;
        file.write_all(table::render(&[]).as_bytes())?;
        file.sync_all()?;
        Ok(())
    }

    fn from_rows(path: Option<PathBuf>, rows: Vec<NegativeTuple>, options: StoreOptions) -> Self {
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, row) in rows.iter().enumerate() {
            index.entry(row.record_name.clone()).or_default().push(i);
        }
        let rng = match options.chaff_seed {
            Some(seed) => ChaCha20Rng::seed_from_u64(seed),
            None => ChaCha20Rng::from_entropy(),
        };
        Self {
            path,
            encoder: options.encoder,
            clock: options.clock,
            cache: RecordCache::new(options.cache_capacity),
            state: RwLock::new(State { rows, index, rng }),
            writer: Mutex::new(()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn len(&self) -> usize {
        self.read().rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rows(&self) -> Vec<NegativeTuple> {
        self.read().rows.clone()
    }

    pub fn cache_stats(&self) -> CacheStats {
        self.cache.stats()
    }

    pub fn cache(&self) -> &RecordCache {
        &self.cache
    }

    /// Encodes `secret` under a fresh key and appends its rows plus `chaff` decoys.
    pub fn insert_record(
        &self,
        name: &str,
        secret: &str,
        public: &RsaPublicKey,
        chaff: usize,
    ) -> Result<TimestampKey, StoreError> {
        tuple::validate_name(name)?;
        let key = make_timestamp(self.clock.now())?;
        let encoded = self.encoder.encode(secret, &key, public)?;
        let genuine = negative_convert(encoded.as_str(), &key, name)?;

        let _writer = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        // the decoy rng lives in State
        let batch = {
            let mut state = self.write();
            if state.has_group(name, &key) {
                return Err(StoreError::DuplicateInsert {
                    name: name.to_owned(),
                    key,
                });
            }
            let mut batch = genuine;
            if chaff > 0 {
                let mut taken: HashSet<TimestampKey> = state
                    .index
                    .get(name)
                    .map(|ps| ps.iter().map(|&i| state.rows[i].key.clone()).collect())
                    .unwrap_or_default();
                taken.insert(key.clone());
                let width = self.encoder.fragments() as u32;
                for _ in 0..chaff {
                    let decoy = decoy_row(&mut state.rng, name, width, &mut taken);
                    batch.push(decoy);
                }
                batch.shuffle(&mut state.rng);
            }
            batch
        };

        if let Some(path) = &self.path {
            append_rows(path, &batch)?;
        }

        let mut state = self.write();
        let start = state.rows.len();
        let positions = state.index.entry(name.to_owned()).or_default();
        positions.extend(start..start + batch.len());
        state.rows.extend(batch);
        let entry = state.group_for(name).expect("just inserted");
        self.cache.put(name, Arc::new(entry));
        Ok(key)
    }

    /// Groups stored under `name`, served from the cache when possible.
    pub fn lookup(&self, name: &str) -> Option<Arc<CacheEntry>> {
        if let Some(entry) = self.cache.get(name) {
            return Some(entry);
        }
        let entry = Arc::new(self.read().group_for(name)?);
        self.cache.put(name, Arc::clone(&entry));
        Some(entry)
    }

    /// True when `candidate` re-encodes to a complete key group under `name`.
    pub fn verify_record(
        &self,
        name: &str,
        candidate: &str,
        public: &RsaPublicKey,
    ) -> Result<bool, StoreError> {
        if name.is_empty() {
            return Err(StoreError::EmptyName);
        }
        let entry = self
            .lookup(name)
            .ok_or_else(|| StoreError::UnknownRecord(name.to_owned()))?;
        let width = self.encoder.fragments();
        for (key, group) in &entry.groups {
            let Some(stored) = reassemble(group, width) else {
                continue;
            };
            if self.encoder.encode(candidate, key, public)?.as_str() == stored {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Every row whose name or stored value contains `substring`, verbatim.
    pub fn raw_query(&self, substring: &str) -> Vec<(String, String)> {
        self.read()
            .rows
            .iter()
            .filter_map(|row| {
                let stored = row.stored_value();
                (row.record_name.contains(substring) || stored.contains(substring))
                    .then(|| (row.record_name.clone(), stored))
            })
            .collect()
    }

    /// Groups for `name` read straight from the table file, bypassing memory.
    pub fn read_entry_from_disk(&self, name: &str) -> Result<Option<CacheEntry>, StoreError> {
        let rows = match &self.path {
            Some(path) => table::parse(&std::fs::read(path)?)?,
            None => self.rows(),
        };
        let mut matching = rows.iter().filter(|r| r.record_name == name).peekable();
        if matching.peek().is_none() {
            return Ok(None);
        }
        Ok(Some(entry_from_rows(name, matching)))
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, State> {
        self.state.read().unwrap_or_else(|p| p.into_inner())
    }

    fn write(&self) -> std::sync::RwLockWriteGuard<'_, State> {
        self.state.write().unwrap_or_else(|p| p.into_inner())
    }
}

/// Decoys use keys between 2000 and 2037 that no other group under the name has.
fn decoy_row(
    rng: &mut ChaCha20Rng,
    name: &str,
    width: u32,
    taken: &mut HashSet<TimestampKey>,
) -> NegativeTuple {
    const SPAN_SECS: i64 = 38 * 365 * 86_400;
    let epoch = NaiveDate::from_ymd_opt(2000, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid date");
    let key = loop {
        let instant = epoch + Duration::seconds(rng.gen_range(0..SPAN_SECS));
        let key = make_timestamp(instant).expect("year within range");
        if taken.insert(key.clone()) {
            break key;
        }
    };
    let fragment = char::from_digit(rng.gen_range(0..16), 16).expect("hex digit");
    NegativeTuple {
        record_name: name.to_owned(),
        fragment,
        key,
        ordinal: rng.gen_range(0..width),
    }
}

/// Appends the batch in one write. On failure the file is cut back to its
/// previous length so a half-written group never survives.
fn append_rows(path: &Path, rows: &[NegativeTuple]) -> Result<(), StoreError> {
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    let before = file.metadata()?.len();
    let mut payload = String::new();
    if before == 0 {
        payload.push_str(HEADER);
        payload.push('\n');
    }
    for row in rows {
        payload.push_str(&table::render_row(row));
    }
    let result = file
        .write_all(payload.as_bytes())
        .and_then(|_| file.sync_data());
    if let Err(err) = result {
        let _ = file.set_len(before);
        return Err(StoreError::StorageFailure(err));
    }
    Ok(())
}
