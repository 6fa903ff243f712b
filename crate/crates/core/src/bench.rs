//! Timing harness for the encoding pipeline.
//!
//! For every secret length it reports the median wall time of
//! `encode_secret` and how many genuine rows one insert produces.

use std::time::Instant;

use rand::distributions::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::codec::{FixedClock, TimestampKey};
use crate::crypto::{Encoder, RsaPublicKey};
use crate::store::{StoreError, StoreOptions, TableStore};

pub const CSV_HEADER: &str = "len,encode_ns,rows";
pub const DEFAULT_REPS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchRow {
    pub len: usize,
    pub encode_ns: u128,
    pub rows: usize,
}

impl BenchRow {
    pub fn to_csv(&self) -> String {
        format!("{},{},{}", self.len, self.encode_ns, self.rows)
    }
}

pub fn median(samples: &mut [u128]) -> u128 {
    assert!(!samples.is_empty(), "median of no samples");
    samples.sort_unstable();
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2
    }
}

/// Runs lengths `1..=max_len`, `reps` timed encodes each.
pub fn run(
    max_len: usize,
    reps: usize,
    encoder: Encoder,
    public: &RsaPublicKey,
) -> Result<Vec<BenchRow>, StoreError> {
    let key: TimestampKey = "200805291430051".parse()?;
    let clock = FixedClock(key.to_datetime());
    let store = TableStore::in_memory(StoreOptions {
        encoder,
        clock: Box::new(clock),
        chaff_seed: Some(0),
        ..StoreOptions::default()
    });
    let mut rng = ChaCha20Rng::seed_from_u64(0x6e_6567_6462);
    let printable = Uniform::new_inclusive(b' ', b'~');
    let mut out = Vec::with_capacity(max_len);
    for len in 1..=max_len {
        let secret: String = (0..len).map(|_| rng.sample(printable) as char).collect();
        let mut samples = Vec::with_capacity(reps);
        for _ in 0..reps.max(1) {
            let started = Instant::now();
            let encoded = encoder.encode(&secret, &key, public)?;
            samples.push(started.elapsed().as_nanos());
            std::hint::black_box(encoded);
        }
        let before = store.len();
        store.insert_record(&format!("bench-{len}"), &secret, public, 0)?;
        out.push(BenchRow {
            len,
            encode_ns: median(&mut samples),
            rows: store.len() - before,
        });
    }
    Ok(out)
}

pub fn render_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}
