//! Bounded LRU cache of per-record tuple groups.
//!
//! The store writes through this cache on every insert, so a hit is always
//! identical to what a fresh read of the table would return. Eviction picks
//! the entry with the smallest recency tick.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::codec::TimestampKey;

pub const DEFAULT_CAPACITY: usize = 1024;

/// Fragments of one key group as `(ordinal, fragment)` pairs, in table order.
pub type KeyGroup = Vec<(u32, char)>;

/// Everything stored under one record name, grouped by timestamp key.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CacheEntry {
    pub record_name: String,
    pub groups: BTreeMap<TimestampKey, KeyGroup>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub evictions: u64,
}

impl CacheStats {
    pub fn lookups(&self) -> u64 {
        self.hits + self.misses
    }
}

impl std::fmt::Display for CacheStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "hits={} misses={} evictions={}", self.hits, self.misses, self.evictions)
    }
}

#[derive(Debug)]
struct Slot<V> {
    value: V,
    last_touch: u64,
}

#[derive(Debug)]
struct Inner<V> {
    slots: HashMap<String, Slot<V>>,
    recency: BTreeMap<u64, String>,
    tick: u64,
    stats: CacheStats,
}

impl<V> Inner<V> {
    fn touch(&mut self, name: &str) {
        self.tick += 1;
        let tick = self.tick;
        if let Some(slot) = self.slots.get_mut(name) {
            self.recency.remove(&slot.last_touch);
            slot.last_touch = tick;
            self.recency.insert(tick, name.to_owned());
        }
    }
}

/// Thread-safe LRU map from record name to `V`.
#[derive(Debug)]
pub struct LruCache<V> {
    capacity: usize,
    inner: Mutex<Inner<V>>,
}

pub type RecordCache = LruCache<Arc<CacheEntry>>;

impl<V: Clone> LruCache<V> {
    /// A capacity of zero disables caching: puts are dropped and every get misses.
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            inner: Mutex::new(Inner {
                slots: HashMap::new(),
                recency: BTreeMap::new(),
                tick: 0,
                stats: CacheStats::default(),
            }),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.lock().slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> CacheStats {
        self.lock().stats
    }

    pub fn get(&self, name: &str) -> Option<V> {
        let mut inner = self.lock();
        if inner.slots.contains_key(name) {
            inner.stats.hits += 1;
            inner.touch(name);
            inner.slots.get(name).map(|slot| slot.value.clone())
        } else {
            inner.stats.misses += 1;
            None
        }
    }

    /// Lookup without touching recency or counters.
    pub fn peek(&self, name: &str) -> Option<V> {
        self.lock().slots.get(name).map(|slot| slot.value.clone())
    }

    pub fn put(&self, name: &str, value: V) {
        if self.capacity == 0 {
            return;
        }
        let mut inner = self.lock();
        if let Some(slot) = inner.slots.get_mut(name) {
            slot.value = value;
            inner.touch(name);
            return;
        }
        if inner.slots.len() >= self.capacity {
            if let Some((_, victim)) = inner.recency.pop_first() {
                inner.slots.remove(&victim);
                inner.stats.evictions += 1;
            }
        }
        inner.tick += 1;
        let tick = inner.tick;
        inner.slots.insert(name.to_owned(), Slot { value, last_touch: tick });
        inner.recency.insert(tick, name.to_owned());
    }

    pub fn invalidate(&self, name: &str) {
        let mut inner = self.lock();
        if let Some(slot) = inner.slots.remove(name) {
            inner.recency.remove(&slot.last_touch);
        }
    }

    /// Names currently cached, least recent first.
    pub fn names_by_recency(&self) -> Vec<String> {
        self.lock().recency.values().cloned().collect()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner<V>> {
        self.inner.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
    }
}

impl<V: Clone> Default for LruCache<V> {
    fn default() -> Self {
        Self::new(DEFAULT_CAPACITY)
    }
}
