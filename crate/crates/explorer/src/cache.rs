//! Content-keyed tile cache with in-flight deduplication.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};
use tokio::sync::watch;

use crate::pool::WorkerPool;

pub type Bytes = Arc<Vec<u8>>;
type Outcome = Option<Result<Bytes, String>>;

/// Hex SHA-256 of the JSON form of `material` plus the code version.
pub fn cache_key<T: Serialize>(kind: &str, material: &T) -> String {
    let body = serde_json::to_string(material).expect("cache key material serializes");
    let mut h = Sha256::new();
    h.update(kind.as_bytes());
    h.update([0]);
    h.update(env!("CARGO_PKG_VERSION").as_bytes());
    h.update([0]);
    h.update(body.as_bytes());
    cubiclab::tile::hex(&h.finalize())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lookup {
    Ready { bytes: Bytes, cached: bool },
    Pending,
    Failed(String),
}

/// Tiles in memory, optionally mirrored to a directory. Reads are shared;
/// insertion takes the write lock.
#[derive(Debug)]
pub struct TileCache {
    dir: Option<PathBuf>,
    entries: RwLock<HashMap<String, Bytes>>,
    pending: Mutex<HashMap<String, watch::Receiver<Outcome>>>,
}

impl TileCache {
    pub fn new(dir: Option<PathBuf>) -> std::io::Result<Self> {
        if let Some(d) = &dir {
            std::fs::create_dir_all(d)?;
        }
        Ok(Self {
            dir,
            entries: RwLock::new(HashMap::new()),
            pending: Mutex::new(HashMap::new()),
        })
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.cubq")))
    }

    pub fn get(&self, key: &str) -> Option<Bytes> {
        if let Some(b) = self.entries.read().unwrap().get(key) {
            return Some(b.clone());
        }
        let bytes = Arc::new(std::fs::read(self.path(key)?).ok()?);
        self.entries.write().unwrap().insert(key.to_string(), bytes.clone());
        Some(bytes)
    }

    pub fn insert(&self, key: &str, bytes: Bytes) {
        if let Some(p) = self.path(key) {
            let tmp = p.with_extension("part");
            if std::fs::write(&tmp, bytes.as_slice()).is_ok() {
                let _ = std::fs::rename(&tmp, &p);
            }
        }
        self.entries.write().unwrap().insert(key.to_string(), bytes);
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached tile, or schedules `compute` on the pool (once per
    /// key) and waits up to `wait` for it.
    pub async fn get_or_compute<F>(self: &Arc<Self>, key: String, pool: &WorkerPool, wait: Duration, compute: F) -> Lookup
    where
        F: FnOnce() -> Result<Vec<u8>, String> + Send + 'static,
    {
        if let Some(bytes) = self.get(&key) {
            return Lookup::Ready { bytes, cached: true };
        }
        let mut rx = {
            let mut pending = self.pending.lock().unwrap();
            match pending.get(&key) {
                Some(rx) => rx.clone(),
                None => {
                    let (tx, rx) = watch::channel(None);
                    pending.insert(key.clone(), rx.clone());
                    let (cache, pool, key) = (self.clone(), pool.clone(), key.clone());
                    tokio::spawn(async move {
                        let result = pool.run(compute).await.map(Arc::new);
                        if let Ok(bytes) = &result {
                            cache.insert(&key, bytes.clone());
                        }
                        cache.pending.lock().unwrap().remove(&key);
                        let _ = tx.send(Some(result));
                    });
                    rx
                }
            }
        };
        let done = tokio::time::timeout(wait, rx.wait_for(|o| o.is_some())).await;
        match done {
            Ok(Ok(outcome)) => match outcome.clone().expect("outcome present") {
                Ok(bytes) => Lookup::Ready { bytes, cached: false },
                Err(e) => Lookup::Failed(e),
            },
            Ok(Err(_)) => Lookup::Failed("compute task dropped".into()),
            Err(_) => Lookup::Pending,
        }
    }
}
