use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use log::warn;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exact::IntMatrix;
use crate::filtration::{n_of, AdmissibleElement, FiltrationError, NFunction};

pub const CACHE_ENV: &str = "APGEO_CACHE";
pub const DEFAULT_CACHE_PATH: &str = ".apgeo-cache.jsonl";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub gamma_hash: String,
    /// Admissible element descriptor; `v` alone does not determine `eta` beyond `A1`.
    pub eta: String,
    pub v: u64,
    pub r: u32,
    pub n_value: String,
}

pub fn gamma_hash(gamma: &IntMatrix) -> String {
    hex::encode(Sha256::digest(gamma.to_string().as_bytes()))
}

type Key = (String, String, u32);

/// `n(gamma, eta^r)` with an append-only JSON-lines store in front.
pub struct CachedN {
    path: PathBuf,
    table: Mutex<HashMap<Key, u64>>,
    writer: Mutex<Option<File>>,
}

impl CachedN {
    /// Load whatever is readable at `path`; bad lines are skipped.
    pub fn open(path: &Path) -> Self {
        let mut table = HashMap::new();
        if let Ok(f) = File::open(path) {
            for (no, line) in BufReader::new(f).lines().enumerate() {
                let Ok(line) = line else {
                    warn!("{}: unreadable line {}", path.display(), no + 1);
                    continue;
                };
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<CacheEntry>(&line)
                    .ok()
                    .and_then(|e| e.n_value.parse::<u64>().ok().map(|n| (e, n)))
                {
                    Some((e, n)) => {
                        table.insert((e.gamma_hash, e.eta, e.r), n);
                    }
                    None => warn!("{}: skipping corrupt line {}", path.display(), no + 1),
                }
            }
        }
        CachedN {
            path: path.to_path_buf(),
            table: Mutex::new(table),
            writer: Mutex::new(None),
        }
    }

    pub fn len(&self) -> usize {
        self.table.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn append(&self, entry: &CacheEntry) {
        let mut w = self.writer.lock().expect("cache lock");
        if w.is_none() {
            match OpenOptions::new().create(true).append(true).open(&self.path) {
                Ok(f) => *w = Some(f),
                Err(e) => {
                    warn!("cannot open cache {}: {e}", self.path.display());
                    return;
                }
            }
        }
        let line = serde_json::to_string(entry).expect("cache entry serializes");
        if let Some(f) = w.as_mut() {
            if let Err(e) = writeln!(f, "{line}") {
                warn!("cannot write cache {}: {e}", self.path.display());
            }
        }
    }
}

impl NFunction for CachedN {
    fn n_value(&self, gamma: &IntMatrix, eta: &AdmissibleElement, r: u32) -> Result<u64, FiltrationError> {
        let key = (gamma_hash(gamma), eta.descriptor(), r);
        if let Some(&n) = self.table.lock().expect("cache lock").get(&key) {
            return Ok(n);
        }
        let n = n_of(gamma, eta, r)?;
        let fresh = self.table.lock().expect("cache lock").insert(key.clone(), n).is_none();
        if fresh {
            self.append(&CacheEntry {
                gamma_hash: key.0,
                eta: key.1,
                v: eta.v(),
                r,
                n_value: n.to_string(),
            });
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{build_admissible, GroupType};

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.jsonl");
        let g: IntMatrix = "2,1;1,1".parse().unwrap();
        let eta = build_admissible(GroupType::A1, 2, 5, (1, 2)).unwrap();
        let c = CachedN::open(&path);
        assert_eq!(c.n_value(&g, &eta, 2).unwrap(), 25);
        assert_eq!(c.n_value(&g, &eta, 2).unwrap(), 25);
        drop(c);
        let mut text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1);
        text.push_str("{not json\n");
        std::fs::write(&path, text).unwrap();
        let c = CachedN::open(&path);
        assert_eq!(c.len(), 1);
        assert_eq!(c.n_value(&g, &eta, 2).unwrap(), 25);
    }
}
