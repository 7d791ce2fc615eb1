//! Content-addressed on-disk cache: one JSON file per judge call.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{JudgeError, JudgeRecord};

/// File-backed record store. Writes go through a temporary file in the same
/// directory followed by an atomic rename, so concurrent readers never see a
/// partial record and concurrent writers of the same key leave one intact
/// copy.
#[derive(Debug, Clone)]
pub struct JudgeCache {
    dir: PathBuf,
}

impl JudgeCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        JudgeCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, cache_key: &str) -> PathBuf {
        self.dir.join(format!("{cache_key}.json"))
    }

    /// Looks up a record. A missing file is a miss; an unreadable or corrupt
    /// file is treated as a miss (and will be overwritten by the next store)
    /// so that a crashed run never wedges the cache.
    pub fn load(&self, cache_key: &str) -> Option<JudgeRecord> {
        let path = self.path_for(cache_key);
        let bytes = fs::read(&path).ok()?;
        match serde_json::from_slice::<JudgeRecord>(&bytes) {
            Ok(record) if record.cache_key == cache_key => Some(record),
            _ => {
                log::warn!("ignoring corrupt cache entry {}", path.display());
                None
            }
        }
    }

    pub fn store(&self, record: &JudgeRecord) -> Result<(), JudgeError> {
        let path = self.path_for(&record.cache_key);
        let to_cache_err = |source: std::io::Error| JudgeError::Cache {
            path: path.display().to_string(),
            source,
        };
        fs::create_dir_all(&self.dir).map_err(to_cache_err)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(to_cache_err)?;
        let body =
            serde_json::to_vec_pretty(record).expect("record fields always serialize");
        tmp.write_all(&body).map_err(to_cache_err)?;
        tmp.persist(&path)
            .map_err(|e| to_cache_err(e.error))?;
        Ok(())
    }
}
