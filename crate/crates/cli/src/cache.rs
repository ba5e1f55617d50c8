//! Content-addressed result cache.
//!
//! An entry is `<key>.art` (the artifact bytes) next to `<key>.meta.json`
//! (the job spec, the SHA-256 of the artifact and an optional value
//! check). Keys are the SHA-256 of the canonical JSON job spec.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever an artifact format changes.
pub const CACHE_SCHEMA: u32 = 1;

/// Everything that determines an artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobSpec {
    pub schema: u32,
    pub engine: String,
    pub command: String,
    pub params: BTreeMap<String, String>,
}

impl JobSpec {
    pub fn new(command: &str) -> Self {
        JobSpec {
            schema: CACHE_SCHEMA,
            engine: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn key(&self) -> String {
        let canonical = serde_json::to_string(self).expect("job spec serializes");
        hex(&Sha256::digest(canonical.as_bytes()))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    spec: JobSpec,
    sha256: String,
    check: Option<String>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Outcome of a lookup.
pub enum Lookup {
    Hit(Vec<u8>),
    Miss,
    /// The entry failed verification and was removed.
    Corrupt(String),
}

pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn open(root: &Path) -> std::io::Result<Self> {
        fs::create_dir_all(root)?;
        Ok(Cache {
            root: root.to_path_buf(),
        })
    }

    fn paths(&self, key: &str) -> (PathBuf, PathBuf) {
        (
            self.root.join(format!("{key}.art")),
            self.root.join(format!("{key}.meta.json")),
        )
    }

    /// Exclusive advisory lock on the cache directory.
    fn lock(&self) -> std::io::Result<File> {
        let f = File::options()
            .create(true)
            .truncate(false)
            .write(true)
            .open(self.root.join(".lock"))?;
        f.lock()?;
        Ok(f)
    }

    /// Returns the artifact if its checksum matches and `verify` accepts
    /// it against the stored check value.
    pub fn lookup(
        &self,
        spec: &JobSpec,
        verify: impl Fn(&[u8], Option<&str>) -> bool,
    ) -> std::io::Result<Lookup> {
        let _guard = self.lock()?;
        let key = spec.key();
        let (art, meta) = self.paths(&key);
        let (Ok(bytes), Ok(meta_text)) = (fs::read(&art), fs::read_to_string(&meta)) else {
            return Ok(Lookup::Miss);
        };
        let problem = match serde_json::from_str::<Meta>(&meta_text) {
            Err(e) => Some(format!("unreadable metadata: {e}")),
            Ok(m) if m.spec != *spec => Some("metadata describes a different job".into()),
            Ok(m) if m.sha256 != hex(&Sha256::digest(&bytes)) => Some("checksum mismatch".into()),
            Ok(m) if !verify(&bytes, m.check.as_deref()) => Some("value check failed".into()),
            Ok(_) => None,
        };
        match problem {
            None => Ok(Lookup::Hit(bytes)),
            Some(why) => {
                let _ = fs::remove_file(&art);
                let _ = fs::remove_file(&meta);
                Ok(Lookup::Corrupt(format!("cache entry {key}: {why}")))
            }
        }
    }

    pub fn store(
        &self,
        spec: &JobSpec,
        bytes: &[u8],
        check: Option<String>,
    ) -> std::io::Result<()> {
        let _guard = self.lock()?;
        let key = spec.key();
        let (art, meta) = self.paths(&key);
        let record = Meta {
            spec: spec.clone(),
            sha256: hex(&Sha256::digest(bytes)),
            check,
        };
        write_replacing(&art, bytes)?;
        write_replacing(&meta, serde_json::to_string_pretty(&record)?.as_bytes())
    }
}

/// Writes through a temporary file so readers never see a partial file.
fn write_replacing(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_depend_on_every_field() {
        let a = JobSpec::new("zeros").with("lv", 4).with("digits", 20);
        let b = JobSpec::new("zeros").with("digits", 20).with("lv", 4);
        let c = JobSpec::new("zeros").with("lv", 4).with("digits", 30);
        assert_eq!(a.key(), b.key());
        assert_ne!(a.key(), c.key());
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path()).unwrap();
        let spec = JobSpec::new("test").with("x", 1);
        assert!(matches!(
            cache.lookup(&spec, |_, _| true).unwrap(),
            Lookup::Miss
        ));
        cache.store(&spec, b"hello", Some("5".into())).unwrap();
        let hit = cache
            .lookup(&spec, |b, c| c == Some("5") && b.len() == 5)
            .unwrap();
        assert!(matches!(hit, Lookup::Hit(b) if b == b"hello"));
        fs::write(dir.path().join(format!("{}.art", spec.key())), b"jello").unwrap();
        assert!(matches!(
            cache.lookup(&spec, |_, _| true).unwrap(),
            Lookup::Corrupt(_)
        ));
        assert!(matches!(
            cache.lookup(&spec, |_, _| true).unwrap(),
            Lookup::Miss
        ));
    }
}
