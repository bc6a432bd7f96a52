use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Version stamped into every cache entry; entries from other versions are
/// ignored.
pub const ENGINE_VERSION: &str = kdv_tau::VERSION;

/// Text-file cache. Each entry starts with a header line naming the engine
/// version and the key; the key hashes the version, the entry kind and the
/// canonical JSON of whatever the entry depends on.
#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

fn header(key: &str) -> String {
    format!("# kdvtau-cache version={ENGINE_VERSION} key={key}\n")
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn key(kind: &str, inputs: &impl Serialize) -> String {
        let json = serde_json::to_string(inputs).expect("cache inputs serialize");
        let mut h = Sha256::new();
        h.update(format!("kdvtau {ENGINE_VERSION}\n{kind}\n{json}"));
        hex::encode(h.finalize())
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{kind}-{}.txt", &key[..16])))
    }

    /// The cached body, if present and written by this engine version under
    /// this key.
    pub fn load(&self, kind: &str, key: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(kind, key)?).ok()?;
        text.strip_prefix(&header(key)).map(str::to_owned)
    }

    /// Writes to a temporary file in the same directory, then renames.
    pub fn store(&self, kind: &str, key: &str, body: &str) -> std::io::Result<()> {
        let Some(path) = self.path(kind, key) else {
            return Ok(());
        };
        let dir = path.parent().expect("cache file has a parent");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{}.{}.tmp", key, std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(header(key).as_bytes())?;
            f.write_all(body.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_deterministic_and_input_sensitive() {
        let a = Cache::key("wk-jets", &(2u32, 5u32));
        assert_eq!(a, Cache::key("wk-jets", &(2u32, 5u32)));
        assert_ne!(a, Cache::key("wk-jets", &(2u32, 6u32)));
        assert_ne!(a, Cache::key("series", &(2u32, 5u32)));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn store_load_and_stale_entries() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let key = Cache::key("t", &1u32);
        assert_eq!(cache.load("t", &key), None);
        cache.store("t", &key, "body\n").unwrap();
        assert_eq!(cache.load("t", &key).as_deref(), Some("body\n"));
        // an entry claiming another version is ignored
        let path = cache.path("t", &key).unwrap();
        fs::write(&path, format!("# kdvtau-cache version=0.0.0 key={key}\nbody\n")).unwrap();
        assert_eq!(cache.load("t", &key), None);
        assert_eq!(Cache::new(None).load("t", &key), None);
    }
}
