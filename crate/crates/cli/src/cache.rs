//! On-disk cache of command results, addressed by sha256 of
//! (module, lattice hash, parameters). Entries carry the digest of their
//! payload; a mismatch means the file is recomputed and rewritten.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, COMPUTATION};

pub const CACHE_ENV: &str = "NLCALC_CACHE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Hit,
    Miss,
    Repaired,
    Disabled,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    digest: String,
    payload: String,
}

pub struct Cache {
    root: Option<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Cache {
    /// The cache rooted at $NLCALC_CACHE_DIR, else ~/.cache/nlcalc.
    pub fn from_env(disabled: bool) -> Self {
        if disabled {
            return Cache { root: None };
        }
        let root = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("nlcalc")));
        Cache { root }
    }

    pub fn key(module: &str, lattice_hash: &str, params: &str) -> String {
        sha256_hex(format!("{module}\0{lattice_hash}\0{params}").as_bytes())
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(&key[..2]).join(format!("{key}.json")))
    }

    fn read(&self, key: &str) -> Result<Option<String>, ()> {
        let Some(p) = self.path(key) else { return Ok(None) };
        let Ok(text) = fs::read_to_string(&p) else { return Ok(None) };
        let entry: Entry = serde_json::from_str(&text).map_err(|_| ())?;
        if sha256_hex(entry.payload.as_bytes()) != entry.digest {
            return Err(());
        }
        Ok(Some(entry.payload))
    }

    fn write(&self, key: &str, payload: &str) -> Result<(), CliError> {
        let Some(p) = self.path(key) else { return Ok(()) };
        let io = |e: std::io::Error| CliError::new(COMPUTATION, "cli", "cache_io", format!("{}: {e}", p.display()));
        let dir = p.parent().expect("keyed path has a parent");
        fs::create_dir_all(dir).map_err(io)?;
        let entry = Entry {
            digest: sha256_hex(payload.as_bytes()),
            payload: payload.to_string(),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
        tmp.write_all(serde_json::to_string(&entry).expect("serializable").as_bytes()).map_err(io)?;
        tmp.persist(&p).map_err(|e| io(e.error))?;
        Ok(())
    }

    /// The cached payload for `key`, or the result of `f` stored under it.
    pub fn get_or_compute(
        &self,
        key: &str,
        f: impl FnOnce() -> Result<String, CliError>,
    ) -> Result<(String, Status), CliError> {
        if self.root.is_none() {
            return Ok((f()?, Status::Disabled));
        }
        let status = match self.read(key) {
            Ok(Some(payload)) => return Ok((payload, Status::Hit)),
            Ok(None) => Status::Miss,
            Err(()) => Status::Repaired,
        };
        let payload = f()?;
        self.write(key, &payload)?;
        Ok((payload, status))
    }

    #[cfg(test)]
    pub fn entry_path(&self, key: &str) -> Option<PathBuf> {
        self.path(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miss_hit_repair() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache { root: Some(dir.path().to_path_buf()) };
        let k = Cache::key("theta", "abc", "max-m=2");
        let (a, s) = c.get_or_compute(&k, || Ok("{\"x\":1}".into())).unwrap();
        assert_eq!(s, Status::Miss);
        let (b, s) = c.get_or_compute(&k, || panic!("should hit")).unwrap();
        assert_eq!((a.as_str(), s), (b.as_str(), Status::Hit));
        fs::write(c.entry_path(&k).unwrap(), "{\"digest\":\"00\",\"payload\":\"{}\"}").unwrap();
        let (r, s) = c.get_or_compute(&k, || Ok("{\"x\":1}".into())).unwrap();
        assert_eq!((r.as_str(), s), (a.as_str(), Status::Repaired));
        assert_eq!(c.read(&k), Ok(Some(a)));
        fs::write(c.entry_path(&k).unwrap(), "garbage").unwrap();
        assert_eq!(c.get_or_compute(&k, || Ok("{\"x\":1}".into())).unwrap().1, Status::Repaired);
    }
}
