//! On-disk cache of resolutions, one JSON file per key.
//!
//! File names are the SHA-256 of the key string; `index.txt` maps hashes
//! back to keys. Writes go to a temporary file that is renamed into place,
//! so concurrent writers of the same key leave one intact file. Unreadable
//! files and version mismatches count as misses.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::module::ModulePresentation;
use crate::resolution::{resolve_minimal, Resolution};

pub const ENGINE_VERSION: &str = concat!("metastable-", env!("CARGO_PKG_VERSION"), "-r1");
pub const CACHE_DIR_ENV: &str = "METASTABLE_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".metastable-cache";

#[derive(Serialize, Deserialize)]
struct Entry {
    engine_version: String,
    key: String,
    resolution: Resolution,
}

#[derive(Clone, Debug)]
pub struct ResolutionCache {
    dir: PathBuf,
    version: String,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl ResolutionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResolutionCache { dir: dir.into(), version: ENGINE_VERSION.to_string() }
    }

    /// Directory from the environment, else the project-local default.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR));
        Self::new(dir)
    }

    /// A cache that tags entries with a different engine version.
    pub fn with_version(mut self, version: &str) -> Self {
        self.version = version.to_string();
        self
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(&self, module: &ModulePresentation, t_max: i32, s_max: u32) -> String {
        format!("{}|p={}|{}|t_max={t_max}|s_max={s_max}", self.version, module.prime, module.descriptor())
    }

    fn path_for(&self, key: &str) -> PathBuf {
        let hash = hex::encode(Sha256::digest(key.as_bytes()));
        self.dir.join(format!("{hash}.json"))
    }

    pub fn load(&self, module: &ModulePresentation, t_max: i32, s_max: u32) -> Option<Resolution> {
        let key = self.key(module, t_max, s_max);
        let text = fs::read_to_string(self.path_for(&key)).ok()?;
        let entry: Entry = serde_json::from_str(&text).ok()?;
        (entry.engine_version == self.version && entry.key == key).then_some(entry.resolution)
    }

    pub fn store(&self, module: &ModulePresentation, t_max: i32, s_max: u32, res: &Resolution) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let key = self.key(module, t_max, s_max);
        let path = self.path_for(&key);
        let entry = Entry { engine_version: self.version.clone(), key: key.clone(), resolution: res.clone() };
        let body = serde_json::to_vec(&entry)?;
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}",
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&body)?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        self.append_index(&path, &key)?;
        Ok(path)
    }

    fn append_index(&self, path: &Path, key: &str) -> Result<()> {
        let index = self.dir.join("index.txt");
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if let Ok(existing) = fs::read_to_string(&index) {
            if existing.lines().any(|l| l.starts_with(&name)) {
                return Ok(());
            }
        }
        let mut f = fs::OpenOptions::new().create(true).append(true).open(index)?;
        writeln!(f, "{name}\t{key}")?;
        Ok(())
    }

    /// Loads the resolution or computes and stores it.
    pub fn resolve(&self, module: &ModulePresentation, t_max: i32, s_max: u32) -> Result<Arc<Resolution>> {
        if let Some(r) = self.load(module, t_max, s_max) {
            return Ok(Arc::new(r));
        }
        let r = resolve_minimal(module, t_max, s_max)?;
        self.store(module, t_max, s_max, &r)?;
        Ok(Arc::new(r))
    }

    /// Index lines as `(file name, key)`.
    pub fn entries(&self) -> Vec<(String, String)> {
        fs::read_to_string(self.dir.join("index.txt"))
            .unwrap_or_default()
            .lines()
            .filter_map(|l| l.split_once('\t').map(|(a, b)| (a.to_string(), b.to_string())))
            .collect()
    }

    /// Removes every cached file; returns how many were deleted.
    pub fn clear(&self) -> Result<usize> {
        let mut n = 0;
        if !self.dir.exists() {
            return Ok(0);
        }
        for e in fs::read_dir(&self.dir)? {
            let p = e?.path();
            let name = p.file_name().map(|s| s.to_string_lossy().to_string()).unwrap_or_default();
            if name.ends_with(".json") || name == "index.txt" || name.starts_with(".tmp-") {
                fs::remove_file(&p)?;
                n += 1;
            }
        }
        Ok(n)
    }
}
