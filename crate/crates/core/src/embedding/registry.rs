//! Pretrained embedding registry with a checksum-verified local cache.
//!
//! A registry is a JSON object mapping names to entries:
//!
//! ```json
//! { "toy-glove": { "url": "https://example.org/toy.txt", "sha256": "…", "format": "text" } }
//! ```
//!
//! `vocab-npy` entries point `url` at the `.npy` file and additionally
//! carry `vocab_url` and `vocab_sha256`. Files are cached under
//! `$FAIRVEC_CACHE`, or the platform cache directory when unset.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, Read};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::Format;

pub const CACHE_ENV: &str = "FAIRVEC_CACHE";

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("unknown pretrained embedding {name:?}; registry has: {}", available.join(", "))]
    UnknownName { name: String, available: Vec<String> },
    #[error("checksum mismatch for {url}: expected {expected}, got {actual}")]
    ChecksumMismatch {
        url: String,
        expected: String,
        actual: String,
    },
    #[error("download of {url} failed: {detail}")]
    Network { url: String, detail: String },
    #[error("invalid registry: {0}")]
    InvalidRegistry(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistryEntry {
    pub url: String,
    pub sha256: String,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocab_url: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vocab_sha256: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Registry {
    pub entries: BTreeMap<String, RegistryEntry>,
}

impl Registry {
    pub fn from_json(text: &str) -> Result<Self, FetchError> {
        let registry: Registry = serde_json::from_str(text).map_err(|e| FetchError::InvalidRegistry(e.to_string()))?;
        for (name, entry) in &registry.entries {
            if entry.format == Format::Auto {
                return Err(FetchError::InvalidRegistry(format!(
                    "entry {name:?} must name a concrete format"
                )));
            }
            if entry.format == Format::VocabNpy && (entry.vocab_url.is_none() || entry.vocab_sha256.is_none()) {
                return Err(FetchError::InvalidRegistry(format!(
                    "vocab-npy entry {name:?} needs vocab_url and vocab_sha256"
                )));
            }
        }
        Ok(registry)
    }

    pub fn load(path: &Path) -> Result<Self, FetchError> {
        let text = fs::read_to_string(path).map_err(|source| FetchError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Registry::from_json(&text)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }
}

/// Transport used to retrieve registry URLs.
pub trait Fetcher {
    fn fetch(&self, url: &str, dest: &Path) -> Result<(), FetchError>;
}

/// `http(s)://` through ureq, `file://` through a local copy.
#[derive(Clone, Copy, Debug, Default)]
pub struct HttpFetcher;

impl Fetcher for HttpFetcher {
    fn fetch(&self, url: &str, dest: &Path) -> Result<(), FetchError> {
        let io_err = |source| FetchError::Io {
            path: dest.to_path_buf(),
            source,
        };
        if let Some(local) = url.strip_prefix("file://") {
            fs::copy(local, dest).map_err(|e| FetchError::Network {
                url: url.to_string(),
                detail: e.to_string(),
            })?;
            return Ok(());
        }
        let response = ureq::get(url).call().map_err(|e| FetchError::Network {
            url: url.to_string(),
            detail: e.to_string(),
        })?;
        let mut file = File::create(dest).map_err(io_err)?;
        io::copy(&mut response.into_reader(), &mut file).map_err(|e| FetchError::Network {
            url: url.to_string(),
            detail: e.to_string(),
        })?;
        Ok(())
    }
}

/// Cache directory: `$FAIRVEC_CACHE`, else `<platform cache>/fairvec`.
pub fn cache_dir() -> PathBuf {
    match std::env::var_os(CACHE_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => dirs::cache_dir().unwrap_or_else(std::env::temp_dir).join("fairvec"),
    }
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Downloads (or reuses) the named embedding and returns a path for
/// [`super::Embedding::load`].
pub fn fetch_pretrained(name: &str, registry: &Registry) -> Result<PathBuf, FetchError> {
    fetch_pretrained_with(name, registry, &cache_dir(), &HttpFetcher)
}

pub fn fetch_pretrained_with(
    name: &str,
    registry: &Registry,
    cache: &Path,
    fetcher: &dyn Fetcher,
) -> Result<PathBuf, FetchError> {
    let entry = registry.entries.get(name).ok_or_else(|| FetchError::UnknownName {
        name: name.to_string(),
        available: registry.names(),
    })?;
    fs::create_dir_all(cache).map_err(|source| FetchError::Io {
        path: cache.to_path_buf(),
        source,
    })?;

    let stem: String = name
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '_'
            }
        })
        .collect();
    let file_name = match entry.format {
        Format::Text => format!("{stem}.txt"),
        Format::Word2VecBin => format!("{stem}.bin"),
        Format::VocabNpy => format!("{stem}.npy"),
        Format::Auto => unreachable!("rejected when the registry is parsed"),
    };
    let target = cache.join(file_name);
    ensure_cached(&entry.url, &entry.sha256, &target, fetcher)?;

    if entry.format == Format::VocabNpy {
        let (url, sha) = match (&entry.vocab_url, &entry.vocab_sha256) {
            (Some(u), Some(s)) => (u, s),
            _ => {
                return Err(FetchError::InvalidRegistry(format!(
                    "vocab-npy entry {name:?} needs vocab_url and vocab_sha256"
                )))
            }
        };
        ensure_cached(url, sha, &target.with_extension("vocab"), fetcher)?;
    }
    Ok(target)
}

fn ensure_cached(url: &str, expected: &str, target: &Path, fetcher: &dyn Fetcher) -> Result<(), FetchError> {
    let expected = expected.to_ascii_lowercase();
    let io_err = |source| FetchError::Io {
        path: target.to_path_buf(),
        source,
    };
    if target.exists() {
        if sha256_file(target).map_err(io_err)? == expected {
            log::debug!("cache hit for {url} at {}", target.display());
            return Ok(());
        }
        log::warn!("cached {} is stale; downloading again", target.display());
    }

    let mut partial = target.as_os_str().to_owned();
    partial.push(".part");
    let partial = PathBuf::from(partial);
    if let Err(e) = fetcher.fetch(url, &partial) {
        let _ = fs::remove_file(&partial);
        return Err(e);
    }
    let actual = sha256_file(&partial).map_err(io_err)?;
    if actual != expected {
        let _ = fs::remove_file(&partial);
        let _ = fs::remove_file(target);
        return Err(FetchError::ChecksumMismatch {
            url: url.to_string(),
            expected,
            actual,
        });
    }
    fs::rename(&partial, target).map_err(io_err)
}
