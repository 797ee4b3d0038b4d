//! Write-once on-disk cache of localized series.
//!
//! One JSON file per entry, named by the SHA-256 of a canonical description
//! of the computation. Each file records its key and a hash of the stored
//! value; a file that fails either check is reported as corrupt, removed and
//! recomputed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::localize::{integrate_certified, Certify, Integrand, LocalizeError};
use crate::refined::DSeries;
use crate::series::{Coefficient, LaurentZ, SeriesError, TruncSeries, Var};
use crate::toric::{EquivLineBundle, ModelFile, ToricSurfaceModel};

pub const CACHE_ENV: &str = "REFINED_CURVES_CACHE";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache entry {path} is corrupt: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Content hash identifying one computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheKey {
    pub hash: String,
    pub description: Value,
}

impl CacheKey {
    pub fn new(
        surface: &ToricSurfaceModel,
        bundle: &EquivLineBundle,
        n: usize,
        integrand: &str,
        truncations: &[i64],
    ) -> Self {
        let model = ModelFile::from_model(surface, bundle);
        let description = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "charts": model.charts,
            "characters": model.bundle.characters,
            "n": n,
            "integrand": integrand,
            "truncations": truncations,
        });
        let hash = sha256_hex(description.to_string().as_bytes());
        Self { hash, description }
    }
}

#[derive(Debug, Default)]
pub struct CacheStats {
    pub hits: AtomicUsize,
    pub misses: AtomicUsize,
    pub corrupt: AtomicUsize,
}

/// A cache directory, or a disabled cache that always recomputes.
#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    pub stats: CacheStats,
}

impl Cache {
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()), stats: CacheStats::default() }
    }

    /// `$REFINED_CURVES_CACHE` if set, else `dir`, else disabled.
    pub fn from_env_or(dir: Option<PathBuf>) -> Self {
        match std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()) {
            Some(v) => Self::at(PathBuf::from(v)),
            None => dir.map(Self::at).unwrap_or_default(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.json", key.hash)))
    }

    /// Reads an entry. `Ok(None)` on a miss.
    pub fn load(&self, key: &CacheKey) -> Result<Option<Value>, CacheError> {
        let Some(path) = self.path(key) else { return Ok(None) };
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |reason: &str| CacheError::Corrupt { path: path.clone(), reason: reason.to_string() };
        let entry: Value = serde_json::from_str(&text).map_err(|e| corrupt(&e.to_string()))?;
        if entry.get("key").and_then(Value::as_str) != Some(key.hash.as_str()) {
            return Err(corrupt("key does not match file name"));
        }
        if entry.get("description") != Some(&key.description) {
            return Err(corrupt("description does not match key"));
        }
        let value = entry.get("value").ok_or_else(|| corrupt("missing value"))?;
        let stored = entry.get("value_sha256").and_then(Value::as_str).ok_or_else(|| corrupt("missing value hash"))?;
        if sha256_hex(value.to_string().as_bytes()) != stored {
            return Err(corrupt("value hash mismatch"));
        }
        Ok(Some(value.clone()))
    }

    /// Writes an entry unless one already exists (write-once).
    pub fn store(&self, key: &CacheKey, value: &Value) -> Result<(), CacheError> {
        let Some(path) = self.path(key) else { return Ok(()) };
        let dir = path.parent().expect("entry path has a parent");
        fs::create_dir_all(dir)?;
        let created = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let entry = json!({
            "key": key.hash,
            "description": key.description,
            "created": created,
            "value_sha256": sha256_hex(value.to_string().as_bytes()),
            "value": value,
        });
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(serde_json::to_string_pretty(&entry).expect("json").as_bytes())?;
        tmp.flush()?;
        match tmp.persist_noclobber(&path) {
            Ok(_) => Ok(()),
            // another writer got there first; entries are immutable
            Err(e) if path.exists() => {
                drop(e);
                Ok(())
            }
            Err(e) => Err(e.error.into()),
        }
    }

    /// Cached value, or `compute()` stored for next time. Corrupt entries are
    /// logged, removed and recomputed.
    pub fn get_or_compute<T, E>(
        &self,
        key: &CacheKey,
        decode: impl Fn(&Value) -> Result<T, SeriesError>,
        encode: impl Fn(&T) -> Value,
        compute: impl FnOnce() -> Result<T, E>,
    ) -> Result<T, E>
    where
        E: From<CacheError>,
    {
        match self.load(key) {
            Ok(Some(v)) => match decode(&v) {
                Ok(t) => {
                    self.stats.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(t);
                }
                Err(e) => self.discard(key, &e.to_string()),
            },
            Ok(None) => {}
            Err(CacheError::Corrupt { reason, .. }) => self.discard(key, &reason),
            Err(e) => return Err(e.into()),
        }
        self.stats.misses.fetch_add(1, Ordering::Relaxed);
        let value = compute()?;
        self.store(key, &encode(&value))?;
        Ok(value)
    }

    fn discard(&self, key: &CacheKey, reason: &str) {
        self.stats.corrupt.fetch_add(1, Ordering::Relaxed);
        if let Some(path) = self.path(key) {
            log::warn!("discarding corrupt cache entry {}: {reason}", path.display());
            let _ = fs::remove_file(path);
        }
    }
}

#[derive(Debug, Error)]
pub enum CachedError {
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Localize(#[from] LocalizeError),
}

/// [`crate::localize::d_series`] with one cache entry per `w^n` coefficient.
pub fn d_series_cached(
    surface: &ToricSurfaceModel,
    bundle: &EquivLineBundle,
    n_max: usize,
    x_order: i64,
    certify: &Certify,
    cache: &Cache,
) -> Result<DSeries, CachedError> {
    if x_order < 0 {
        return Err(LocalizeError::InvalidInput(format!("x_order must be >= 0, got {x_order}")).into());
    }
    let mut coeffs = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let key = CacheKey::new(surface, bundle, n, "d", &[x_order]);
        let c = cache.get_or_compute(
            &key,
            TruncSeries::<LaurentZ>::from_json,
            Coefficient::to_json,
            || -> Result<_, CachedError> {
                log::info!("localizing {} n={n} x_order={x_order}", surface.name);
                Ok(integrate_certified(surface, bundle, n, &Integrand::D, x_order, certify)?)
            },
        )?;
        coeffs.push(c);
    }
    Ok(TruncSeries::from_coeffs(Var::W, coeffs, n_max as i64))
}
