//! Flag / config-file / environment merging.
//!
//! A `--config FILE` is a flat JSON object whose keys mirror the long flag
//! names (underscored). Explicit flags always win over file values, file
//! values win over built-in defaults, and the seed additionally falls back
//! to the `ORIGAMI_SEED` environment variable.

use std::path::Path;

use serde_json::Value;

use crate::{CliError, CliResult};

/// Parsed config file, kept as raw JSON so each command pulls only the keys
/// it knows.
pub struct ConfigFile {
    values: serde_json::Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let values = match path {
            None => serde_json::Map::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                match serde_json::from_str::<Value>(&text) {
                    Ok(Value::Object(map)) => map,
                    Ok(_) => {
                        return Err(CliError::Config(format!(
                            "{} must hold a JSON object",
                            p.display()
                        )))
                    }
                    Err(e) => {
                        return Err(CliError::Config(format!(
                            "cannot parse {}: {e}",
                            p.display()
                        )))
                    }
                }
            }
        };
        Ok(Self { values })
    }

    fn get<T: serde::de::DeserializeOwned>(&self, key: &str) -> CliResult<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key {key:?}: {e}"))),
        }
    }

    /// flag > config > default.
    pub fn resolve<T: serde::de::DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
        default: T,
    ) -> CliResult<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// flag > config > None.
    pub fn resolve_opt<T: serde::de::DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> CliResult<Option<T>> {
        if let Some(v) = flag {
            return Ok(Some(v));
        }
        self.get(key)
    }

    /// flag > config > ORIGAMI_SEED > 0.
    pub fn resolve_seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Some(s) = self.get::<u64>("seed")? {
            return Ok(s);
        }
        match std::env::var("ORIGAMI_SEED") {
            Ok(text) => text
                .parse::<u64>()
                .map_err(|_| CliError::Config(format!("ORIGAMI_SEED={text:?} is not a u64"))),
            Err(_) => Ok(0),
        }
    }
}

/// Install the global worker pool; 0 keeps the library default.
pub fn configure_jobs(jobs: usize) -> CliResult<()> {
    if jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot set --jobs: {e}")))?;
    }
    Ok(())
}

/// Write a deterministic run manifest plus a separate (non-deterministic)
/// timings file. The manifest is a pure function of the resolved config;
/// wall-clock timings stay out of it so reruns are byte-identical.
pub fn write_manifest(
    out_dir: &Path,
    command: &str,
    resolved: &impl serde::Serialize,
    status: &str,
    seconds: Option<f64>,
) -> CliResult<()> {
    std::fs::create_dir_all(out_dir)?;
    let manifest = serde_json::json!({
        "schema": 1,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "status": status,
        "config": resolved,
    });
    std::fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    if let Some(s) = seconds {
        let timings = serde_json::json!({ "schema": 1, "wall_seconds": s });
        std::fs::write(
            out_dir.join("timings.json"),
            serde_json::to_string_pretty(&timings)?,
        )?;
    }
    Ok(())
}
