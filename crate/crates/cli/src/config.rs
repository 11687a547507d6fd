//! Run configuration: defaults < config file < environment < flags.

use std::path::Path;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Pass threshold for `check` residuals.
    pub precision: f64,
    pub level: u64,
    /// Truncation bounds; each command falls back to its own default when unset.
    pub max_det: Option<u64>,
    pub max_weight: Option<u64>,
    /// Decomposition bound for Hecke eigensystems.
    pub bound: u64,
    /// Steps for sampled modes.
    pub n: usize,
    pub seed: u64,
    pub threads: usize,
    pub format: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { precision: 1e-6, level: 11, max_det: None, max_weight: None, bound: 13, n: 10_000, seed: 0, threads: 0, format: None }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |e: &dyn std::fmt::Display| format!("{key} = {value}: {e}");
        match key {
            "precision" => {
                self.precision = value.parse().map_err(|e| bad(&e))?;
                if !(self.precision > 0.0) {
                    return Err(format!("precision must be positive, got {value}"));
                }
            }
            "level" => self.level = positive(value).map_err(|e| bad(&e))?,
            "max_det" => self.max_det = Some(positive(value).map_err(|e| bad(&e))?),
            "max_weight" => self.max_weight = Some(positive(value).map_err(|e| bad(&e))?),
            "bound" => self.bound = positive(value).map_err(|e| bad(&e))?,
            "n" => self.n = value.parse().map_err(|e| bad(&e))?,
            "seed" => self.seed = value.parse().map_err(|e| bad(&e))?,
            "threads" => self.threads = value.parse().map_err(|e| bad(&e))?,
            "format" => match value {
                "json" | "csv" | "plain" => self.format = Some(value.to_string()),
                _ => return Err(format!("unknown format {value:?} (json, csv, plain)")),
            },
            _ => return Err(format!("unknown configuration key {key:?}")),
        }
        Ok(())
    }

    /// Flat `key = value` lines; `#` starts a comment.
    pub fn load_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("{}:{}: expected key = value", path.display(), i + 1))?;
            self.set(k.trim(), v.trim()).map_err(|e| format!("{}:{}: {e}", path.display(), i + 1))?;
        }
        Ok(())
    }

    pub fn load_env(&mut self) -> Result<(), String> {
        for (var, key) in [("GL2B_PRECISION", "precision"), ("GL2B_THREADS", "threads")] {
            if let Ok(v) = std::env::var(var) {
                self.set(key, &v).map_err(|e| format!("{var}: {e}"))?;
            }
        }
        Ok(())
    }
}

fn positive(v: &str) -> Result<u64, String> {
    match v.parse::<u64>() {
        Ok(0) => Err("must be positive".into()),
        Ok(x) => Ok(x),
        Err(e) => Err(e.to_string()),
    }
}
