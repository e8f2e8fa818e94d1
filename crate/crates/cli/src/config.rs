//! Run configuration shared by all subcommands.
//!
//! Defaults can be set in a file of `key = value` lines named by the
//! `GL3GPS_CONFIG` environment variable; command-line flags take precedence.
//! Recognised keys: `tol`, `threads`, `format`, `out`, `seed`.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::report::Format;
use crate::CliError;

pub const CONFIG_ENV: &str = "GL3GPS_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tol: f64,
    pub threads: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tol: 1e-8, threads: 1, format: Format::Text, out: None, seed: 1 }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Usage(format!("config key {key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Defaults overridden by the file named in `GL3GPS_CONFIG`, if any.
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) => Self::from_file(Path::new(&path)),
            None => Ok(Self::default()),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "tol" => cfg.tol = parse(key, value)?,
                "threads" => cfg.threads = parse(key, value)?,
                "format" => cfg.format = value.parse().map_err(CliError::Usage)?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                "seed" => cfg.seed = parse(key, value)?,
                other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 1e-14 && self.tol < 1e-1) {
            return Err(CliError::Usage(format!("tolerance {} outside (1e-14, 1e-1)", self.tol)));
        }
        if self.threads < 1 {
            return Err(CliError::Usage("threads must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_values() {
        let cfg = RunConfig::from_text("tol = 1e-6\n# comment\nformat = json\nseed=7\n").unwrap();
        assert_eq!(cfg.tol, 1e-6);
        assert_eq!(cfg.format, Format::Json);
        assert_eq!(cfg.seed, 7);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(RunConfig::from_text("tol = 0.5").is_err());
        assert!(RunConfig::from_text("threads = 0").is_err());
        assert!(RunConfig::from_text("colour = red").is_err());
        assert!(RunConfig::from_text("tol 1e-3").is_err());
    }
}
