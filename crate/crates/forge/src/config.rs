//! `key = value` configuration files. Flags override config values, which
//! override built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, CliResult};

pub const CONFIG_ENV: &str = "FORGE_CONFIG";

pub const KEYS: &[&str] = &[
    "stoplist",
    "template",
    "strict",
    "max_failure_ratio",
    "jobs",
    "seed",
    "chrf.char_n",
    "chrf.word_n",
    "chrf.beta",
    "filter.cutoff",
    "lead",
    "split.stage_pairs",
    "split.translate_offset",
    "split.bilingual_offset",
    "attn.mode",
    "attn.top_k",
    "report.k",
    "report.models",
];

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    base_dir: Option<PathBuf>,
}

impl Config {
    pub fn parse(text: &str, origin: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(before, _)| before).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::validation(format!("{origin}:{}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::validation(format!("{origin}:{}: unknown key `{key}`", i + 1)));
            }
            if values.insert(key.to_owned(), value.trim().to_owned()).is_some() {
                return Err(CliError::validation(format!("{origin}:{}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { values, base_dir: None })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text, &path.display().to_string())?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    /// Loads `explicit`, else the file named by `FORGE_CONFIG`, else nothing.
    pub fn discover(explicit: Option<&Path>) -> CliResult<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) if !p.is_empty() => Self::load(Path::new(&p)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn get<T>(&self, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        debug_assert!(KEYS.contains(&key), "unregistered key {key}");
        self.values
            .get(key)
            .map(|v| v.parse().map_err(|e| CliError::validation(format!("config key `{key}` = `{v}`: {e}"))))
            .transpose()
    }

    /// A path value, resolved against the config file's directory.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let raw = Path::new(self.values.get(key)?);
        Some(match &self.base_dir {
            Some(dir) if raw.is_relative() => dir.join(raw),
            _ => raw.to_path_buf(),
        })
    }

    /// `flag`, else the config value, else `default`.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    pub fn pick_path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.path(key))
    }
}
