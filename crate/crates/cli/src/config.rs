//! Plain-text `key = value` run configuration. Values from the file replace
//! the built-in defaults; command-line flags replace both.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Keys a config file may set. Flag names double as keys.
pub const KEYS: &[&str] = &[
    "L",
    "J",
    "m",
    "phi",
    "U",
    "bc",
    "model",
    "init",
    "tmax",
    "samples",
    "res",
    "nk",
    "band",
    "space",
    "support-eps",
    "m-min",
    "m-max",
    "periodic-zeta",
    "vectors",
    "no-offset",
    "format",
];

/// Bad input on the command line or in a config file (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Default, Clone)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config `{}`: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut values = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected `key = value`, got `{raw}`", n + 1)))?;
            let key = key.trim().trim_start_matches("--");
            if !KEYS.contains(&key) {
                return Err(usage(format!("config line {}: unknown key `{key}`", n + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parses a value with `FromStr`, naming the key on failure.
    pub fn get<T: FromStr>(&self, key: &str) -> anyhow::Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.with(key, |s| s.parse::<T>().map_err(|e| e.to_string()))
    }

    /// Parses a value with a custom parser, naming the key on failure.
    pub fn with<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> anyhow::Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => parse(s).map(Some).map_err(|e| usage(format!("invalid value for `{key}` in config: {e}"))),
        }
    }
}

/// Flag, then config, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
