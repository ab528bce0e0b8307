//! `key = value` configuration files. Command-line flags take precedence;
//! environment variables are never read.

use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Blank lines and lines starting with `#` are skipped. Keys may use
    /// `-` or `_` interchangeably.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", no + 1))?;
            let key = k.trim().replace('-', "_");
            if key.is_empty() {
                return Err(format!("line {}: empty key", no + 1));
            }
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(format!("line {}: duplicate key {key}", no + 1));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| format!("config key {key}: {e}")))
            .transpose()
    }

    /// Rejects keys outside `allowed`, so typos do not pass silently.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), String> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(format!("unknown config key {k}")),
            None => Ok(()),
        }
    }

    /// Flag value if given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String>
    where
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let c = Config::parse("# run\nn = 1024\nk=32\nnu = 1/2\n").unwrap();
        assert_eq!(c.pick(None, "n", 8usize).unwrap(), 1024);
        assert_eq!(c.pick(Some(64usize), "n", 8).unwrap(), 64);
        assert_eq!(c.pick(None, "seed", 7u64).unwrap(), 7);
        assert_eq!(c.get::<String>("nu").unwrap().as_deref(), Some("1/2"));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(Config::parse("n 4").is_err());
        assert!(Config::parse("n=1\nn=2").is_err());
        assert!(Config::parse("n=x").unwrap().get::<usize>("n").is_err());
        assert!(Config::parse("nn=1").unwrap().check_keys(&["n"]).is_err());
    }
}
