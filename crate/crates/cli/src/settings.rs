//! Plain `key=value` configuration files. Keys are the long flag names
//! (`t-end` or `t_end`); blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default)]
pub struct FileConfig {
    entries: BTreeMap<String, (usize, String)>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(format!("line {}: expected key=value, got '{line}'", i + 1));
            };
            let key = k.trim().replace('_', "-");
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(format!("line {}: duplicate key '{key}'", i + 1));
            }
        }
        Ok(Self { entries })
    }

    /// Removes `key` and parses its value.
    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| format!("line {line}: bad value '{v}' for '{key}': {e}")),
        }
    }

    /// Fails if any key was not consumed.
    pub fn finish(self) -> Result<(), String> {
        match self.entries.into_iter().next() {
            None => Ok(()),
            Some((k, (line, _))) => Err(format!("line {line}: unknown key '{k}'")),
        }
    }
}

/// `opt` if set, else the file value.
pub fn merge<T: FromStr>(opt: &mut Option<T>, file: &mut FileConfig, key: &str) -> Result<(), String>
where
    T::Err: std::fmt::Display,
{
    let from_file = file.take(key)?;
    if opt.is_none() {
        *opt = from_file;
    }
    Ok(())
}
