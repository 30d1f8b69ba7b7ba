//! Simple `key = value` configuration files.
//!
//! Each command accepts `--config FILE` as an alternative to spelling
//! every flag on the command line. Keys use the long flag names with
//! underscores (`graphs_per_cell = 10`). Values use the same syntax as
//! the flag argument. Explicit command-line flags win over file values.

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("config key `{key}`: {message}")]
    BadValue { key: String, message: String },
    #[error("unknown config key `{key}` (valid keys: {valid})")]
    UnknownKey { key: String, valid: String },
}

/// Parsed file contents: a flat string-to-string map plus the order
/// keys appeared in (useful for error reporting).
#[derive(Debug, Default)]
pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: trimmed.to_string(),
                });
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(ConfigError::Malformed {
                    line,
                    text: trimmed.to_string(),
                });
            }
            if values.insert(key.clone(), value).is_some() {
                return Err(ConfigError::DuplicateKey { line, key });
            }
        }
        Ok(ConfigMap { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Reject keys that no flag of the current command recognises, so a
    /// typo in a config file fails loudly instead of being ignored.
    pub fn check_known(&self, valid: &[&str]) -> Result<(), ConfigError> {
        for key in self.values.keys() {
            if !valid.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    key: key.clone(),
                    valid: valid.join(", "),
                });
            }
        }
        Ok(())
    }

    /// Fetch and parse a value, with file values losing to an explicit
    /// flag (`flag` is `Some` only when given on the command line).
    pub fn resolve<T, F>(
        &self,
        flag: Option<T>,
        key: &str,
        parse: F,
    ) -> Result<Option<T>, ConfigError>
    where
        F: FnOnce(&str) -> Result<T, String>,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.get(key) {
            None => Ok(None),
            Some(text) => parse(text).map(Some).map_err(|message| ConfigError::BadValue {
                key: key.to_string(),
                message,
            }),
        }
    }
}
