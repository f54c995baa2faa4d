//! Flat `key = value` configuration files.
//!
//! Blank lines are ignored and `#` starts a comment. Values are kept as
//! strings; callers parse them against their own key sets.

use std::collections::BTreeMap;
use std::path::Path;

use super::params::{ModelParams, PARAM_KEYS};
use super::ModelError;

/// Ordered key/value pairs read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ModelError::Config(format!(
                    "line {}: expected `key = value`, got `{}`",
                    lineno + 1,
                    raw.trim()
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(ModelError::Config(format!(
                    "line {}: empty key or value",
                    lineno + 1
                )));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ModelError::Config(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.insert(key.into(), value.into());
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Fails on the first key not in `allowed`.
    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<(), ModelError> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(ModelError::UnknownKey(k.clone())),
            None => Ok(()),
        }
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ModelError> {
        self.get(key)
            .map(|v| {
                v.parse::<f64>().map_err(|_| {
                    ModelError::Config(format!("key `{key}`: `{v}` is not a number"))
                })
            })
            .transpose()
    }
}

/// Parses a parameter file containing exactly the model keys.
///
/// Keys absent from the file keep their value in `base`.
pub fn parse_params(text: &str, base: ModelParams) -> Result<ModelParams, ModelError> {
    let kv = KeyValues::parse(text)?;
    kv.reject_unknown(&PARAM_KEYS)?;
    apply_params(&kv, base)
}

/// Overrides the model keys present in `kv`; other keys are ignored.
pub fn apply_params(kv: &KeyValues, mut base: ModelParams) -> Result<ModelParams, ModelError> {
    for key in PARAM_KEYS {
        if let Some(v) = kv.get_f64(key)? {
            base.set(key, v);
        }
    }
    Ok(base)
}

/// Renders parameters in the file format accepted by [`parse_params`].
pub fn format_params(params: &ModelParams) -> String {
    params
        .entries()
        .map(|(k, v)| format!("{k} = {v:e}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_scientific_notation() {
        let text = "# 1D test\nalpha0 = 0.01\nbeta0=0.5 # alignment\n\n  epsilon = 1e-4\nR = 2.5E-2\n";
        let p = parse_params(text, ModelParams::default()).unwrap();
        assert_eq!(p.alpha0, 0.01);
        assert_eq!(p.beta0, 0.5);
        assert_eq!(p.epsilon, 1e-4);
        assert_eq!(p.radius, 0.025);
        assert_eq!(p.gamma0, ModelParams::default().gamma0);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        let err = parse_params("lambda = 3\n", ModelParams::default()).unwrap_err();
        assert!(matches!(err, ModelError::UnknownKey(ref k) if k == "lambda"));
        assert!(parse_params("alpha0 0.1\n", ModelParams::default()).is_err());
        assert!(parse_params("alpha0 = x\n", ModelParams::default()).is_err());
        assert!(parse_params("nu = 0.1\nnu = 0.2\n", ModelParams::default()).is_err());
    }

    #[test]
    fn format_round_trips() {
        let p = ModelParams {
            alpha0: 0.0225,
            beta0: 0.5,
            gamma0: 0.5,
            nu: 0.8,
            mu: 0.5,
            eta: 0.05,
            radius: 0.3,
            epsilon: 1e-3,
            diffusion: 1e-3,
        };
        let back = parse_params(&format_params(&p), ModelParams::default()).unwrap();
        assert_eq!(back, p);
    }
}
