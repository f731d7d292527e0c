use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{0}` is not bound")]
    Missing(String),
    #[error("parameter `{name}` = {value} is invalid: {reason}")]
    Invalid {
        name: String,
        value: f64,
        reason: &'static str,
    },
    #[error("`{0}` is reserved and cannot be used as a parameter name")]
    Reserved(String),
}

/// Named real parameters.
///
/// `kappa0` and `hbar` default to 1. `omega` is derived as `sqrt(k/m)` unless
/// bound explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParamSet {
    values: BTreeMap<String, f64>,
}

impl Default for ParamSet {
    fn default() -> Self {
        Self::new()
    }
}

const RESERVED: [&str; 7] = ["q", "p", "t", "i", "sin", "cos", "exp"];

impl ParamSet {
    pub fn new() -> Self {
        let mut values = BTreeMap::new();
        values.insert("kappa0".to_string(), 1.0);
        values.insert("hbar".to_string(), 1.0);
        ParamSet { values }
    }

    /// A set with no defaults at all.
    pub fn empty() -> Self {
        ParamSet {
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ParamError> {
        if RESERVED.contains(&name) {
            return Err(ParamError::Reserved(name.to_string()));
        }
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// Value used during evaluation: explicit binding or a derived quantity.
    pub fn lookup(&self, name: &str) -> Option<f64> {
        match self.values.get(name) {
            Some(v) => Some(*v),
            None if name == "omega" => self.omega().ok(),
            None => None,
        }
    }

    pub fn require(&self, name: &str) -> Result<f64, ParamError> {
        self.lookup(name)
            .ok_or_else(|| ParamError::Missing(name.to_string()))
    }

    pub fn kappa0(&self) -> f64 {
        self.get("kappa0").unwrap_or(1.0)
    }

    pub fn hbar(&self) -> f64 {
        self.get("hbar").unwrap_or(1.0)
    }

    pub fn omega(&self) -> Result<f64, ParamError> {
        if let Some(w) = self.values.get("omega") {
            return Ok(*w);
        }
        let k = self.require("k")?;
        let m = self.require("m")?;
        Ok((k / m).sqrt())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Overlays `other` on top of `self`.
    pub fn merged(&self, other: &ParamSet) -> ParamSet {
        let mut out = self.clone();
        for (k, v) in other.iter() {
            out.values.insert(k.to_string(), v);
        }
        out
    }

    /// Checks the reserved physical parameters that are present.
    pub fn validate(&self) -> Result<(), ParamError> {
        let invalid = |name: &str, value: f64, reason| ParamError::Invalid {
            name: name.to_string(),
            value,
            reason,
        };
        for (name, value) in self.iter() {
            if !value.is_finite() {
                return Err(invalid(name, value, "must be finite"));
            }
            match name {
                "kappa0" | "m" | "hbar" if value <= 0.0 => {
                    return Err(invalid(name, value, "must be positive"))
                }
                "k" if value < 0.0 => return Err(invalid(name, value, "must be non-negative")),
                "n" if value < 1.0 || value.fract() != 0.0 => {
                    return Err(invalid(name, value, "must be a positive integer"))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_derived_omega() {
        let p = ParamSet::new().with("m", 2.0).with("k", 8.0);
        assert_eq!(p.kappa0(), 1.0);
        assert_eq!(p.hbar(), 1.0);
        assert_eq!(p.lookup("omega"), Some(2.0));
        assert!(ParamSet::new().lookup("omega").is_none());
    }

    #[test]
    fn validation() {
        assert!(ParamSet::new().with("m", 1.0).validate().is_ok());
        assert!(ParamSet::new().with("m", 0.0).validate().is_err());
        assert!(ParamSet::new().with("kappa0", -1.0).validate().is_err());
        assert!(ParamSet::new().with("k", -0.5).validate().is_err());
        assert!(ParamSet::new().with("n", 1.5).validate().is_err());
        assert!(ParamSet::new().with("n", 2.0).validate().is_ok());
        assert!(ParamSet::new().set("q", 1.0).is_err());
    }
}
