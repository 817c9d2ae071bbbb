//! Name-keyed registries of strategy constructors.
//!
//! Learners, fusion strategies, search methods and energy functions are each
//! looked up by their config/CLI name and built as trait objects.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {family} `{name}` (expected one of: {})", known.join(", "))]
pub struct UnknownName {
    pub family: &'static str,
    pub name: String,
    pub known: Vec<&'static str>,
}

/// Maps names to constructors of type `F`, keeping registration order.
pub struct Registry<F> {
    family: &'static str,
    entries: Vec<(&'static str, F)>,
}

impl<F> Registry<F> {
    pub fn new(family: &'static str) -> Self {
        Registry {
            family,
            entries: Vec::new(),
        }
    }

    /// Registers `ctor` under `name`, replacing an earlier entry of that name.
    pub fn register(&mut self, name: &'static str, ctor: F) -> &mut Self {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(entry) => entry.1 = ctor,
            None => self.entries.push((name, ctor)),
        }
        self
    }

    pub fn with(mut self, name: &'static str, ctor: F) -> Self {
        self.register(name, ctor);
        self
    }

    pub fn get(&self, name: &str) -> Result<&F, UnknownName> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f)
            .ok_or_else(|| UnknownName {
                family: self.family,
                name: name.to_string(),
                known: self.names(),
            })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn family(&self) -> &'static str {
        self.family
    }
}

impl<F> fmt::Debug for Registry<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("family", &self.family)
            .field("names", &self.names())
            .finish()
    }
}

/// Numeric hyperparameters keyed by name, as written in a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, f64>);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("unknown hyperparameter `{key}` for {owner} (accepted: {})", accepted.join(", "))]
    Unknown {
        owner: String,
        key: String,
        accepted: Vec<&'static str>,
    },
    #[error("hyperparameter `{key}` = {value} is invalid: {reason}")]
    Invalid {
        key: String,
        value: f64,
        reason: String,
    },
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn set(mut self, key: &str, value: f64) -> Self {
        self.0.insert(key.to_string(), value);
        self
    }

    pub fn insert(&mut self, key: &str, value: f64) {
        self.0.insert(key.to_string(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Fails on any key outside `accepted`.
    pub fn check_keys(&self, owner: &str, accepted: &[&'static str]) -> Result<(), ParamError> {
        match self.0.keys().find(|k| !accepted.contains(&k.as_str())) {
            Some(key) => Err(ParamError::Unknown {
                owner: owner.to_string(),
                key: key.clone(),
                accepted: accepted.to_vec(),
            }),
            None => Ok(()),
        }
    }

    pub fn float(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    /// Integer-valued parameter with a lower bound; `None` when absent.
    pub fn integer(&self, key: &str, min: u64) -> Result<Option<u64>, ParamError> {
        let Some(value) = self.float(key) else {
            return Ok(None);
        };
        if !value.is_finite() || value.fract() != 0.0 || value < 0.0 || value > 2f64.powi(53) {
            return Err(ParamError::Invalid {
                key: key.to_string(),
                value,
                reason: "must be a non-negative integer".to_string(),
            });
        }
        if (value as u64) < min {
            return Err(ParamError::Invalid {
                key: key.to_string(),
                value,
                reason: format!("must be at least {min}"),
            });
        }
        Ok(Some(value as u64))
    }
}

impl FromIterator<(String, f64)> for Params {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        Params(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_reports_known_names() {
        let reg = Registry::new("widget").with("a", 1).with("b", 2);
        assert_eq!(*reg.get("b").unwrap(), 2);
        let err = reg.get("c").unwrap_err();
        assert_eq!(err.known, vec!["a", "b"]);
        assert!(err.to_string().contains("unknown widget `c`"));
    }

    #[test]
    fn register_replaces_in_place() {
        let mut reg = Registry::new("widget").with("a", 1).with("b", 2);
        reg.register("a", 3);
        assert_eq!(reg.names(), vec!["a", "b"]);
        assert_eq!(*reg.get("a").unwrap(), 3);
    }

    #[test]
    fn integer_params_are_checked() {
        let p = Params::new().set("k", 3.0).set("bad", 2.5).set("zero", 0.0);
        assert_eq!(p.integer("k", 1).unwrap(), Some(3));
        assert_eq!(p.integer("missing", 1).unwrap(), None);
        assert!(p.integer("bad", 1).is_err());
        assert!(p.integer("zero", 1).is_err());
        assert!(p.check_keys("knn", &["k"]).is_err());
    }
}
