use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Penalty weight used for every party when none is given.
pub const DEFAULT_LAMBDA: f64 = 10.0;

/// Multiplier applied to the largest penalized loss when `C = "auto"`.
pub const AUTO_C_FACTOR: f64 = 1.1;

/// The positivity constant `C`: fixed, or resolved from the comparison group.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CSetting {
    #[default]
    Auto,
    Fixed(f64),
}

impl Serialize for CSetting {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CSetting::Auto => s.serialize_str("auto"),
            CSetting::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for CSetting {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(CSetting::Fixed(v)),
            Raw::Text(t) if t.eq_ignore_ascii_case("auto") => Ok(CSetting::Auto),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("C must be \"auto\" or a number, got {:?}", t))),
        }
    }
}

/// Concession thresholds, penalty weights and the positivity constant.
///
/// Empty `gamma_hat` means zero tolerance for every party; empty `lambda`
/// means [`DEFAULT_LAMBDA`] for every party.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConcessionConfig {
    #[serde(default)]
    pub gamma_hat: Vec<f64>,
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(rename = "C", default)]
    pub c: CSetting,
}

impl ConcessionConfig {
    pub fn new(gamma_hat: Vec<f64>, lambda: Vec<f64>, c: CSetting) -> Self {
        Self { gamma_hat, lambda, c }
    }

    /// Same thresholds for every party, default penalties, automatic `C`.
    pub fn uniform(num_parties: usize, gamma_hat: f64) -> Self {
        Self::new(vec![gamma_hat; num_parties], Vec::new(), CSetting::Auto)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fills defaults for `num_parties` parties and validates ranges.
    pub fn resolve(&self, num_parties: usize) -> Result<Self> {
        let gamma_hat = if self.gamma_hat.is_empty() { vec![0.0; num_parties] } else { self.gamma_hat.clone() };
        let lambda = if self.lambda.is_empty() { vec![DEFAULT_LAMBDA; num_parties] } else { self.lambda.clone() };
        if gamma_hat.len() != num_parties || lambda.len() != num_parties {
            return Err(Error::config(format!(
                "config has {} thresholds and {} penalty weights for {} parties",
                gamma_hat.len(),
                lambda.len(),
                num_parties
            )));
        }
        if let Some(g) = gamma_hat.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return Err(Error::config(format!("concession threshold {} is outside [0, 1]", g)));
        }
        if let Some(l) = lambda.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::config(format!("penalty weight {} must be positive", l)));
        }
        if let CSetting::Fixed(c) = self.c {
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::config(format!("C = {} must be positive", c)));
            }
        }
        Ok(Self { gamma_hat, lambda, c: self.c })
    }
}
