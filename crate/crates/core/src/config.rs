//! Run configuration: tolerances, scan bounds and sampling parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The norm-ratio constant is an input: either supplied, or estimated
/// from the enumerated words of the certified set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CEps {
    Estimate,
    Fixed(f64),
}

impl Serialize for CEps {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            CEps::Estimate => s.serialize_str("estimate"),
            CEps::Fixed(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for CEps {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let value = serde_json_value::Value::deserialize(d)?;
        match value {
            serde_json_value::Value::String(s) if s == "estimate" => Ok(CEps::Estimate),
            serde_json_value::Value::Number(n) => n
                .as_f64()
                .map(CEps::Fixed)
                .ok_or_else(|| D::Error::custom("c_eps must be a float")),
            _ => Err(D::Error::custom("c_eps must be a number or \"estimate\"")),
        }
    }
}

// Minimal value mirror so the core crate does not depend on serde_json.
mod serde_json_value {
    use serde::Deserialize;

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub enum Value {
        Number(Number),
        String(String),
        Other(()),
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub enum Number {
        F(f64),
        I(i64),
    }

    impl Number {
        pub fn as_f64(&self) -> Option<f64> {
            match self {
                Number::F(v) => Some(*v),
                Number::I(v) => Some(*v as f64),
            }
        }
    }
}

/// All knobs of a certification run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct RunConfig {
    /// Tolerance on `|det - 1|` at matrix construction.
    pub det_tol: f64,
    /// Log spectral-gap tolerance below which proximality is denied.
    pub gap_tol: f64,
    /// Margin below which the well-positioned test fails.
    pub pos_tol: f64,
    /// Smallest acceptable singular value in the transversality check.
    pub transv_tol: f64,
    pub c_eps: CEps,
    /// Word-length bound L for the norm and growth scans.
    pub max_word_length: usize,
    /// Iteration depth for limit maps.
    pub depth: usize,
    /// Monte-Carlo samples per epsilon-proximality condition.
    pub samples: u32,
    /// Sampled prefix pairs for the transversality check.
    pub pairs: u32,
    pub seed: u64,
    /// Upper bound of the power scan.
    pub n_max: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            det_tol: 1e-9,
            gap_tol: 1e-8,
            pos_tol: 1e-8,
            transv_tol: 1e-6,
            c_eps: CEps::Estimate,
            max_word_length: 6,
            depth: 10,
            samples: 200,
            pairs: 500,
            seed: 1,
            n_max: 4096,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("det_tol", self.det_tol),
            ("gap_tol", self.gap_tol),
            ("pos_tol", self.pos_tol),
            ("transv_tol", self.transv_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive")));
            }
        }
        if let CEps::Fixed(c) = self.c_eps {
            if !(0.0 < c && c < 1.0) {
                return Err(Error::InvalidConfig(
                    "c_eps must lie strictly between 0 and 1".into(),
                ));
            }
        }
        if self.max_word_length < 1 {
            return Err(Error::InvalidConfig(
                "max_word_length must be at least 1".into(),
            ));
        }
        if self.depth < 1 {
            return Err(Error::InvalidConfig("depth must be at least 1".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        Ok(())
    }

    pub fn sampling(&self) -> crate::schottky::SamplingParams {
        crate::schottky::SamplingParams {
            samples: self.samples,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn bad_c_eps_rejected() {
        let cfg = RunConfig {
            c_eps: CEps::Fixed(1.5),
            ..RunConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn c_eps_serde_roundtrip() {
        let est = RunConfig::default();
        let s = serde_json::to_string(&est).unwrap();
        assert!(s.contains("\"estimate\""));
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back.c_eps, CEps::Estimate);

        let fixed = RunConfig {
            c_eps: CEps::Fixed(0.5),
            ..RunConfig::default()
        };
        let s = serde_json::to_string(&fixed).unwrap();
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back.c_eps, CEps::Fixed(0.5));
    }
}
