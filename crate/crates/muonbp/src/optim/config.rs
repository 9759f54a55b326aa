use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::sharding::ShardLayout;
use crate::tensor::{newton_schulz, orth_exact, Matrix, NsConfig};

/// Number of steps between consecutive full-orthogonalization steps.
/// `Finite(1)` is Muon, `Infinite` is BlockMuon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Period {
    Finite(u64),
    Infinite,
}

impl Period {
    /// Full steps happen at `t = 0, P, 2P, ...`; an infinite period
    /// never communicates.
    pub fn is_full_step(&self, t: u64) -> bool {
        match self {
            Period::Finite(p) => t % p == 0,
            Period::Infinite => false,
        }
    }

    pub fn finite(&self) -> Option<u64> {
        match self {
            Period::Finite(p) => Some(*p),
            Period::Infinite => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if matches!(self, Period::Finite(0)) {
            return Err(Error::InvalidConfig("period must be at least 1".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::Finite(p) => write!(f, "{p}"),
            Period::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Period {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s == "inf" || s == "infinite" {
            return Ok(Period::Infinite);
        }
        let p: u64 = s.parse().map_err(|e| format!("bad period '{s}': {e}"))?;
        if p == 0 {
            return Err("period must be at least 1".into());
        }
        Ok(Period::Finite(p))
    }
}

// Serialized as an integer when finite and the string "inf" otherwise.
impl Serialize for Period {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Period::Finite(p) => serializer.serialize_u64(*p),
            Period::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;
        impl de::Visitor<'_> for Visitor {
            type Value = Period;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "a positive integer or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Period, E> {
                if v == 0 {
                    return Err(E::custom("period must be at least 1"));
                }
                Ok(Period::Finite(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Period, E> {
                if v <= 0 {
                    return Err(E::custom("period must be at least 1"));
                }
                Ok(Period::Finite(v as u64))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Period, E> {
                if v.is_infinite() && v > 0.0 {
                    Ok(Period::Infinite)
                } else {
                    Err(E::custom("non-integer period must be inf"))
                }
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Period, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(Visitor)
    }
}

/// Which orthogonalizer backs the trust-region step: the exact polar
/// factor (SVD) for lemma and bound verification, or Newton-Schulz for
/// realism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthBackend {
    Exact,
    NewtonSchulz,
}

impl fmt::Display for OrthBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrthBackend::Exact => write!(f, "exact"),
            OrthBackend::NewtonSchulz => write!(f, "newton_schulz"),
        }
    }
}

impl FromStr for OrthBackend {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "exact" => Ok(OrthBackend::Exact),
            "newton_schulz" | "ns" => Ok(OrthBackend::NewtonSchulz),
            other => Err(format!("unrecognized orthogonalizer backend '{other}'")),
        }
    }
}

/// A concrete orthogonalization routine built from the backend choice
/// and Newton-Schulz settings.
#[derive(Debug, Clone, Copy)]
pub enum Orthogonalizer {
    Exact,
    NewtonSchulz(NsConfig),
}

impl Orthogonalizer {
    /// Polar factor (exact or approximate) of a finite matrix.
    pub fn apply(&self, m: &Matrix) -> Matrix {
        match self {
            Orthogonalizer::Exact => {
                orth_exact(m).expect("orthogonalizer requires finite input")
            }
            Orthogonalizer::NewtonSchulz(cfg) => newton_schulz(m, cfg),
        }
    }
}

/// Full MuonBP configuration. `period = 1` reduces the algorithm to
/// Muon and `period = inf` to BlockMuon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Momentum coefficient in `[0, 1)`.
    pub momentum: f64,
    /// Stepsize for full-orthogonalization steps.
    pub eta_full: f64,
    /// Stepsize for shard-local steps.
    pub eta_block: f64,
    pub period: Period,
    pub ns: NsConfig,
    /// RMS learning-rate transfer coefficient; `None` disables the
    /// `beta * sqrt(max(m, n))` update scaling.
    pub rms_beta: Option<f64>,
    pub layout: ShardLayout,
    pub backend: OrthBackend,
    /// Decoupled weight decay applied after the step; not part of the
    /// analyzed recursion.
    pub weight_decay: Option<f64>,
}

impl OptimizerConfig {
    /// Sensible starting point: exact polar factor, no RMS transfer, no
    /// decay.
    pub fn new(eta_full: f64, eta_block: f64, period: Period, layout: ShardLayout) -> Self {
        Self {
            momentum: 0.0,
            eta_full,
            eta_block,
            period,
            ns: NsConfig::default(),
            rms_beta: None,
            layout,
            backend: OrthBackend::Exact,
            weight_decay: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig(format!(
                "momentum must be in [0, 1), got {}",
                self.momentum
            )));
        }
        if !(self.eta_full > 0.0) || !(self.eta_block > 0.0) {
            return Err(Error::InvalidConfig(
                "stepsizes must be positive".into(),
            ));
        }
        self.period.validate()?;
        self.ns.validate()?;
        if let Some(beta) = self.rms_beta {
            if !(beta >= 0.0) {
                return Err(Error::InvalidConfig(
                    "rms_beta must be nonnegative".into(),
                ));
            }
        }
        self.layout.validate()?;
        Ok(())
    }

    pub fn orthogonalizer(&self) -> Orthogonalizer {
        match self.backend {
            OrthBackend::Exact => Orthogonalizer::Exact,
            OrthBackend::NewtonSchulz => Orthogonalizer::NewtonSchulz(self.ns),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_schedule() {
        let p = Period::Finite(5);
        let fulls: Vec<u64> = (0..20).filter(|&t| p.is_full_step(t)).collect();
        assert_eq!(fulls, vec![0, 5, 10, 15]);
        assert!(!Period::Infinite.is_full_step(0));
        assert!(Period::Finite(1).is_full_step(7));
    }

    #[test]
    fn period_serde_forms() {
        assert_eq!(serde_json::to_string(&Period::Finite(5)).unwrap(), "5");
        assert_eq!(
            serde_json::to_string(&Period::Infinite).unwrap(),
            "\"inf\""
        );
        assert_eq!(
            serde_json::from_str::<Period>("\"inf\"").unwrap(),
            Period::Infinite
        );
        assert_eq!(
            serde_json::from_str::<Period>("7").unwrap(),
            Period::Finite(7)
        );
        assert!(serde_json::from_str::<Period>("0").is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = OptimizerConfig::new(0.1, 0.1, Period::Finite(5), ShardLayout::Grid(2, 2));
        cfg.validate().unwrap();
        cfg.momentum = 1.0;
        assert!(cfg.validate().is_err());
        cfg.momentum = 0.9;
        cfg.eta_block = 0.0;
        assert!(cfg.validate().is_err());
    }
}
