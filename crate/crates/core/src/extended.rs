use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative extended real: either a finite value or `+∞`.
///
/// Divergent norms and suprema are reported as [`Extended::Infinite`] rather
/// than as errors, so that membership probes can be expressed directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    /// Maps `+∞` (and NaN produced by `∞ - ∞`) onto [`Extended::Infinite`].
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            Extended::Finite(x)
        } else {
            Extended::Infinite
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(x) => x,
            Extended::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    pub fn max(self, other: Extended) -> Extended {
        Extended::from_f64(self.to_f64().max(other.to_f64()))
    }

    pub fn powf(self, e: f64) -> Extended {
        match self {
            Extended::Finite(x) => Extended::from_f64(x.powf(e)),
            Extended::Infinite if e > 0.0 => Extended::Infinite,
            Extended::Infinite => Extended::Finite(0.0),
        }
    }
}

/// Zero, the neutral element of [`Extended::max`] on nonnegative values.
impl Default for Extended {
    fn default() -> Self {
        Extended::Finite(0.0)
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => write!(f, "{x}"),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(x) => serializer.serialize_f64(*x),
            Extended::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Extended {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(x) => Ok(Extended::from_f64(x)),
            Raw::Text(t) if t == "inf" => Ok(Extended::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {t}"))),
        }
    }
}
