//! Points of the one-point compactification [0, ∞].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A parameter value in [0, ∞]: a non-negative finite real or the point at infinity.
///
/// Every finite value compares below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedParam {
    Finite(f64),
    Infinity,
}

impl ExtendedParam {
    /// Validated finite constructor.
    pub fn finite(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NotFinite {
                name: "param",
                value,
            });
        }
        if value < 0.0 {
            return Err(Error::Negative {
                name: "param",
                value,
            });
        }
        Ok(ExtendedParam::Finite(value))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedParam::Infinity)
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtendedParam::Finite(v) => Some(v),
            ExtendedParam::Infinity => None,
        }
    }

    /// The involution λ ↦ 1/λ with 0 and ∞ exchanged.
    pub fn reciprocal(self) -> Self {
        match self {
            ExtendedParam::Finite(v) if v == 0.0 => ExtendedParam::Infinity,
            ExtendedParam::Finite(v) => ExtendedParam::Finite(1.0 / v),
            ExtendedParam::Infinity => ExtendedParam::Finite(0.0),
        }
    }

    /// Total order on [0, ∞] (positions never hold NaN).
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedParam::Infinity, ExtendedParam::Infinity) => Ordering::Equal,
            (ExtendedParam::Infinity, _) => Ordering::Greater,
            (_, ExtendedParam::Infinity) => Ordering::Less,
            (ExtendedParam::Finite(a), ExtendedParam::Finite(b)) => a.total_cmp(b),
        }
    }

    /// Absolute closeness test; infinities only match each other.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match (self, other) {
            (ExtendedParam::Infinity, ExtendedParam::Infinity) => true,
            (ExtendedParam::Finite(a), ExtendedParam::Finite(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }
}

impl From<f64> for ExtendedParam {
    fn from(v: f64) -> Self {
        if v.is_infinite() && v > 0.0 {
            ExtendedParam::Infinity
        } else {
            ExtendedParam::Finite(v)
        }
    }
}

impl fmt::Display for ExtendedParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedParam::Finite(v) => write!(f, "{}", v),
            ExtendedParam::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtendedParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s.eq_ignore_ascii_case("infinity") || s == "∞" {
            return Ok(ExtendedParam::Infinity);
        }
        let v: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("not a parameter value: `{s}`")))?;
        ExtendedParam::finite(v)
    }
}

impl Serialize for ExtendedParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedParam::Finite(v) => serializer.serialize_f64(*v),
            ExtendedParam::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedParam {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        struct ParamVisitor;

        impl Visitor<'_> for ParamVisitor {
            type Value = ExtendedParam;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtendedParam, E> {
                ExtendedParam::finite(v).map_err(|e| E::custom(e.to_string()))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtendedParam, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtendedParam, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtendedParam, E> {
                v.parse().map_err(|e: Error| E::custom(e.to_string()))
            }
        }

        deserializer.deserialize_any(ParamVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinity_last() {
        let a = ExtendedParam::Finite(1e308);
        assert_eq!(a.total_cmp(&ExtendedParam::Infinity), Ordering::Less);
        assert_eq!(
            ExtendedParam::Infinity.total_cmp(&ExtendedParam::Infinity),
            Ordering::Equal
        );
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(ExtendedParam::finite(-1.0).is_err());
        assert!(ExtendedParam::finite(f64::NAN).is_err());
    }

    #[test]
    fn reciprocal_swaps_endpoints() {
        assert_eq!(
            ExtendedParam::Finite(0.0).reciprocal(),
            ExtendedParam::Infinity
        );
        assert_eq!(
            ExtendedParam::Infinity.reciprocal(),
            ExtendedParam::Finite(0.0)
        );
        assert_eq!(
            ExtendedParam::Finite(2.0).reciprocal(),
            ExtendedParam::Finite(0.5)
        );
    }

    #[test]
    fn parses_inf_spelling() {
        assert_eq!(
            "inf".parse::<ExtendedParam>().unwrap(),
            ExtendedParam::Infinity
        );
        assert_eq!(
            "2.5".parse::<ExtendedParam>().unwrap(),
            ExtendedParam::Finite(2.5)
        );
    }
}
