//! Extended real values with `-inf` and `+inf` sentinels.
//!
//! Concave families of weights reach the value `-inf` on purpose (a curve
//! that is identically `-inf` past its critical value), so infinities are
//! first-class values here, not IEEE artifacts. Sums of infinities of mixed
//! sign are a reported error, never a silent NaN.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A real number extended by `-inf` and `+inf`, totally ordered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

pub use ExtReal::{Finite, NegInf, PosInf};

impl ExtReal {
    /// Wraps a float, mapping IEEE infinities to the sentinels. NaN is rejected.
    pub fn new(x: f64) -> Result<Self, Error> {
        if x.is_nan() {
            return Err(Error::InvalidValue("NaN is not an extended real".into()));
        }
        Ok(if x == f64::INFINITY {
            PosInf
        } else if x == f64::NEG_INFINITY {
            NegInf
        } else {
            Finite(x)
        })
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    /// Finite payload, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Collapses to an `f64`, using IEEE infinities for the sentinels.
    pub fn to_f64(self) -> f64 {
        match self {
            NegInf => f64::NEG_INFINITY,
            Finite(x) => x,
            PosInf => f64::INFINITY,
        }
    }

    /// Sum with the propagation rule `±inf + finite = ±inf`.
    /// `NegInf + PosInf` is an error.
    pub fn checked_add(self, other: ExtReal) -> Result<ExtReal, Error> {
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (NegInf, PosInf) | (PosInf, NegInf) => Err(Error::IndeterminateSum),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
        }
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let rank = |v: &ExtReal| match v {
            NegInf => 0u8,
            Finite(_) => 1,
            PosInf => 2,
        };
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (a, b) => rank(a).partial_cmp(&rank(b)),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            Finite(x) => write!(f, "{x}"),
            PosInf => write!(f, "inf"),
        }
    }
}

// JSON: finite values as numbers, sentinels as the strings "inf" / "-inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(x) => s.serialize_f64(*x),
            PosInf => s.serialize_str("inf"),
            NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Code(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => ExtReal::new(x).map_err(de::Error::custom),
            Raw::Code(s) => match s.as_str() {
                "inf" | "+inf" => Ok(PosInf),
                "-inf" => Ok(NegInf),
                other => Err(de::Error::custom(format!("unknown inf code {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_total() {
        assert!(NegInf < Finite(-1e300));
        assert!(Finite(1e300) < PosInf);
        assert!(NegInf < PosInf);
        assert!(Finite(1.0) < Finite(2.0));
    }

    #[test]
    fn addition_propagates_and_rejects_mixed_infinities() {
        assert_eq!(NegInf.checked_add(Finite(5.0)).unwrap(), NegInf);
        assert_eq!(PosInf.checked_add(Finite(-5.0)).unwrap(), PosInf);
        assert_eq!(Finite(2.0).checked_add(Finite(3.0)).unwrap(), Finite(5.0));
        assert!(NegInf.checked_add(PosInf).is_err());
        assert!(PosInf.checked_add(NegInf).is_err());
    }

    #[test]
    fn json_round_trip_uses_inf_codes() {
        let vals = vec![Finite(1.5), NegInf, PosInf];
        let text = serde_json::to_string(&vals).unwrap();
        assert_eq!(text, "[1.5,\"-inf\",\"inf\"]");
        let back: Vec<ExtReal> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vals);
    }

    #[test]
    fn nan_rejected() {
        assert!(ExtReal::new(f64::NAN).is_err());
    }
}
