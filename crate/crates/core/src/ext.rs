//! Extended reals for the nonsmooth part.
//!
//! `+∞` is an explicit variant, never an overflowed `f64`. Sums follow the
//! convention `∞ - ∞ = ∞`.

use std::cmp::Ordering;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Maps `+∞` to `f64::INFINITY`. Only for output and plotting.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn add_f64(self, rhs: f64) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v + rhs),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    /// `self - rhs` as a plain float; `∞ - anything = ∞`, `finite - ∞ = -∞`.
    pub fn minus(self, rhs: ExtReal) -> f64 {
        match (self, rhs) {
            (ExtReal::PosInf, _) => f64::INFINITY,
            (ExtReal::Finite(_), ExtReal::PosInf) => f64::NEG_INFINITY,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a - b,
        }
    }
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &ExtReal) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::Finite(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs() {
        assert_eq!(ExtReal::PosInf + ExtReal::Finite(-1e300), ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.add_f64(f64::MAX), ExtReal::PosInf);
        assert_eq!(ExtReal::PosInf.minus(ExtReal::PosInf), f64::INFINITY);
        assert_eq!(ExtReal::Finite(1.0).minus(ExtReal::PosInf), f64::NEG_INFINITY);
    }

    #[test]
    fn ordering_places_infinity_last() {
        assert!(ExtReal::Finite(f64::MAX) < ExtReal::PosInf);
        assert!(ExtReal::Finite(-1.0) < ExtReal::Finite(0.0));
    }
}
