//! Certainty factors and their parallel-combination algebra.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Error raised when a value outside `[-1, 1]` is offered as a certainty factor.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("certainty factor {0} is outside [-1, 1]")]
pub struct CfRangeError(pub String);

/// Confidence in a fact, in `[-1, 1]`. `0` means unknown.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CertaintyFactor<S>(S);

impl<S: Scalar> CertaintyFactor<S> {
    /// Full confirmation.
    pub fn certain() -> Self {
        Self(S::one())
    }

    /// No evidence either way; the value an `unknown` answer maps to.
    pub fn unknown() -> Self {
        Self(S::zero())
    }

    pub fn new(value: S) -> Result<Self, CfRangeError> {
        if value.is_nan() || value < -S::one() || value > S::one() {
            Err(CfRangeError(value.to_string()))
        } else {
            Ok(Self(value))
        }
    }

    /// Clamps into range; NaN becomes unknown.
    pub fn saturating(value: S) -> Self {
        if value.is_nan() {
            Self::unknown()
        } else {
            Self(value.max(-S::one()).min(S::one()))
        }
    }

    pub fn value(self) -> S {
        self.0
    }

    /// Combines two independent pieces of evidence for the same conclusion.
    pub fn combine(self, other: Self) -> Self {
        Self::saturating(combine_parallel(self.0, other.0))
    }

    /// Attenuates by a rule strength: `rule_cf * self`.
    pub fn attenuate(self, rule_cf: S) -> Self {
        Self::saturating(rule_cf * self.0)
    }

    pub fn negate(self) -> Self {
        Self(-self.0)
    }
}

impl<S: Scalar> fmt::Display for CertaintyFactor<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parallel combination of two certainty factors for the same hypothesis.
///
/// Both non-negative: `a + b(1 - a)`. Both non-positive: `-(combine(-a, -b))`.
/// Mixed signs: `(a + b) / (1 - min(|a|, |b|))`; the degenerate `(1, -1)`
/// pair has no defined value and yields `0`.
pub fn combine_parallel<S: Scalar>(a: S, b: S) -> S {
    let zero = S::zero();
    let one = S::one();
    if a >= zero && b >= zero {
        a + b * (one - a)
    } else if a <= zero && b <= zero {
        -((-a) + (-b) * (one + a))
    } else {
        let denom = one - a.abs().min(b.abs());
        if denom == zero {
            zero
        } else {
            (a + b) / denom
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_branch() {
        assert!((combine_parallel(0.6, 0.5) - 0.8f64).abs() < 1e-12);
    }

    #[test]
    fn zero_is_identity() {
        for x in [-1.0, -0.7, -0.1, 0.0, 0.3, 0.99, 1.0f64] {
            assert_eq!(combine_parallel(x, 0.0), x);
            assert_eq!(combine_parallel(0.0, x), x);
        }
    }

    #[test]
    fn mixed_signs() {
        let v: f64 = combine_parallel(0.8, -0.4);
        assert!((v - (0.8 - 0.4) / (1.0 - 0.4)).abs() < 1e-9);
        assert!((v - 0.666_666_666_7).abs() < 1e-9);
    }

    #[test]
    fn negative_branch_mirrors_positive() {
        let v: f64 = combine_parallel(-0.6, -0.5);
        assert!((v + 0.8).abs() < 1e-12);
    }

    #[test]
    fn opposite_certainties_cancel() {
        assert_eq!(combine_parallel(1.0f64, -1.0), 0.0);
    }

    #[test]
    fn works_for_f32() {
        let v: f32 = combine_parallel(0.6f32, 0.5f32);
        assert!((v - 0.8).abs() < 1e-6);
    }

    #[test]
    fn range_checks() {
        assert!(CertaintyFactor::new(1.2f64).is_err());
        assert!(CertaintyFactor::new(f64::NAN).is_err());
        assert_eq!(CertaintyFactor::saturating(-3.0f64).value(), -1.0);
        assert_eq!(CertaintyFactor::<f64>::unknown().value(), 0.0);
    }
}
