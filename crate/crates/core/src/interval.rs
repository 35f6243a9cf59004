//! Truth space of interval-valued degrees.
//!
//! A truth value is a closed sub-interval `[lo, hi]` of `[0, 1]`. Its midpoint
//! is read as the degree of truth and its width as the degree of uncertainty,
//! so `[0, 1]` is total ignorance and every width-0 interval is fully certain.
//!
//! Besides the regular intervals there is one distinguished value, the
//! contradiction sentinel `[ξ, ξ]`, produced by [`Algebra::k_aggregate`] when
//! two equally certain pieces of evidence disagree. All connectives propagate
//! the sentinel unchanged.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default magnitude of the contradiction sentinel.
pub const DEFAULT_XI: f64 = 1.0e6;

/// Default absolute tolerance for interval comparisons.
pub const DEFAULT_EPSILON: f64 = 1e-9;

/// Slack allowed on the `[0, 1]` bounds before a value counts as the sentinel.
const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval bounds out of order: [{lo}, {hi}]")]
    Unordered { lo: f64, hi: f64 },
    #[error("interval [{lo}, {hi}] is not inside [0, 1]")]
    OutOfRange { lo: f64, hi: f64 },
    #[error("sentinel not ordered")]
    SentinelNotOrdered,
}

/// An element of the truth space, or the contradiction sentinel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 2]", try_from = "[f64; 2]")]
pub struct TruthInterval {
    lo: f64,
    hi: f64,
}

impl TruthInterval {
    /// Total ignorance, `[0, 1]`.
    pub const UNKNOWN: TruthInterval = TruthInterval { lo: 0.0, hi: 1.0 };
    pub const TRUE: TruthInterval = TruthInterval { lo: 1.0, hi: 1.0 };
    pub const FALSE: TruthInterval = TruthInterval { lo: 0.0, hi: 0.0 };

    /// Builds a regular interval, rejecting bounds outside `[0, 1]` or `lo > hi`.
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 {
            return Err(IntervalError::OutOfRange { lo, hi });
        }
        if lo > hi {
            return Err(IntervalError::Unordered { lo, hi });
        }
        Ok(TruthInterval { lo, hi })
    }

    /// Width-0 interval `[v, v]`.
    pub fn exact(v: f64) -> Result<Self, IntervalError> {
        Self::new(v, v)
    }

    /// The contradiction sentinel `[xi, xi]`.
    pub fn contradiction(xi: f64) -> Self {
        TruthInterval { lo: xi, hi: xi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Degree of uncertainty.
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Degree of truth.
    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }

    pub fn is_contradiction(&self) -> bool {
        !(self.lo >= -BOUND_SLACK
            && self.hi <= 1.0 + BOUND_SLACK
            && self.lo <= self.hi + BOUND_SLACK)
    }

    pub fn is_regular(&self) -> bool {
        !self.is_contradiction()
    }

    /// Componentwise equality within `eps`.
    pub fn approx_eq(&self, other: &TruthInterval, eps: f64) -> bool {
        (self.lo - other.lo).abs() <= eps && (self.hi - other.hi).abs() <= eps
    }

    /// `true` when `other` lies inside `self` (within `eps`).
    pub fn contains(&self, other: &TruthInterval, eps: f64) -> bool {
        self.lo <= other.lo + eps && other.hi <= self.hi + eps
    }

    /// Product t-norm.
    pub fn and(self, other: TruthInterval) -> TruthInterval {
        if let Some(s) = sentinel_of(self, other) {
            return s;
        }
        TruthInterval {
            lo: self.lo * other.lo,
            hi: self.hi * other.hi,
        }
    }

    /// Probabilistic-sum t-conorm.
    pub fn or(self, other: TruthInterval) -> TruthInterval {
        if let Some(s) = sentinel_of(self, other) {
            return s;
        }
        TruthInterval {
            lo: self.lo + other.lo - self.lo * other.lo,
            hi: self.hi + other.hi - self.hi * other.hi,
        }
    }

    /// Classical negation `[1 - hi, 1 - lo]`.
    pub fn cneg(self) -> TruthInterval {
        if self.is_contradiction() {
            return self;
        }
        TruthInterval {
            lo: 1.0 - self.hi,
            hi: 1.0 - self.lo,
        }
    }

    /// Negation as failure `[1 - lo, 1 - lo]`.
    pub fn naf(self) -> TruthInterval {
        if self.is_contradiction() {
            return self;
        }
        TruthInterval {
            lo: 1.0 - self.lo,
            hi: 1.0 - self.lo,
        }
    }

    /// Largest componentwise difference, used for fixpoint convergence.
    pub fn max_abs_diff(&self, other: &TruthInterval) -> f64 {
        (self.lo - other.lo).abs().max((self.hi - other.hi).abs())
    }
}

fn sentinel_of(x: TruthInterval, y: TruthInterval) -> Option<TruthInterval> {
    if x.is_contradiction() {
        Some(x)
    } else if y.is_contradiction() {
        Some(y)
    } else {
        None
    }
}

impl fmt::Display for TruthInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

impl From<TruthInterval> for [f64; 2] {
    fn from(v: TruthInterval) -> Self {
        [v.lo, v.hi]
    }
}

impl TryFrom<[f64; 2]> for TruthInterval {
    type Error = IntervalError;

    fn try_from([lo, hi]: [f64; 2]) -> Result<Self, Self::Error> {
        // The sentinel round-trips through JSON as well.
        if lo == hi && !(0.0..=1.0).contains(&lo) {
            return Ok(TruthInterval::contradiction(lo));
        }
        TruthInterval::new(lo, hi)
    }
}

pub fn tnorm(x: TruthInterval, y: TruthInterval) -> TruthInterval {
    x.and(y)
}

pub fn tconorm(x: TruthInterval, y: TruthInterval) -> TruthInterval {
    x.or(y)
}

pub fn cneg(x: TruthInterval) -> TruthInterval {
    x.cneg()
}

pub fn naf(x: TruthInterval) -> TruthInterval {
    x.naf()
}

/// Which formula to use for the distance between two truth values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceVariant {
    /// `(|x.lo - y.lo| + |x.hi - y.hi|) / 2`, a metric.
    #[default]
    Corrected,
    /// `(|x.lo - x.hi| + |y.lo - y.hi|) / 2`; only looks at the two widths.
    PaperLiteral,
}

impl std::str::FromStr for DistanceVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corrected" => Ok(DistanceVariant::Corrected),
            "paper-literal" => Ok(DistanceVariant::PaperLiteral),
            other => Err(format!("unknown distance variant `{other}`")),
        }
    }
}

/// Tolerance and sentinel settings shared by the tolerance-aware operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Algebra {
    pub epsilon: f64,
    pub xi: f64,
}

impl Default for Algebra {
    fn default() -> Self {
        Algebra {
            epsilon: DEFAULT_EPSILON,
            xi: DEFAULT_XI,
        }
    }
}

impl Algebra {
    pub fn contradiction(&self) -> TruthInterval {
        TruthInterval::contradiction(self.xi)
    }

    /// Truth ordering: compares midpoints.
    pub fn truth_le(&self, x: TruthInterval, y: TruthInterval) -> Result<bool, IntervalError> {
        regular_pair(x, y)?;
        Ok(x.midpoint() <= y.midpoint() + self.epsilon)
    }

    /// Knowledge ordering: `x ≤ y` when `y` is at most as wide as `x`.
    pub fn knowledge_le(&self, x: TruthInterval, y: TruthInterval) -> Result<bool, IntervalError> {
        regular_pair(x, y)?;
        Ok(y.width() <= x.width() + self.epsilon)
    }

    /// Knowledge aggregation: the strictly narrower operand wins, equal
    /// operands pass through, equally wide but different operands contradict.
    pub fn k_aggregate(&self, x: TruthInterval, y: TruthInterval) -> TruthInterval {
        if let Some(s) = sentinel_of(x, y) {
            return s;
        }
        let (wx, wy) = (x.width(), y.width());
        if wx < wy - self.epsilon {
            x
        } else if wy < wx - self.epsilon {
            y
        } else if x.approx_eq(&y, self.epsilon) {
            x
        } else {
            self.contradiction()
        }
    }

    pub fn distance(
        &self,
        x: TruthInterval,
        y: TruthInterval,
        variant: DistanceVariant,
    ) -> Result<f64, IntervalError> {
        interval_distance(x, y, variant)
    }
}

fn regular_pair(x: TruthInterval, y: TruthInterval) -> Result<(), IntervalError> {
    if x.is_contradiction() || y.is_contradiction() {
        Err(IntervalError::SentinelNotOrdered)
    } else {
        Ok(())
    }
}

pub fn truth_le(x: TruthInterval, y: TruthInterval) -> Result<bool, IntervalError> {
    Algebra::default().truth_le(x, y)
}

pub fn knowledge_le(x: TruthInterval, y: TruthInterval) -> Result<bool, IntervalError> {
    Algebra::default().knowledge_le(x, y)
}

pub fn k_aggregate(x: TruthInterval, y: TruthInterval) -> TruthInterval {
    Algebra::default().k_aggregate(x, y)
}

pub fn interval_distance(
    x: TruthInterval,
    y: TruthInterval,
    variant: DistanceVariant,
) -> Result<f64, IntervalError> {
    regular_pair(x, y)?;
    Ok(match variant {
        DistanceVariant::Corrected => ((x.lo - y.lo).abs() + (x.hi - y.hi).abs()) / 2.0,
        DistanceVariant::PaperLiteral => ((x.lo - x.hi).abs() + (y.lo - y.hi).abs()) / 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> TruthInterval {
        TruthInterval::new(lo, hi).unwrap()
    }

    fn close(a: TruthInterval, b: TruthInterval) -> bool {
        a.approx_eq(&b, 1e-12)
    }

    #[test]
    fn construction_rejects_bad_bounds() {
        assert!(matches!(
            TruthInterval::new(0.6, 0.4),
            Err(IntervalError::Unordered { .. })
        ));
        assert!(matches!(
            TruthInterval::new(-0.1, 0.4),
            Err(IntervalError::OutOfRange { .. })
        ));
        assert!(matches!(
            TruthInterval::new(0.1, 1.2),
            Err(IntervalError::OutOfRange { .. })
        ));
        assert!(TruthInterval::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn truth_ordering() {
        assert!(truth_le(iv(0.2, 0.4), iv(0.1, 0.6)).unwrap());
        let x = iv(0.3, 0.8);
        assert!(truth_le(x, x).unwrap());
        assert!(!truth_le(iv(0.5, 0.9), iv(0.1, 0.3)).unwrap());
    }

    #[test]
    fn knowledge_ordering() {
        assert!(knowledge_le(iv(0.1, 0.9), iv(0.4, 0.5)).unwrap());
        for y in [iv(0.0, 1.0), iv(0.3, 0.3), iv(0.2, 0.7)] {
            assert!(knowledge_le(TruthInterval::UNKNOWN, y).unwrap());
        }
        assert!(!knowledge_le(iv(0.4, 0.5), iv(0.1, 0.9)).unwrap());
    }

    #[test]
    fn sentinel_is_not_ordered() {
        let s = TruthInterval::contradiction(DEFAULT_XI);
        assert_eq!(
            truth_le(s, iv(0.0, 1.0)),
            Err(IntervalError::SentinelNotOrdered)
        );
        assert_eq!(
            knowledge_le(iv(0.0, 1.0), s),
            Err(IntervalError::SentinelNotOrdered)
        );
        assert!(interval_distance(s, s, DistanceVariant::Corrected).is_err());
    }

    #[test]
    fn tnorm_examples() {
        assert!(close(tnorm(iv(0.5, 0.8), iv(0.5, 1.0)), iv(0.25, 0.8)));
        let x = iv(0.3, 0.7);
        assert!(close(tnorm(x, TruthInterval::TRUE), x));
        assert!(close(tnorm(x, TruthInterval::FALSE), TruthInterval::FALSE));
    }

    #[test]
    fn tconorm_examples() {
        assert!(close(tconorm(iv(0.5, 0.8), iv(0.5, 1.0)), iv(0.75, 1.0)));
        let x = iv(0.3, 0.7);
        assert!(close(tconorm(x, TruthInterval::FALSE), x));
        assert!(close(tconorm(x, TruthInterval::TRUE), TruthInterval::TRUE));
    }

    #[test]
    fn negations() {
        assert!(close(cneg(iv(0.3, 0.7)), iv(0.3, 0.7)));
        assert!(close(cneg(TruthInterval::TRUE), TruthInterval::FALSE));
        let x = iv(0.15, 0.4);
        assert!(close(cneg(cneg(x)), x));

        assert!(close(naf(TruthInterval::UNKNOWN), TruthInterval::TRUE));
        assert!(close(naf(TruthInterval::TRUE), TruthInterval::FALSE));
        assert!(close(naf(iv(0.3, 0.7)), iv(0.7, 0.7)));
    }

    #[test]
    fn connectives_propagate_sentinel() {
        let s = TruthInterval::contradiction(DEFAULT_XI);
        let x = iv(0.0, 0.0);
        for v in [
            tnorm(s, x),
            tnorm(x, s),
            tconorm(s, x),
            cneg(s),
            naf(s),
            k_aggregate(s, x),
        ] {
            assert!(v.is_contradiction());
        }
    }

    #[test]
    fn k_aggregate_examples() {
        assert_eq!(k_aggregate(iv(0.8, 0.9), iv(0.1, 0.5)), iv(0.8, 0.9));
        let x = iv(0.2, 0.4);
        assert_eq!(k_aggregate(x, x), x);
        let c = k_aggregate(TruthInterval::TRUE, TruthInterval::FALSE);
        assert_eq!(c, TruthInterval::contradiction(DEFAULT_XI));
    }

    #[test]
    fn k_aggregate_uses_configured_xi() {
        let alg = Algebra {
            epsilon: 1e-9,
            xi: -42.0,
        };
        let c = alg.k_aggregate(TruthInterval::TRUE, TruthInterval::FALSE);
        assert_eq!((c.lo(), c.hi()), (-42.0, -42.0));
        assert!(c.is_contradiction());
    }

    #[test]
    fn distances() {
        let x = iv(0.2, 0.6);
        assert_eq!(
            interval_distance(x, x, DistanceVariant::Corrected).unwrap(),
            0.0
        );
        assert_eq!(
            interval_distance(
                TruthInterval::FALSE,
                TruthInterval::TRUE,
                DistanceVariant::Corrected
            )
            .unwrap(),
            1.0
        );
        // The literal formula only sees widths: (0.4 + 0.4) / 2.
        let d = interval_distance(x, x, DistanceVariant::PaperLiteral).unwrap();
        assert!((d - 0.4).abs() < 1e-12);
    }

    #[test]
    fn json_is_two_element_array() {
        let x = iv(0.7, 0.9);
        assert_eq!(serde_json::to_string(&x).unwrap(), "[0.7,0.9]");
        let back: TruthInterval = serde_json::from_str("[0.7,0.9]").unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<TruthInterval>("[0.9,0.7]").is_err());
        let s: TruthInterval = serde_json::from_str("[1000000.0,1000000.0]").unwrap();
        assert!(s.is_contradiction());
    }
}
