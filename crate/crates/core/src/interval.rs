//! Closed real intervals and the symmetric neutral intervals `[-ε, ε]`.
//!
//! Arithmetic follows set semantics: `a + b`, `a - b`, `-a` and `λ·a` are the
//! images of the corresponding real operations over every point of the
//! operands. Degenerate intervals (`lower == upper`) stand for crisp values.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default absolute tolerance for bound-wise comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A closed interval `[lower, upper]` with finite bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if lower.is_finite() && upper.is_finite() && lower <= upper {
            Ok(Self { lower, upper })
        } else {
            Err(Error::InvalidInterval { lower, upper })
        }
    }

    /// The degenerate interval `[x, x]`.
    ///
    /// # Panics
    /// If `x` is not finite.
    pub fn point(x: f64) -> Self {
        assert!(x.is_finite(), "interval bounds must be finite");
        Self { lower: x, upper: x }
    }

    /// `[center - halfwidth, center + halfwidth]`.
    pub fn around(center: f64, halfwidth: f64) -> Result<Self> {
        Self::new(center - halfwidth, center + halfwidth)
    }

    /// Bounds are trusted to be ordered and finite; only used where the
    /// arithmetic guarantees it.
    pub(crate) fn from_bounds_unchecked(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "[{lower}, {upper}]");
        Self { lower, upper }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        (self.lower + self.upper) / 2.0
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    /// Whether the interval is symmetric around zero, i.e. a member of the
    /// neutral set.
    pub fn is_neutral(&self, tol: f64) -> bool {
        (self.lower + self.upper).abs() <= tol
    }

    /// The lattice order `≤₀`: both bounds compare.
    pub fn leq0(&self, other: &Interval) -> bool {
        self.lower <= other.lower && self.upper <= other.upper
    }

    /// `≤₀` with an absolute slack on both bounds.
    pub fn leq0_tol(&self, other: &Interval, tol: f64) -> bool {
        self.lower <= other.lower + tol && self.upper <= other.upper + tol
    }

    pub fn scale(&self, lambda: f64) -> Interval {
        let (a, b) = (lambda * self.lower, lambda * self.upper);
        if lambda >= 0.0 {
            Self::from_bounds_unchecked(a, b)
        } else {
            Self::from_bounds_unchecked(b, a)
        }
    }

    /// Largest absolute bound difference.
    pub fn distance(&self, other: &Interval) -> f64 {
        (self.lower - other.lower)
            .abs()
            .max((self.upper - other.upper).abs())
    }

    pub fn approx_eq(&self, other: &Interval, tol: f64) -> bool {
        self.distance(other) <= tol
    }
}

impl Add for Interval {
    type Output = Interval;

    fn add(self, rhs: Interval) -> Interval {
        Interval::from_bounds_unchecked(self.lower + rhs.lower, self.upper + rhs.upper)
    }
}

impl Neg for Interval {
    type Output = Interval;

    fn neg(self) -> Interval {
        Interval::from_bounds_unchecked(-self.upper, -self.lower)
    }
}

impl Sub for Interval {
    type Output = Interval;

    fn sub(self, rhs: Interval) -> Interval {
        Interval::from_bounds_unchecked(self.lower - rhs.upper, self.upper - rhs.lower)
    }
}

impl Mul<Interval> for f64 {
    type Output = Interval;

    fn mul(self, rhs: Interval) -> Interval {
        rhs.scale(self)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(p) => write!(f, "[{:.*}, {:.*}]", p, self.lower, p, self.upper),
            None => write!(f, "[{}, {}]", self.lower, self.upper),
        }
    }
}

/// The symmetric interval `[-epsilon, epsilon]`, generalizing zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeutralElement {
    epsilon: f64,
}

impl NeutralElement {
    pub const ZERO: NeutralElement = NeutralElement { epsilon: 0.0 };

    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon >= 0.0 {
            Ok(Self { epsilon })
        } else {
            Err(Error::InvalidNeutral(epsilon))
        }
    }

    /// Half-width; the same quantity the repair models call alpha.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn length(&self) -> f64 {
        2.0 * self.epsilon
    }

    pub fn as_interval(&self) -> Interval {
        Interval::from_bounds_unchecked(-self.epsilon, self.epsilon)
    }
}

impl From<NeutralElement> for Interval {
    fn from(u: NeutralElement) -> Interval {
        u.as_interval()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(l: f64, u: f64) -> Interval {
        Interval::new(l, u).unwrap()
    }

    #[test]
    fn addition() {
        assert_eq!(iv(4.0, 6.0) + iv(1.0, 3.0), iv(5.0, 9.0));
        assert_eq!(iv(0.0, 0.0) + iv(2.0, 4.0), iv(2.0, 4.0));
        let s = iv(3.833, 6.166) + iv(0.833, 3.166);
        assert!(s.approx_eq(&iv(4.666, 9.332), 1e-12));
    }

    #[test]
    fn negation_and_subtraction() {
        assert_eq!(-iv(4.0, 6.0), iv(-6.0, -4.0));
        assert_eq!(-iv(0.0, 0.0), iv(0.0, 0.0));
        assert_eq!(-iv(-1.0, 1.0), iv(-1.0, 1.0));
        assert_eq!(iv(9.0, 11.0) - iv(4.0, 6.0), iv(3.0, 7.0));
        let z = iv(2.0, 4.0);
        assert_eq!(z - z, iv(-2.0, 2.0));
        assert_eq!(iv(5.0, 5.0) - iv(5.0, 5.0), iv(0.0, 0.0));
    }

    #[test]
    fn scalar_multiplication_uses_set_image() {
        assert!((0.1 * iv(9.0, 11.0)).approx_eq(&iv(0.9, 1.1), 1e-12));
        assert_eq!(0.0 * iv(3.0, 7.0), iv(0.0, 0.0));
        assert_eq!(-2.0 * iv(1.0, 3.0), iv(-6.0, -2.0));
    }

    #[test]
    fn partial_order() {
        assert!(iv(0.2, 0.4).leq0(&iv(0.4, 0.6)));
        assert!(!iv(0.0, 3.0).leq0(&iv(1.0, 2.0)));
        assert!(!iv(1.0, 2.0).leq0(&iv(0.0, 3.0)));
        let z = iv(-3.0, 8.5);
        assert!(z.leq0(&z));
    }

    #[test]
    fn length_midpoint_neutral() {
        assert_eq!(iv(4.0, 6.0).length(), 2.0);
        assert_eq!(iv(0.0, 0.0).length(), 0.0);
        assert_eq!(iv(2.0, 5.0).length(), 3.0);
        assert_eq!(iv(4.0, 6.0).midpoint(), 5.0);
        assert_eq!(iv(-1.0, 1.0).midpoint(), 0.0);
        assert_eq!(iv(2.0, 5.0).midpoint(), 3.5);
        assert!(iv(-1.0, 1.0).is_neutral(1e-9));
        assert!(!iv(0.0, 2.0).is_neutral(1e-9));
        assert!(iv(-7.0 / 6.0, 7.0 / 6.0).is_neutral(1e-9));
    }

    #[test]
    fn rejects_invalid_bounds() {
        assert!(matches!(
            Interval::new(6.0, 4.0),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(Interval::new(f64::NAN, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(NeutralElement::new(-0.5).is_err());
        assert_eq!(
            NeutralElement::new(1.0).unwrap().as_interval(),
            iv(-1.0, 1.0)
        );
    }

    fn interval() -> impl Strategy<Value = Interval> {
        (-100.0..100.0f64, 0.0..50.0f64).prop_map(|(l, w)| iv(l, l + w))
    }

    proptest! {
        #[test]
        fn add_commutes_and_associates(a in interval(), b in interval(), c in interval()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert!(((a + b) + c).approx_eq(&(a + (b + c)), 1e-12));
        }

        #[test]
        fn self_difference_is_neutral(a in interval()) {
            let d = a - a;
            prop_assert!(d.approx_eq(&iv(-a.length(), a.length()), 1e-12));
            prop_assert!(d.is_neutral(1e-12));
            prop_assert_eq!(a - a, a + (-a));
        }

        #[test]
        fn scaling_distributes(lambda in -10.0..10.0f64, a in interval(), b in interval()) {
            let lhs = (a + b).scale(lambda);
            let rhs = a.scale(lambda) + b.scale(lambda);
            prop_assert!(lhs.approx_eq(&rhs, 1e-9));
        }

        #[test]
        fn lengths_add_and_scale(lambda in -10.0..10.0f64, a in interval(), b in interval()) {
            prop_assert!(((a + b).length() - (a.length() + b.length())).abs() <= 1e-12);
            prop_assert!((a.scale(lambda).length() - lambda.abs() * a.length()).abs() <= 1e-9);
        }

        #[test]
        fn leq0_is_a_partial_order(a in interval(), b in interval(), c in interval()) {
            prop_assert!(a.leq0(&a));
            if a.leq0(&b) && b.leq0(&a) {
                prop_assert_eq!(a, b);
            }
            if a.leq0(&b) && b.leq0(&c) {
                prop_assert!(a.leq0(&c));
            }
        }
    }
}
