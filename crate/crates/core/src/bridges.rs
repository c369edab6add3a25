//! Transforms between IPRs and classical preference relations.
//!
//! Additive fuzzy relations map through `f(y) = y - 1/2`, Saaty's
//! multiplicative relations through `f(a) = log₉ a`. Both maps are monotone,
//! so interval-valued relations are transformed bound by bound. A crisp
//! relation is classically consistent iff its image is an IPR consistent with
//! respect to `[0, 0]`.

use crate::error::{Error, Result};
use crate::interval::{Interval, NeutralElement};
use crate::ipr;
use crate::matrix::IntervalMatrix;

const SAATY_MIN: f64 = 1.0 / 9.0;
const SAATY_MAX: f64 = 9.0;

/// Fuzzy preference relation with every bound in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRelation {
    entries: IntervalMatrix,
}

impl FuzzyRelation {
    pub fn new(entries: IntervalMatrix) -> Result<Self> {
        for e in entries.entries() {
            for b in [e.lower(), e.upper()] {
                if !(0.0..=1.0).contains(&b) {
                    return Err(Error::OutOfDomain {
                        value: b,
                        domain: "[0, 1]",
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &IntervalMatrix {
        &self.entries
    }

    /// Direct check of `y_ij + 1/2 = y_ik + y_kj` on both bounds.
    pub fn is_additively_consistent(&self, tol: f64) -> bool {
        let y = &self.entries;
        let n = y.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let (a, b, c) = (y.get(i, j), y.get(i, k), y.get(k, j));
                    (a.lower() + 0.5 - b.lower() - c.lower()).abs() <= tol
                        && (a.upper() + 0.5 - b.upper() - c.upper()).abs() <= tol
                })
            })
        })
    }
}

/// Which bounds a Saaty relation may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SaatyDomain {
    /// The conventional `[1/9, 9]` range.
    #[default]
    Conventional,
    /// Any strictly positive bound.
    AnyPositive,
}

impl SaatyDomain {
    fn admits(self, a: f64) -> bool {
        match self {
            // Rounding slack so that 9^-1 still counts as 1/9.
            SaatyDomain::Conventional => {
                (SAATY_MIN * (1.0 - 1e-12)..=SAATY_MAX * (1.0 + 1e-12)).contains(&a)
            }
            SaatyDomain::AnyPositive => a > 0.0 && a.is_finite(),
        }
    }

    fn describe(self) -> &'static str {
        match self {
            SaatyDomain::Conventional => "[1/9, 9]",
            SaatyDomain::AnyPositive => "(0, inf)",
        }
    }
}

/// Multiplicative preference relation with positive bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct SaatyRelation {
    entries: IntervalMatrix,
}

impl SaatyRelation {
    /// Enforces the conventional `[1/9, 9]` range.
    pub fn new(entries: IntervalMatrix) -> Result<Self> {
        Self::with_domain(entries, SaatyDomain::Conventional)
    }

    pub fn with_domain(entries: IntervalMatrix, domain: SaatyDomain) -> Result<Self> {
        for e in entries.entries() {
            for b in [e.lower(), e.upper()] {
                if !domain.admits(b) {
                    return Err(Error::OutOfDomain {
                        value: b,
                        domain: domain.describe(),
                    });
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &IntervalMatrix {
        &self.entries
    }

    /// Direct check of `a_ij = a_ik · a_kj` on both bounds.
    pub fn is_multiplicatively_consistent(&self, tol: f64) -> bool {
        let a = &self.entries;
        let n = a.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| {
                    let (x, y, z) = (a.get(i, j), a.get(i, k), a.get(k, j));
                    (x.lower() - y.lower() * z.lower()).abs() <= tol
                        && (x.upper() - y.upper() * z.upper()).abs() <= tol
                })
            })
        })
    }
}

fn map_bounds(z: &IntervalMatrix, f: impl Fn(f64) -> f64) -> Result<IntervalMatrix> {
    z.try_map(|e| Interval::new(f(e.lower()), f(e.upper())))
}

pub fn from_fuzzy(y: &FuzzyRelation) -> IntervalMatrix {
    map_bounds(&y.entries, |b| b - 0.5).expect("shift preserves bound order")
}

pub fn to_fuzzy(z: &IntervalMatrix) -> Result<FuzzyRelation> {
    FuzzyRelation::new(map_bounds(z, |b| b + 0.5)?)
}

pub fn from_saaty(a: &SaatyRelation) -> IntervalMatrix {
    map_bounds(&a.entries, |b| b.log(9.0)).expect("log preserves bound order")
}

/// Inverse of [`from_saaty`], restricted to the conventional range.
pub fn to_saaty(z: &IntervalMatrix) -> Result<SaatyRelation> {
    to_saaty_with_domain(z, SaatyDomain::Conventional)
}

pub fn to_saaty_with_domain(z: &IntervalMatrix, domain: SaatyDomain) -> Result<SaatyRelation> {
    SaatyRelation::with_domain(map_bounds(z, |b| 9f64.powf(b))?, domain)
}

/// A classical relation that embeds into the IPR space.
pub trait Embeddable {
    fn to_ipr(&self) -> IntervalMatrix;
}

impl Embeddable for FuzzyRelation {
    fn to_ipr(&self) -> IntervalMatrix {
        from_fuzzy(self)
    }
}

impl Embeddable for SaatyRelation {
    fn to_ipr(&self) -> IntervalMatrix {
        from_saaty(self)
    }
}

/// Consistency of the image with respect to `[0, 0]`.
///
/// A non-reciprocal image cannot be consistent and reports `false`.
pub fn consistency_transfer_check(source: &impl Embeddable, tol: f64) -> bool {
    let z = source.to_ipr();
    ipr::check_consistency(&z, NeutralElement::ZERO, tol).is_ok_and(|r| r.is_consistent)
}
