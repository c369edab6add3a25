//! Interval preference relations (IPRs).
//!
//! An IPR is an interval matrix with `z_ij = -z_ji`. It is consistent with
//! respect to a neutral element `u` when `z_ij + u = z_ik + z_kj` holds for
//! every triple. Consistent IPRs are exactly those generated by a list of
//! priority intervals through `z_ij + u = v_i - v_j`, and every entry then
//! has length `ℓ(u)`.
//!
//! Indices are zero-based throughout.

use crate::error::{Error, Result};
use crate::interval::{Interval, NeutralElement, DEFAULT_TOL};
use crate::matrix::IntervalMatrix;
use crate::repair;

/// Outcome of a full consistency scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub is_reciprocal: bool,
    pub is_consistent: bool,
    pub neutral: Option<NeutralElement>,
    /// Largest absolute bound violation of `z_ij + u = z_ik + z_kj`.
    pub max_residual: f64,
    /// `(i, j, k)` attaining `max_residual`; absent when consistent.
    pub worst_triple: Option<(usize, usize, usize)>,
}

/// Index of the first pair `(i, j)` violating `z_ij = -z_ji`.
pub fn reciprocity_violation(z: &IntervalMatrix, tol: f64) -> Option<(usize, usize)> {
    let n = z.n();
    for i in 0..n {
        for j in i..n {
            if !z.get(i, j).approx_eq(&-z.get(j, i), tol) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn check_reciprocity(z: &IntervalMatrix, tol: f64) -> bool {
    reciprocity_violation(z, tol).is_none()
}

pub(crate) fn require_reciprocal(z: &IntervalMatrix, tol: f64) -> Result<()> {
    match reciprocity_violation(z, tol) {
        Some((i, j)) => Err(Error::NotReciprocal { i, j }),
        None => Ok(()),
    }
}

/// Scans all `n³` triples for violations of `z_ij + u = z_ik + z_kj`.
pub fn check_consistency(
    z: &IntervalMatrix,
    u: NeutralElement,
    tol: f64,
) -> Result<ConsistencyReport> {
    require_reciprocal(z, tol)?;
    let n = z.n();
    let eps = u.epsilon();
    let mut max_residual = 0.0;
    let mut worst = (0, 0, 0);
    for i in 0..n {
        for j in 0..n {
            let lhs = z.get(i, j);
            let (lo, hi) = (lhs.lower() - eps, lhs.upper() + eps);
            for k in 0..n {
                let rhs = z.get(i, k) + z.get(k, j);
                let r = (lo - rhs.lower()).abs().max((hi - rhs.upper()).abs());
                if r > max_residual {
                    max_residual = r;
                    worst = (i, j, k);
                }
            }
        }
    }
    let is_consistent = max_residual <= tol;
    Ok(ConsistencyReport {
        is_reciprocal: true,
        is_consistent,
        neutral: Some(u),
        max_residual,
        worst_triple: (!is_consistent).then_some(worst),
    })
}

/// Mean half-length of the diagonal.
///
/// For a consistent IPR every diagonal entry equals the neutral element, so
/// this recovers it exactly; otherwise it is the least-squares fit.
pub fn infer_neutral(z: &IntervalMatrix) -> NeutralElement {
    let n = z.n();
    let eps = (0..n).map(|i| z.get(i, i).length() / 2.0).sum::<f64>() / n as f64;
    NeutralElement::new(eps.max(0.0)).expect("mean of half-lengths is non-negative")
}

/// Infers the neutral element and verifies consistency against it.
pub(crate) fn require_consistent(z: &IntervalMatrix, tol: f64) -> Result<NeutralElement> {
    let u = infer_neutral(z);
    let report = check_consistency(z, u, tol)?;
    if report.is_consistent {
        Ok(u)
    } else {
        let (i, j, k) = report.worst_triple.unwrap_or_default();
        Err(Error::InconsistentInput(format!(
            "residual {:.3e} at triple ({i}, {j}, {k})",
            report.max_residual
        )))
    }
}

/// Priority intervals read from column `reference`: `v_k = z_{k,reference}`.
///
/// Any column works; the last one (the worst object when rows are ordered
/// best to worst) anchors the scale at the neutral element.
pub fn values_from_reference(z: &IntervalMatrix, reference: usize) -> Result<Vec<Interval>> {
    if reference >= z.n() {
        return Err(Error::BadReference {
            index: reference,
            n: z.n(),
        });
    }
    require_consistent(z, DEFAULT_TOL)?;
    Ok(z.column(reference))
}

/// Builds the consistent IPR generated by `values`.
///
/// Only midpoint differences matter, so any common shift of `values` yields
/// the same matrix.
pub fn matrix_from_values(values: &[Interval], u: NeutralElement) -> Result<IntervalMatrix> {
    if values.is_empty() {
        return Err(Error::NotSquare("no values".into()));
    }
    let expected = u.length();
    for (index, v) in values.iter().enumerate() {
        if (v.length() - expected).abs() > DEFAULT_TOL {
            return Err(Error::LengthMismatch {
                index,
                expected,
                found: v.length(),
            });
        }
    }
    let eps = u.epsilon();
    Ok(IntervalMatrix::from_fn(values.len(), |i, j| {
        let d = values[i].midpoint() - values[j].midpoint();
        Interval::from_bounds_unchecked(d - eps, d + eps)
    }))
}

/// A consistent IPR split into its crisp midpoint relation and the shared
/// half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// Degenerate entries `x_ij = midpoint(z_ij)`; additively consistent.
    pub crisp: IntervalMatrix,
    pub halfwidth: f64,
}

impl Decomposition {
    /// `z_ij = [x_ij - h, x_ij + h]`.
    pub fn recompose(&self) -> IntervalMatrix {
        let h = self.halfwidth;
        self.crisp.map(|x| {
            let c = x.lower();
            Interval::from_bounds_unchecked(c - h, c + h)
        })
    }
}

pub fn midpoint_decomposition(z: &IntervalMatrix) -> Result<Decomposition> {
    let u = require_consistent(z, DEFAULT_TOL)?;
    Ok(Decomposition {
        crisp: z.map(|e| Interval::point(e.midpoint())),
        halfwidth: u.epsilon(),
    })
}

/// Least-squares distance to the nearest IPR consistent with `u`.
///
/// Zero exactly when `z` is already consistent with respect to `u`.
pub fn inconsistency_index(z: &IntervalMatrix, u: NeutralElement) -> Result<f64> {
    Ok(repair::repair_fixed_neutral(z, u.epsilon())?.objective)
}
