//! Least-squares consistency repair.
//!
//! The nearest consistent IPR to `Z` under the bound-wise squared error
//! `(1/2n²) Σ (z⁺ - z̄⁺)² + (z⁻ - z̄⁻)²` has the form
//! `z̄_ij = [ν_i - ν_j - α, ν_i - ν_j + α]` with
//!
//! ```text
//! ν_k = μ + (1/n) Σ_j c_kj        c_kj = midpoint(z_kj)
//! α   = (1/2n²) Σ_ij ℓ(z_ij)
//! ```
//!
//! The objective only sees differences of `ν`, so the optimum is a
//! translation family; the prescribed mean `μ` selects one member.

pub mod oracle;

use crate::error::{Error, Result};
use crate::interval::{Interval, DEFAULT_TOL};
use crate::ipr;
use crate::matrix::IntervalMatrix;
use crate::scale::ConsecutiveChain;

#[derive(Debug, Clone, PartialEq)]
pub struct RepairSolution {
    /// Crisp priority midpoints.
    pub nu: Vec<f64>,
    /// Half-width of the neutral element `[-α, α]`.
    pub alpha: f64,
    pub repaired: IntervalMatrix,
    pub objective: f64,
    /// Mean of `nu`.
    pub mu: f64,
}

impl RepairSolution {
    pub(crate) fn from_parameters(z: &IntervalMatrix, nu: Vec<f64>, alpha: f64, mu: f64) -> Self {
        let repaired = consistent_matrix(&nu, alpha);
        let objective = objective_value(z, &repaired).expect("same dimension");
        Self {
            nu,
            alpha,
            repaired,
            objective,
            mu,
        }
    }
}

/// Outcome of equalizing the lengths of a consecutive chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainRepairSolution {
    pub alpha: f64,
    /// Each step re-centred on its own midpoint with half-width `alpha`.
    pub adjusted_steps: Vec<Interval>,
    pub objective: f64,
}

impl ChainRepairSolution {
    pub fn adjusted_chain(&self) -> ConsecutiveChain {
        ConsecutiveChain::new(self.adjusted_steps.clone()).expect("chain repair keeps steps")
    }
}

fn consistent_matrix(nu: &[f64], alpha: f64) -> IntervalMatrix {
    IntervalMatrix::from_fn(nu.len(), |i, j| {
        let d = nu[i] - nu[j];
        Interval::from_bounds_unchecked(d - alpha, d + alpha)
    })
}

/// `ν_k = μ + (1/n) Σ_j midpoint(z_kj)`.
fn row_mean_midpoints(z: &IntervalMatrix, mu: f64) -> Vec<f64> {
    let n = z.n() as f64;
    z.rows()
        .map(|row| mu + row.iter().map(Interval::midpoint).sum::<f64>() / n)
        .collect()
}

/// The unique optimum with `mean(ν) = mu`; also optimal for the free model.
pub fn repair_full(z: &IntervalMatrix, mu: f64) -> Result<RepairSolution> {
    ipr::require_reciprocal(z, DEFAULT_TOL)?;
    let n = z.n() as f64;
    let alpha = z.entries().iter().map(Interval::length).sum::<f64>() / (2.0 * n * n);
    debug_assert!(alpha >= 0.0);
    let nu = row_mean_midpoints(z, mu);
    Ok(RepairSolution::from_parameters(z, nu, alpha, mu))
}

/// Repair with the neutral element fixed at `[-alpha, alpha]`.
///
/// The optimal `ν` does not depend on `alpha`; the gauge is `μ = 0`.
pub fn repair_fixed_neutral(z: &IntervalMatrix, alpha: f64) -> Result<RepairSolution> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::NegativeAlpha(alpha));
    }
    ipr::require_reciprocal(z, DEFAULT_TOL)?;
    let nu = row_mean_midpoints(z, 0.0);
    Ok(RepairSolution::from_parameters(z, nu, alpha, 0.0))
}

/// Closest equal-length chain: `α = (1/2(n-1)) Σ ℓ(step)`, midpoints kept.
pub fn repair_chain(chain: &ConsecutiveChain) -> ChainRepairSolution {
    let steps = chain.steps();
    let m = steps.len() as f64;
    let alpha = steps.iter().map(Interval::length).sum::<f64>() / (2.0 * m);
    let adjusted_steps: Vec<Interval> = steps
        .iter()
        .map(|s| {
            let c = s.midpoint();
            Interval::from_bounds_unchecked(c - alpha, c + alpha)
        })
        .collect();
    let objective = steps
        .iter()
        .zip(&adjusted_steps)
        .map(|(s, a)| (s.upper() - a.upper()).powi(2) + (s.lower() - a.lower()).powi(2))
        .sum::<f64>()
        / (2.0 * m);
    ChainRepairSolution {
        alpha,
        adjusted_steps,
        objective,
    }
}

/// `(1/2n²) Σ_ij (z⁺ - z̄⁺)² + (z⁻ - z̄⁻)²`.
pub fn objective_value(z: &IntervalMatrix, zbar: &IntervalMatrix) -> Result<f64> {
    if z.n() != zbar.n() {
        return Err(Error::DimensionMismatch {
            left: z.n(),
            right: zbar.n(),
        });
    }
    let n = z.n() as f64;
    let sum: f64 = z
        .entries()
        .iter()
        .zip(zbar.entries())
        .map(|(a, b)| (a.upper() - b.upper()).powi(2) + (a.lower() - b.lower()).powi(2))
        .sum();
    Ok(sum / (2.0 * n * n))
}
