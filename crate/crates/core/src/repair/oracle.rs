//! Numeric reference solver for the full repair model.
//!
//! Projected gradient descent on `(ν, α)` over the raw least-squares
//! objective, evaluated entry by entry. It shares nothing with the closed
//! form beyond the objective definition and exists to cross-check it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RepairSolution;
use crate::error::Result;
use crate::interval::DEFAULT_TOL;
use crate::ipr;
use crate::matrix::IntervalMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub iterations: usize,
    /// Initial step; halved whenever a step would increase the objective.
    pub step: f64,
    /// Seeds the random starting point.
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            step: 1e-2,
            seed: 0x1f2e_3d4c,
        }
    }
}

struct Objective<'a> {
    z: &'a IntervalMatrix,
    scale: f64,
}

impl Objective<'_> {
    fn new(z: &IntervalMatrix) -> Objective<'_> {
        let n = z.n() as f64;
        Objective {
            z,
            scale: 1.0 / (2.0 * n * n),
        }
    }

    fn residuals(&self, nu: &[f64], alpha: f64, i: usize, j: usize) -> (f64, f64) {
        let e = self.z.get(i, j);
        let d = nu[i] - nu[j];
        (e.upper() - (d + alpha), e.lower() - (d - alpha))
    }

    fn value(&self, nu: &[f64], alpha: f64) -> f64 {
        let n = self.z.n();
        let mut sum = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (rp, rm) = self.residuals(nu, alpha, i, j);
                sum += rp * rp + rm * rm;
            }
        }
        self.scale * sum
    }

    fn gradient(&self, nu: &[f64], alpha: f64) -> (Vec<f64>, f64) {
        let n = self.z.n();
        let mut g_nu = vec![0.0; n];
        let mut g_alpha = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (rp, rm) = self.residuals(nu, alpha, i, j);
                let s = 2.0 * self.scale * (rp + rm);
                g_nu[i] -= s;
                g_nu[j] += s;
                g_alpha += 2.0 * self.scale * (rm - rp);
            }
        }
        (g_nu, g_alpha)
    }
}

fn project(nu: &mut [f64], alpha: &mut f64, mu: f64) {
    let shift = mu - nu.iter().sum::<f64>() / nu.len() as f64;
    nu.iter_mut().for_each(|x| *x += shift);
    *alpha = alpha.max(0.0);
}

/// Minimizes the repair objective with `mean(ν) = mu`, `α ≥ 0`.
pub fn oracle_repair(z: &IntervalMatrix, mu: f64, config: &OracleConfig) -> Result<RepairSolution> {
    ipr::require_reciprocal(z, DEFAULT_TOL)?;
    let f = Objective::new(z);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut nu: Vec<f64> = (0..z.n()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut alpha = rng.gen_range(0.0..1.0);
    project(&mut nu, &mut alpha, mu);
    let mut current = f.value(&nu, alpha);
    let mut step = config.step;

    for _ in 0..config.iterations {
        let (g_nu, g_alpha) = f.gradient(&nu, alpha);
        let mut cand: Vec<f64> = nu.iter().zip(&g_nu).map(|(x, g)| x - step * g).collect();
        let mut cand_alpha = alpha - step * g_alpha;
        project(&mut cand, &mut cand_alpha, mu);
        let value = f.value(&cand, cand_alpha);
        if value <= current {
            nu = cand;
            alpha = cand_alpha;
            current = value;
        } else {
            step /= 2.0;
            if step < f64::EPSILON {
                break;
            }
        }
    }

    Ok(RepairSolution::from_parameters(z, nu, alpha, mu))
}
