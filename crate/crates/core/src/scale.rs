//! Interval-valued value scales.
//!
//! With objects ordered best to worst, the last column of a consistent IPR is
//! a `≤₀`-decreasing scale whose bottom level is the neutral element. The same
//! scale follows from the consecutive comparisons alone through
//! `v_k + (n-k-1)·u = Σ_{i≥k} z_{i(i+1)}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::interval::{Interval, NeutralElement, DEFAULT_TOL};
use crate::ipr;
use crate::matrix::IntervalMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct ValueScale {
    /// Priority intervals, best to worst.
    pub values: Vec<Interval>,
    pub neutral: NeutralElement,
    /// The constant `C` the scale was divided by, once normalized.
    pub normalization_constant: Option<f64>,
}

impl ValueScale {
    /// True iff `v_{k+1} ≤₀ v_k` for every consecutive pair.
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[1].leq0(&w[0]))
    }
}

impl fmt::Display for ValueScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = f.precision().unwrap_or(3);
        for (k, v) in self.values.iter().enumerate() {
            writeln!(f, "v{} = {v:.p$}", k + 1)?;
        }
        write!(f, "u  = {:.p$}", self.neutral.as_interval())?;
        if let Some(c) = self.normalization_constant {
            write!(f, "\nC  = {c:.p$}")?;
        }
        Ok(())
    }
}

pub fn check_monotone(scale: &ValueScale) -> bool {
    scale.is_monotone()
}

/// Comparisons `z_{i(i+1)}` between consecutive objects, best to worst.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsecutiveChain {
    steps: Vec<Interval>,
}

impl ConsecutiveChain {
    pub fn new(steps: Vec<Interval>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyChain);
        }
        Ok(Self { steps })
    }

    /// The superdiagonal `z_{i(i+1)}` of a matrix with at least two rows.
    pub fn from_matrix(z: &IntervalMatrix) -> Result<Self> {
        Self::new((1..z.n()).map(|i| z.get(i - 1, i)).collect())
    }

    pub fn steps(&self) -> &[Interval] {
        &self.steps
    }

    /// Number of objects the chain links.
    pub fn objects(&self) -> usize {
        self.steps.len() + 1
    }

    /// Shared length of all steps, if they have one.
    pub fn common_length(&self, tol: f64) -> Option<f64> {
        let first = self.steps[0].length();
        self.steps
            .iter()
            .all(|s| (s.length() - first).abs() <= tol)
            .then_some(first)
    }

    fn require_admissible(&self, u: NeutralElement) -> Result<()> {
        let expected = u.length();
        for (index, s) in self.steps.iter().enumerate() {
            if (s.length() - expected).abs() > DEFAULT_TOL {
                return Err(Error::LengthMismatch {
                    index,
                    expected,
                    found: s.length(),
                });
            }
        }
        let ui = u.as_interval();
        if let Some(i) = self.steps.iter().position(|s| !ui.leq0_tol(s, DEFAULT_TOL)) {
            return Err(Error::NotOrdered(i));
        }
        Ok(())
    }

    /// The full consistent IPR determined by the chain: the midpoint of
    /// `z_ij` (`i < j`) is the sum of step midpoints from `i` to `j`, every
    /// entry has length `2ε`.
    pub fn propagate(&self, u: NeutralElement) -> Result<IntervalMatrix> {
        self.require_admissible(u)?;
        let n = self.objects();
        // Prefix sums of midpoints give each object's position.
        let mut position = vec![0.0; n];
        for k in (0..n - 1).rev() {
            position[k] = position[k + 1] + self.steps[k].midpoint();
        }
        let eps = u.epsilon();
        Ok(IntervalMatrix::from_fn(n, |i, j| {
            let d = position[i] - position[j];
            Interval::from_bounds_unchecked(d - eps, d + eps)
        }))
    }
}

/// The worst-anchored scale `v_k = z_{kn}` of a consistent, ordered IPR.
pub fn derive_scale(z: &IntervalMatrix, u: NeutralElement) -> Result<ValueScale> {
    let report = ipr::check_consistency(z, u, DEFAULT_TOL)?;
    if !report.is_consistent {
        let (i, j, k) = report.worst_triple.unwrap_or_default();
        return Err(Error::InconsistentInput(format!(
            "residual {:.3e} at triple ({i}, {j}, {k})",
            report.max_residual
        )));
    }
    let n = z.n();
    let ui = u.as_interval();
    if let Some(i) = (1..n).find(|&i| !ui.leq0_tol(&z.get(i - 1, i), DEFAULT_TOL)) {
        return Err(Error::NotOrdered(i - 1));
    }
    Ok(ValueScale {
        values: z.column(n - 1),
        neutral: u,
        normalization_constant: None,
    })
}

/// Builds the scale from consecutive comparisons by the cumulative identity,
/// solved bound-wise: `v_k = Σ_{i≥k} z_{i(i+1)} - (n-k-1)·u`, `v_n = u`.
pub fn cumulative_from_chain(chain: &ConsecutiveChain, u: NeutralElement) -> Result<ValueScale> {
    chain.require_admissible(u)?;
    let n = chain.objects();
    let ui = u.as_interval();
    let mut values = vec![ui; n];
    let (mut lower, mut upper) = (0.0, 0.0);
    for k in (0..n - 1).rev() {
        let s = chain.steps[k];
        lower += s.lower();
        upper += s.upper();
        // Copies of u absorbed by the sum between k and the last object.
        let m = (n - k - 2) as f64;
        let (lo, hi) = (lower - m * ui.lower(), upper - m * ui.upper());
        values[k] = Interval::from_bounds_unchecked(lo.min(hi), hi.max(lo));
    }
    Ok(ValueScale {
        values,
        neutral: u,
        normalization_constant: None,
    })
}

/// `C = (C⁻ + C⁺) / 2`, the mean of the lowest and highest total units.
pub fn normalization_constant(chain: &ConsecutiveChain) -> Result<f64> {
    let lower: f64 = chain.steps.iter().map(Interval::lower).sum();
    let upper: f64 = chain.steps.iter().map(Interval::upper).sum();
    let c = (lower + upper) / 2.0;
    if c > 0.0 {
        Ok(c)
    } else {
        Err(Error::DegenerateScale(c))
    }
}

/// Divides every level and the neutral element by `c`.
pub fn normalize(scale: &ValueScale, c: f64) -> Result<ValueScale> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::DegenerateScale(c));
    }
    let f = 1.0 / c;
    Ok(ValueScale {
        values: scale.values.iter().map(|v| v.scale(f)).collect(),
        neutral: NeutralElement::new(scale.neutral.epsilon() * f)?,
        normalization_constant: Some(c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipr::fixtures::example_matrix;
    use proptest::prelude::*;

    fn iv(l: f64, u: f64) -> Interval {
        Interval::new(l, u).unwrap()
    }

    fn chain(bounds: &[(f64, f64)]) -> ConsecutiveChain {
        ConsecutiveChain::new(bounds.iter().map(|&(l, u)| iv(l, u)).collect()).unwrap()
    }

    fn assert_scale(values: &[Interval], expected: &[(f64, f64)], tol: f64) {
        assert_eq!(values.len(), expected.len());
        for (v, &(l, u)) in values.iter().zip(expected) {
            assert!(v.approx_eq(&iv(l, u), tol), "{v} vs [{l}, {u}]");
        }
    }

    #[test]
    fn derive_from_example() {
        let s = derive_scale(&example_matrix(), NeutralElement::new(1.0).unwrap()).unwrap();
        assert_eq!(
            s.values,
            vec![iv(9.0, 11.0), iv(4.0, 6.0), iv(2.0, 4.0), iv(-1.0, 1.0)]
        );
        assert!(s.is_monotone());

        let single = IntervalMatrix::from_bounds(&[&[(0.0, 0.0)]]).unwrap();
        let s = derive_scale(&single, NeutralElement::ZERO).unwrap();
        assert_eq!(s.values, vec![Interval::point(0.0)]);
    }

    #[test]
    fn derive_rejects_unordered() {
        // Worst to best: the first consecutive comparison is below u.
        let v = [iv(-1.0, 1.0), iv(4.0, 6.0)];
        let z = ipr::matrix_from_values(&v, NeutralElement::new(1.0).unwrap()).unwrap();
        assert!(matches!(
            derive_scale(&z, NeutralElement::new(1.0).unwrap()),
            Err(Error::NotOrdered(0))
        ));
    }

    #[test]
    fn derive_from_adjusted_table() {
        let a = 7.0 / 6.0;
        let u = NeutralElement::new(a).unwrap();
        let c = chain(&[(5.0 - a, 5.0 + a), (2.0 - a, 2.0 + a), (3.5 - a, 3.5 + a)]);
        let z = c.propagate(u).unwrap();
        let s = derive_scale(&z, u).unwrap();
        assert_scale(
            &s.values,
            &[(9.333, 11.666), (4.333, 6.666), (2.333, 4.666), (-1.166, 1.166)],
            1e-3,
        );
    }

    #[test]
    fn cumulative_scale() {
        let u = NeutralElement::new(1.0).unwrap();
        let s = cumulative_from_chain(&chain(&[(4.0, 6.0), (1.0, 3.0), (2.0, 4.0)]), u).unwrap();
        assert_eq!(
            s.values,
            vec![iv(9.0, 11.0), iv(4.0, 6.0), iv(2.0, 4.0), iv(-1.0, 1.0)]
        );

        let s = cumulative_from_chain(&chain(&[(2.0, 4.0)]), u).unwrap();
        assert_eq!(s.values, vec![iv(2.0, 4.0), iv(-1.0, 1.0)]);

        let a = 7.0 / 6.0;
        let c = chain(&[(3.833, 6.166), (0.833, 3.166), (2.333, 4.666)]);
        // Printed bounds are rounded, so lengths only agree to 1e-3.
        let exact = chain(&[(5.0 - a, 5.0 + a), (2.0 - a, 2.0 + a), (3.5 - a, 3.5 + a)]);
        let s = cumulative_from_chain(&exact, NeutralElement::new(a).unwrap()).unwrap();
        assert!(s.values[0].approx_eq(&iv(9.333, 11.666), 1e-3));
        assert!(c.steps().iter().zip(exact.steps()).all(|(p, e)| p.approx_eq(e, 1e-3)));
    }

    #[test]
    fn cumulative_rejects_bad_chains() {
        let u = NeutralElement::new(1.0).unwrap();
        assert!(matches!(
            cumulative_from_chain(&chain(&[(4.0, 6.0), (2.0, 5.0)]), u),
            Err(Error::LengthMismatch { index: 1, .. })
        ));
        assert!(matches!(
            cumulative_from_chain(&chain(&[(4.0, 6.0), (-3.0, -1.0)]), u),
            Err(Error::NotOrdered(1))
        ));
        assert!(matches!(ConsecutiveChain::new(vec![]), Err(Error::EmptyChain)));
    }

    #[test]
    fn normalization_constants() {
        assert_eq!(
            normalization_constant(&chain(&[(4.0, 6.0), (1.0, 3.0), (2.0, 4.0)])).unwrap(),
            10.0
        );
        assert_eq!(
            normalization_constant(&chain(&[(4.0, 6.0), (1.0, 3.0), (2.0, 5.0)])).unwrap(),
            10.5
        );
        assert_eq!(normalization_constant(&chain(&[(2.5, 2.5)])).unwrap(), 2.5);
        assert!(matches!(
            normalization_constant(&chain(&[(-2.0, 1.0)])),
            Err(Error::DegenerateScale(_))
        ));
    }

    #[test]
    fn normalized_scales() {
        let u = NeutralElement::new(1.0).unwrap();
        let raw = cumulative_from_chain(&chain(&[(4.0, 6.0), (1.0, 3.0), (2.0, 4.0)]), u).unwrap();
        let s = normalize(&raw, 10.0).unwrap();
        assert_scale(
            &s.values,
            &[(0.9, 1.1), (0.4, 0.6), (0.2, 0.4), (-0.1, 0.1)],
            1e-12,
        );
        assert!(s.is_monotone());
        assert_eq!(s.normalization_constant, Some(10.0));

        let a = 7.0 / 6.0;
        let adjusted = chain(&[(5.0 - a, 5.0 + a), (2.0 - a, 2.0 + a), (3.5 - a, 3.5 + a)]);
        let raw = cumulative_from_chain(&adjusted, NeutralElement::new(a).unwrap()).unwrap();
        let s = normalize(&raw, 10.5).unwrap();
        assert_scale(
            &s.values,
            &[(0.889, 1.111), (0.4127, 0.6349), (0.222, 0.444), (-0.111, 0.111)],
            1e-3,
        );
        assert!((s.values[1].midpoint() - 5.5 / 10.5).abs() < 1e-12);
        assert!((s.values[1].lower() - 26.0 / 63.0).abs() < 1e-12);
        assert!((s.values[1].upper() - 40.0 / 63.0).abs() < 1e-12);

        assert_eq!(normalize(&raw, 1.0).unwrap().values, raw.values);
        assert!(matches!(normalize(&raw, 0.0), Err(Error::DegenerateScale(_))));
    }

    #[test]
    fn monotonicity() {
        let s = |vals: Vec<Interval>| ValueScale {
            values: vals,
            neutral: NeutralElement::ZERO,
            normalization_constant: None,
        };
        assert!(check_monotone(&s(vec![iv(0.0, 1.0), iv(0.0, 1.0)])));
        assert!(!check_monotone(&s(vec![iv(0.0, 1.0), iv(0.5, 0.8)])));
    }

    fn admissible_chain() -> impl Strategy<Value = (ConsecutiveChain, NeutralElement)> {
        (1usize..8, 0.0..3.0f64)
            .prop_flat_map(|(len, h)| (prop::collection::vec(0.0..10.0f64, len), Just(h)))
            .prop_map(|(mids, h)| {
                let steps = mids.iter().map(|&m| Interval::around(m + h, h).unwrap()).collect();
                (ConsecutiveChain::new(steps).unwrap(), NeutralElement::new(h).unwrap())
            })
    }

    proptest! {
        #[test]
        fn chain_agrees_with_propagated_matrix((c, u) in admissible_chain()) {
            let direct = cumulative_from_chain(&c, u).unwrap();
            let z = c.propagate(u).unwrap();
            let via_matrix = derive_scale(&z, u).unwrap();
            for (a, b) in direct.values.iter().zip(&via_matrix.values) {
                prop_assert!(a.approx_eq(b, 1e-12), "{} vs {}", a, b);
            }
            prop_assert!(direct.is_monotone());
        }

        #[test]
        fn normalization_centers_extremes((c, u) in admissible_chain()) {
            let raw = cumulative_from_chain(&c, u).unwrap();
            let k = normalization_constant(&c).unwrap();
            let s = normalize(&raw, k).unwrap();
            prop_assert!((s.values[0].midpoint() - 1.0).abs() < 1e-12);
            prop_assert!(s.values.last().unwrap().midpoint().abs() < 1e-12);
            prop_assert!(s.values[0].lower() <= 1.0 + 1e-12 && 1.0 <= s.values[0].upper() + 1e-12);
            prop_assert!(s.is_monotone());
            for v in &s.values {
                prop_assert!((v.length() - 2.0 * u.epsilon() / k).abs() < 1e-9);
            }
        }

        #[test]
        fn derive_inverts_matrix_from_values((c, u) in admissible_chain()) {
            let raw = cumulative_from_chain(&c, u).unwrap();
            let z = ipr::matrix_from_values(&raw.values, u).unwrap();
            let back = derive_scale(&z, u).unwrap();
            for (a, b) in raw.values.iter().zip(&back.values) {
                prop_assert!(a.approx_eq(b, 1e-9));
            }
        }
    }
}
