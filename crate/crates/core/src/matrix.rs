use std::fmt;

use crate::error::{Error, Result};
use crate::interval::Interval;

/// Square `n × n` table of intervals, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalMatrix {
    n: usize,
    entries: Vec<Interval>,
}

impl IntervalMatrix {
    pub fn from_rows(rows: Vec<Vec<Interval>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotSquare("no rows".into()));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::NotSquare(format!(
                "row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix from `(lower, upper)` pairs; convenient for literals.
    pub fn from_bounds(rows: &[&[(f64, f64)]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(l, u)| Interval::new(l, u))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Interval) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self { n, entries }
    }

    pub fn try_from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Result<Interval>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotSquare("no rows".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j)?);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<Interval> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Interval]> {
        self.entries.chunks(self.n)
    }

    pub fn entries(&self) -> &[Interval] {
        &self.entries
    }

    pub fn map(&self, f: impl FnMut(&Interval) -> Interval) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl FnMut(&Interval) -> Result<Interval>) -> Result<Self> {
        Ok(Self {
            n: self.n,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    /// Largest bound-wise distance between corresponding entries.
    pub fn max_distance(&self, other: &IntervalMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &IntervalMatrix, tol: f64) -> bool {
        self.max_distance(other).is_ok_and(|d| d <= tol)
    }
}

impl fmt::Display for IntervalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = f.precision().unwrap_or(3);
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|z| format!("{z:.p$}")).collect();
            writeln!(f, "{}", cells.join("  "))?;
        }
        Ok(())
    }
}
