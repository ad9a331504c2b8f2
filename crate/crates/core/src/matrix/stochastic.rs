use serde_json::{json, Value};

use super::scalar::{Mode, Scalar};
use crate::error::{Error, Result};

/// Row-stochastic `n x n` matrix, stored row-major.
///
/// Invariants: entries are nonnegative, each row sums to one (exactly in
/// rational mode, within [`FLOAT_TOL`](super::scalar::FLOAT_TOL) in float
/// mode), and when `alpha` is set every positive entry is at least `alpha`.
/// Rows are never renormalized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<S> {
    n: usize,
    entries: Vec<S>,
    alpha: Option<S>,
}

impl<S: Scalar> StochasticMatrix<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Dimension("matrix must have at least one row".into()));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        let m = StochasticMatrix {
            n,
            entries,
            alpha: None,
        };
        m.validate_rows()?;
        Ok(m)
    }

    /// Attaches a lower bound on positive entries, checking it.
    pub fn with_alpha(mut self, alpha: S) -> Result<Self> {
        if !alpha.is_positive() || alpha > S::one() {
            return Err(Error::param("alpha", format!("{alpha} is not in (0, 1]")));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self.get(i, j);
                if a.is_positive() && *a < alpha {
                    return Err(Error::BelowAlpha {
                        row: i,
                        col: j,
                        value: a.to_string(),
                        alpha: alpha.to_string(),
                    });
                }
            }
        }
        self.alpha = Some(alpha);
        Ok(self)
    }

    /// Builds a matrix already known to be stochastic (e.g. a product of
    /// stochastic matrices).
    pub(crate) fn from_entries_unchecked(n: usize, entries: Vec<S>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        StochasticMatrix {
            n,
            entries,
            alpha: None,
        }
    }

    fn validate_rows(&self) -> Result<()> {
        for i in 0..self.n {
            let mut sum = S::zero();
            for (j, a) in self.row(i).iter().enumerate() {
                if *a < S::zero() {
                    return Err(Error::NotStochastic {
                        row: i,
                        reason: format!("entry {j} is negative ({a})"),
                    });
                }
                sum += a;
            }
            if !sum.near(&S::one()) {
                return Err(Error::NotStochastic {
                    row: i,
                    reason: format!("row sums to {sum}"),
                });
            }
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Self {
        Self::permutation(&(0..n).collect::<Vec<_>>())
    }

    /// Permutation matrix with `P[i][perm[i]] = 1`, i.e. `(P x)_i = x_{perm[i]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut entries = vec![S::zero(); n * n];
        for (i, &j) in perm.iter().enumerate() {
            entries[i * n + j] = S::one();
        }
        Self::from_entries_unchecked(n, entries)
    }

    /// Rank-one matrix `1 pi^T`.
    pub fn rank_one(pi: &[S]) -> Result<Self> {
        Self::new(vec![pi.to_vec(); pi.len()])
    }

    /// `1 (1/n)^T`.
    pub fn uniform(n: usize) -> Self {
        let w = S::from_ratio(1, n as i64);
        Self::from_entries_unchecked(n, vec![w; n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Option<&S> {
        self.alpha.as_ref()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.entries.chunks(self.n)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &S> {
        (0..self.n).map(move |i| self.get(i, j))
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn has_self_loops(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i).is_positive())
    }

    /// `self * rhs`. Zero entries of `self` are skipped, which keeps products
    /// of sparse (e.g. augmented) matrices cheap.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.n != rhs.n {
            return Err(Error::Dimension(format!(
                "cannot multiply {0}x{0} by {1}x{1}",
                self.n, rhs.n
            )));
        }
        let n = self.n;
        let mut out = vec![S::zero(); n * n];
        for i in 0..n {
            let dst = &mut out[i * n..(i + 1) * n];
            for (k, a) in self.row(i).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (d, b) in dst.iter_mut().zip(rhs.row(k)) {
                    if !b.is_zero() {
                        *d += a.clone() * b;
                    }
                }
            }
        }
        Ok(Self::from_entries_unchecked(n, out))
    }

    /// `self * x`.
    pub fn apply(&self, x: &[S]) -> Result<Vec<S>> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "vector of length {} applied to {}x{} matrix",
                x.len(),
                self.n,
                self.n
            )));
        }
        Ok(self
            .rows()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(S::zero(), |acc, (a, v)| acc + a.clone() * v)
            })
            .collect())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> StochasticMatrix<T> {
        StochasticMatrix {
            n: self.n,
            entries: self.entries.iter().map(&f).collect(),
            alpha: self.alpha.as_ref().map(&f),
        }
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows()
            .map(|r| Value::Array(r.iter().map(S::to_json).collect()))
            .collect();
        json!({ "n": self.n, "mode": S::MODE, "rows": rows })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse("n", "missing or not an integer"))? as usize;
        if let Some(mode) = v.get("mode") {
            let mode: Mode = serde_json::from_value(mode.clone()).map_err(|e| Error::parse("mode", e.to_string()))?;
            if mode != S::MODE {
                return Err(Error::parse(
                    "mode",
                    format!("file is {mode} but {} was requested", S::MODE),
                ));
            }
        }
        let rows = v
            .get("rows")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("rows", "missing or not an array"))?;
        if rows.len() != n {
            return Err(Error::parse("rows", format!("{} rows for n = {n}", rows.len())));
        }
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.as_array()
                    .ok_or_else(|| Error::parse(format!("rows[{i}]"), "not an array"))?
                    .iter()
                    .enumerate()
                    .map(|(j, x)| S::from_json(x, &format!("rows[{i}][{j}]")))
                    .collect::<Result<Vec<S>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }
}

/// Parses a matrix from `&[&[(num, den)]]`-style literals; test and example helper.
pub fn from_ratios<S: Scalar>(rows: &[&[(i64, i64)]]) -> Result<StochasticMatrix<S>> {
    StochasticMatrix::new(
        rows.iter()
            .map(|r| r.iter().map(|&(p, q)| S::from_ratio(p, q)).collect())
            .collect(),
    )
}
