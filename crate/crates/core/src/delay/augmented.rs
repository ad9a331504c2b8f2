//! The augmented `Delta*N x Delta*N` matrix that turns the delayed recursion
//! into a zero-delay linear map `X(t+1) = A_aug(t) X(t)`.
//!
//! Slot layout (0-based): agent `i` owns the block `Delta*i .. Delta*i + Delta`,
//! and the value `x_i(t - lag + 1)` sits at `slot(i, lag) = Delta*i + Delta - lag`.
//! The block's last slot, `head(i) = slot(i, 1)`, holds the current value.
//! Non-head rows shift the block by one step; head rows carry the weights.

use super::schedule::validate_slice;
use crate::error::{Error, Result};
use crate::matrix::{Scalar, StochasticMatrix};

pub fn slot(delta: usize, agent: usize, lag: usize) -> usize {
    debug_assert!((1..=delta).contains(&lag));
    delta * agent + delta - lag
}

pub fn head(delta: usize, agent: usize) -> usize {
    slot(delta, agent, 1)
}

pub fn is_head(delta: usize, index: usize) -> bool {
    (index + 1).is_multiple_of(delta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedMatrix<S> {
    base_n: usize,
    delta: usize,
    t: usize,
    base: StochasticMatrix<S>,
    /// `lags[i * n + j] = t - tau_ij(t) + 1`.
    lags: Vec<usize>,
    matrix: StochasticMatrix<S>,
}

/// Builds `A_aug(t)` from `A(t)` and the delay slice `tau(t)`.
pub fn build_augmented<S: Scalar>(
    a: &StochasticMatrix<S>,
    tau_at_t: &[Vec<usize>],
    t: usize,
    delta: usize,
) -> Result<AugmentedMatrix<S>> {
    let n = a.n();
    if delta == 0 {
        return Err(Error::param("delta", "must be at least 1"));
    }
    if tau_at_t.len() != n || tau_at_t.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("delay slice is not {n}x{n}")));
    }
    if let Some(v) = validate_slice(tau_at_t, t, delta).first() {
        return Err(Error::InvalidDelays(v.to_string()));
    }
    let dim = delta * n;
    let mut entries = vec![S::zero(); dim * dim];
    let mut lags = vec![0; n * n];
    for i in 0..n {
        for k in 0..delta - 1 {
            let m = delta * i + k;
            entries[m * dim + m + 1] = S::one();
        }
        let h = head(delta, i);
        for j in 0..n {
            let lag = t + 1 - tau_at_t[i][j];
            lags[i * n + j] = lag;
            let w = a.get(i, j);
            if !w.is_zero() {
                entries[h * dim + slot(delta, j, lag)] = w.clone();
            }
        }
    }
    let mut matrix = StochasticMatrix::from_entries_unchecked(dim, entries);
    if let Some(alpha) = a.alpha() {
        matrix = matrix.with_alpha(alpha.clone())?;
    }
    let aug = AugmentedMatrix {
        base_n: n,
        delta,
        t,
        base: a.clone(),
        lags,
        matrix,
    };
    aug.check_properties()?;
    Ok(aug)
}

impl<S: Scalar> AugmentedMatrix<S> {
    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.delta * self.base_n
    }

    /// Time index of the source matrix.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn base(&self) -> &StochasticMatrix<S> {
        &self.base
    }

    pub fn lag(&self, i: usize, j: usize) -> usize {
        self.lags[i * self.base_n + j]
    }

    pub fn matrix(&self) -> &StochasticMatrix<S> {
        &self.matrix
    }

    /// Structural properties of the encoding:
    /// (1) non-head rows are unit rows pointing one slot ahead;
    /// (2) in a head row, agent `j`'s block holds exactly the weight `A_ij`
    ///     in one slot and zeros elsewhere;
    /// (3) the head diagonal entry equals `A_ii`.
    pub fn check_properties(&self) -> Result<()> {
        let (n, d, dim) = (self.base_n, self.delta, self.dim());
        let bad = |what: String| {
            Err(Error::InvalidDelays(format!(
                "augmented matrix at t = {}: {what}",
                self.t
            )))
        };
        for m in 0..dim {
            let row = self.matrix.row(m);
            if !is_head(d, m) {
                let ok = row
                    .iter()
                    .enumerate()
                    .all(|(c, v)| if c == m + 1 { v.is_one() } else { v.is_zero() });
                if !ok {
                    return bad(format!("row {m} is not the unit row e_{}", m + 1));
                }
                continue;
            }
            let i = m / d;
            for j in 0..n {
                let block = &row[d * j..d * (j + 1)];
                let nonzero: Vec<&S> = block.iter().filter(|v| !v.is_zero()).collect();
                let w = self.base.get(i, j);
                let ok = if w.is_zero() {
                    nonzero.is_empty()
                } else {
                    nonzero.len() == 1 && nonzero[0] == w
                };
                if !ok {
                    return bad(format!("block ({i}, {j}) of head row {m} does not carry A_ij"));
                }
            }
            if self.matrix.get(m, m) != self.base.get(i, i) {
                return bad(format!("head diagonal of agent {i} differs from A_ii"));
            }
        }
        Ok(())
    }
}
