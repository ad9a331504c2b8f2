//! The oscillation seminorm, its induced matrix seminorm, and the two classical
//! coefficients of ergodicity that bracket it.

use super::scalar::Scalar;
use super::stochastic::StochasticMatrix;
use crate::error::{Error, Result};

/// Largest dimension accepted by the subset enumeration in [`seminorm`].
pub const MAX_ENUMERATION_DIM: usize = 20;

/// `max_i x_i - min_i x_i`.
pub fn osc<S: Scalar>(x: &[S]) -> Result<S> {
    let (lo, hi) = min_max(x).ok_or_else(|| Error::Dimension("osc of an empty vector".into()))?;
    Ok(hi.clone() - lo)
}

pub(crate) fn min_max<T: PartialOrd>(x: &[T]) -> Option<(&T, &T)> {
    let first = x.first()?;
    Some(x.iter().fold((first, first), |(lo, hi), v| {
        (if v < lo { v } else { lo }, if v > hi { v } else { hi })
    }))
}

/// The induced seminorm together with an indicator subset `I` whose vector
/// `e_I` realizes it.
#[derive(Debug, Clone, PartialEq)]
pub struct Realized<S> {
    pub value: S,
    pub subset: Vec<bool>,
}

/// Induced oscillation seminorm of a stochastic matrix.
///
/// Computed exactly by enumerating indicator vectors `e_I`. Since `e_I` and
/// its complement realize the same value only subsets containing index 0 are
/// scanned, in Gray-code order so each step touches one column.
pub fn seminorm<S: Scalar>(a: &StochasticMatrix<S>) -> Result<S> {
    seminorm_realized(a).map(|r| r.value)
}

pub fn seminorm_realized<S: Scalar>(a: &StochasticMatrix<S>) -> Result<Realized<S>> {
    let n = a.n();
    if n > MAX_ENUMERATION_DIM {
        return Err(Error::Capability(format!(
            "seminorm enumeration is limited to n <= {MAX_ENUMERATION_DIM} (got {n}); \
             use erg_coeffs(..).lambda as an upper bound"
        )));
    }
    let mut best_subset = vec![false; n];
    if n == 1 {
        return Ok(Realized {
            value: S::zero(),
            subset: best_subset,
        });
    }
    // Column-major lanes: lanes[j * n + i] = A[i][j] in lane units.
    let col_major: Vec<S> = (0..n).flat_map(|j| a.column(j).cloned().collect::<Vec<_>>()).collect();
    let (lanes, unit) = S::to_lanes(&col_major);
    let col = |j: usize| &lanes[j * n..(j + 1) * n];

    let mut sums: Vec<S::Lane> = col(0).to_vec();
    let mut in_set = vec![false; n];
    in_set[0] = true;

    let spread = |sums: &[S::Lane]| {
        let (lo, hi) = min_max(sums).expect("n >= 2");
        let mut d = hi.clone();
        d -= lo;
        d
    };
    let mut best = spread(&sums);
    best_subset.copy_from_slice(&in_set);

    let free = n - 1;
    for g in 1u64..(1u64 << free) {
        // Bit flipped between gray(g - 1) and gray(g).
        let j = 1 + g.trailing_zeros() as usize;
        let c = col(j);
        if in_set[j] {
            sums.iter_mut().zip(c).for_each(|(s, v)| *s -= v);
        } else {
            sums.iter_mut().zip(c).for_each(|(s, v)| *s += v);
        }
        in_set[j] = !in_set[j];
        let d = spread(&sums);
        if d > best {
            best = d;
            best_subset.copy_from_slice(&in_set);
        }
    }
    Ok(Realized {
        value: S::from_lane(&best, &unit),
        subset: best_subset,
    })
}

/// `A e_I` for an indicator subset.
pub fn apply_indicator<S: Scalar>(a: &StochasticMatrix<S>, subset: &[bool]) -> Vec<S> {
    a.rows()
        .map(|row| {
            row.iter()
                .zip(subset)
                .filter(|(_, &keep)| keep)
                .fold(S::zero(), |acc, (v, _)| acc + v)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicityCoefficients<S> {
    /// `max_j max_{i1,i2} |A[i2][j] - A[i1][j]|`
    pub delta: S,
    /// `1 - min_{i1,i2} sum_j min(A[i1][j], A[i2][j])`
    pub lambda: S,
}

pub fn erg_coeffs<S: Scalar>(a: &StochasticMatrix<S>) -> ErgodicityCoefficients<S> {
    let n = a.n();
    let delta = (0..n)
        .map(|j| {
            let col: Vec<S> = a.column(j).cloned().collect();
            osc(&col).expect("n >= 1")
        })
        .fold(S::zero(), max_of);
    let mut min_overlap = S::one();
    for i1 in 0..n {
        for i2 in i1 + 1..n {
            let overlap = a
                .row(i1)
                .iter()
                .zip(a.row(i2))
                .fold(S::zero(), |acc, (x, y)| acc + if x < y { x.clone() } else { y.clone() });
            if overlap < min_overlap {
                min_overlap = overlap;
            }
        }
    }
    ErgodicityCoefficients {
        delta,
        lambda: S::one() - min_overlap,
    }
}

/// `1 - sum_j min_i A[i][j]`, an upper bound on the seminorm that is below one
/// as soon as some column is entirely positive.
pub fn column_bound<S: Scalar>(a: &StochasticMatrix<S>) -> S {
    let total = (0..a.n())
        .map(|j| {
            a.column(j)
                .cloned()
                .fold(None, |m: Option<S>, v| match m {
                    Some(m) if m <= v => Some(m),
                    _ => Some(v),
                })
                .unwrap_or_else(S::zero)
        })
        .fold(S::zero(), |acc, b| acc + b);
    S::one() - total
}

pub(crate) fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}
