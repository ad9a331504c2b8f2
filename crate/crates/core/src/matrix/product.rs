//! Left products `A(t) ... A(0)` and the certificates built on them.
//!
//! Orientation is fixed everywhere in the crate: later matrices multiply on
//! the left, so `chain_product(&[a0, a1, a2]) == a2 * a1 * a0`.

use super::scalar::Scalar;
use super::seminorm::seminorm;
use super::stochastic::StochasticMatrix;
use crate::error::{Error, Result};
use crate::graph::comm_graph;

pub fn chain_product<S: Scalar>(seq: &[StochasticMatrix<S>]) -> Result<StochasticMatrix<S>> {
    let (first, rest) = seq
        .split_first()
        .ok_or_else(|| Error::Dimension("empty matrix sequence".into()))?;
    rest.iter().try_fold(first.clone(), |acc, a| a.mul(&acc))
}

/// Ergodic (primitive): some power is entrywise positive. Decided on the
/// communication graph: strongly connected with cycle-length gcd one.
pub fn is_ergodic<S: Scalar>(a: &StochasticMatrix<S>) -> bool {
    comm_graph(a).is_primitive()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<S> {
    pub converged: bool,
    /// First prefix index `t` with `||P(t)|| < tol`.
    pub t_hit: Option<usize>,
    pub final_seminorm: S,
    /// A row of `P(t_hit)`; all rows agree to within `tol`.
    pub limit_row: Option<Vec<S>>,
    /// Seminorm of each running product `P(0), P(1), ...` up to the stop.
    pub seminorms: Vec<S>,
    pub nonincreasing: bool,
}

/// Runs the product `P(t) = A(t) ... A(0)` until its seminorm drops below
/// `tol` or the sequence is exhausted.
pub fn convergence_certificate<S: Scalar>(seq: &[StochasticMatrix<S>], tol: &S) -> Result<Certificate<S>> {
    if !tol.is_positive() {
        return Err(Error::param("tol", format!("{tol} is not positive")));
    }
    let mut product: Option<StochasticMatrix<S>> = None;
    let mut seminorms: Vec<S> = Vec::with_capacity(seq.len());
    for (t, a) in seq.iter().enumerate() {
        let p = match product.take() {
            None => a.clone(),
            Some(p) => a.mul(&p)?,
        };
        let s = seminorm(&p)?;
        let hit = s < *tol;
        seminorms.push(s);
        if hit {
            return Ok(Certificate {
                converged: true,
                t_hit: Some(t),
                final_seminorm: seminorms[t].clone(),
                limit_row: Some(p.row(0).to_vec()),
                nonincreasing: is_nonincreasing(&seminorms),
                seminorms,
            });
        }
        product = Some(p);
    }
    let final_seminorm = seminorms
        .last()
        .cloned()
        .ok_or_else(|| Error::Dimension("empty matrix sequence".into()))?;
    Ok(Certificate {
        converged: false,
        t_hit: None,
        final_seminorm,
        limit_row: None,
        nonincreasing: is_nonincreasing(&seminorms),
        seminorms,
    })
}

fn is_nonincreasing<S: Scalar>(xs: &[S]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}

pub const DEFAULT_PRODUCT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WolfowitzReport<S> {
    /// Product length, `n^2 + 1`.
    pub length: usize,
    pub products_checked: u128,
    pub max_seminorm: S,
    /// Indices into the set, in application order (`witness[0]` acts first).
    pub witness: Vec<usize>,
    /// Whether every enumerated product was ergodic.
    pub all_ergodic: bool,
    pub non_ergodic_witness: Option<Vec<usize>>,
}

/// Enumerates every product of `n^2 + 1` matrices drawn from `set` and
/// reports the largest seminorm.
pub fn wolfowitz_contraction<S: Scalar>(set: &[StochasticMatrix<S>], cap: u128) -> Result<WolfowitzReport<S>> {
    let n = set
        .first()
        .ok_or_else(|| Error::Dimension("empty matrix set".into()))?
        .n();
    if set.iter().any(|m| m.n() != n) {
        return Err(Error::Dimension("matrices in the set differ in size".into()));
    }
    let length = n * n + 1;
    let requested = (set.len() as u128).checked_pow(length as u32).unwrap_or(u128::MAX);
    if requested > cap {
        return Err(Error::EnumerationCap { requested, cap });
    }

    let mut report = WolfowitzReport {
        length,
        products_checked: 0,
        max_seminorm: S::zero(),
        witness: Vec::new(),
        all_ergodic: true,
        non_ergodic_witness: None,
    };
    let mut seq = Vec::with_capacity(length);
    let mut first = true;
    enumerate(set, length, None, &mut seq, &mut |seq, p| {
        let s = seminorm(p)?;
        report.products_checked += 1;
        if first || s > report.max_seminorm {
            report.max_seminorm = s;
            report.witness = seq.to_vec();
            first = false;
        }
        if report.all_ergodic && !is_ergodic(p) {
            report.all_ergodic = false;
            report.non_ergodic_witness = Some(seq.to_vec());
        }
        Ok(())
    })?;
    Ok(report)
}

type Visit<'a, S> = dyn FnMut(&[usize], &StochasticMatrix<S>) -> Result<()> + 'a;

fn enumerate<S: Scalar>(
    set: &[StochasticMatrix<S>],
    remaining: usize,
    prefix: Option<&StochasticMatrix<S>>,
    seq: &mut Vec<usize>,
    visit: &mut Visit<'_, S>,
) -> Result<()> {
    for (k, m) in set.iter().enumerate() {
        let p = match prefix {
            None => m.clone(),
            Some(p) => m.mul(p)?,
        };
        seq.push(k);
        if remaining == 1 {
            visit(seq, &p)?;
        } else {
            enumerate(set, remaining - 1, Some(&p), seq, visit)?;
        }
        seq.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::scalar::Rational;
    use crate::matrix::stochastic::from_ratios;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn lazy_flip() -> StochasticMatrix<Rational> {
        from_ratios(&[&[(1, 2), (1, 2)], &[(1, 1), (0, 1)]]).unwrap()
    }

    fn cyclic_perms() -> Vec<StochasticMatrix<Rational>> {
        vec![
            StochasticMatrix::permutation(&[0, 2, 1]),
            StochasticMatrix::permutation(&[2, 1, 0]),
            StochasticMatrix::permutation(&[1, 0, 2]),
        ]
    }

    #[test]
    fn chain_product_orientation() {
        let a = lazy_flip();
        assert_eq!(chain_product(std::slice::from_ref(&a)).unwrap(), a);
        let id = StochasticMatrix::identity(2);
        assert_eq!(chain_product(&[a.clone(), id.clone()]).unwrap(), a);
        assert_eq!(chain_product(&[id, a.clone()]).unwrap(), a);
        // A(2) A(1) A(0) swaps agents 1 and 3 and fixes agent 2.
        let p = chain_product(&cyclic_perms()).unwrap();
        assert_eq!(p, StochasticMatrix::permutation(&[2, 1, 0]));
        assert!(chain_product::<f64>(&[]).is_err());
        let mismatched = [lazy_flip(), StochasticMatrix::identity(3)];
        assert!(matches!(chain_product(&mismatched), Err(Error::Dimension(_))));
    }

    #[test]
    fn ergodicity_examples() {
        assert!(!is_ergodic(&StochasticMatrix::<Rational>::identity(3)));
        assert!(!is_ergodic(&StochasticMatrix::<Rational>::permutation(&[1, 0])));
        let a = lazy_flip();
        assert!(is_ergodic(&a));
        let sq = a.mul(&a).unwrap();
        assert!(sq.entries().iter().all(|x| x.is_positive()));
    }

    #[test]
    fn certificate_for_lazy_flip_powers() {
        let seq = vec![lazy_flip(); 60];
        let cert = convergence_certificate(&seq, &Rational::new(1.into(), 1_000_000_000.into())).unwrap();
        assert!(cert.converged);
        assert!(cert.nonincreasing);
        let row = cert.limit_row.unwrap();
        let err = |x: &Rational, y: Rational| (x.to_f64() - y.to_f64()).abs();
        assert!(err(&row[0], q(2, 3)) < 1e-9);
        assert!(err(&row[1], q(1, 3)) < 1e-9);
    }

    #[test]
    fn certificate_never_converges_for_identity_or_permutations() {
        let tol = q(1, 1000);
        let cert = convergence_certificate(&vec![StochasticMatrix::identity(3); 10], &tol).unwrap();
        assert!(!cert.converged);
        assert_eq!(cert.final_seminorm, q(1, 1));
        let perms: Vec<_> = cyclic_perms().into_iter().cycle().take(12).collect();
        let cert = convergence_certificate(&perms, &tol).unwrap();
        assert!(!cert.converged);
        assert!(cert.seminorms.iter().all(|s| *s == q(1, 1)));
        assert!(convergence_certificate(&perms, &q(0, 1)).is_err());
    }

    #[test]
    fn wolfowitz_examples() {
        let r = wolfowitz_contraction(&[lazy_flip()], DEFAULT_PRODUCT_CAP).unwrap();
        assert_eq!(r.length, 5);
        let a5 = chain_product(&vec![lazy_flip(); 5]).unwrap();
        assert_eq!(r.max_seminorm, seminorm(&a5).unwrap());
        assert!(r.max_seminorm < q(1, 1));
        assert!(r.all_ergodic);

        let r1 = StochasticMatrix::rank_one(&[q(1, 4), q(3, 4)]).unwrap();
        assert_eq!(wolfowitz_contraction(&[r1], 10).unwrap().max_seminorm, q(0, 1));

        let r = wolfowitz_contraction(&[StochasticMatrix::<Rational>::identity(2)], 10).unwrap();
        assert_eq!(r.max_seminorm, q(1, 1));
        assert!(!r.all_ergodic);
        assert_eq!(r.non_ergodic_witness, Some(vec![0; 5]));

        let pair = [lazy_flip(), StochasticMatrix::identity(2)];
        assert!(matches!(
            wolfowitz_contraction(&pair, 31),
            Err(Error::EnumerationCap { requested: 32, cap: 31 })
        ));
    }
}
