//! Contraction bounds on the augmented product `A_aug(c) ... A_aug(t0)` at
//! the checkpoint `c` each model prescribes.

use std::fmt;

use serde::Serialize;

use super::augmented::{build_augmented, head};
use super::support::{SupportState, SupportWalk};
use crate::error::{Error, Result};
use crate::matrix::{chain_product, erg_coeffs, render, seminorm, Scalar, StochasticMatrix, MAX_ENUMERATION_DIM};
use crate::trace::ScenarioTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum BoundKind {
    /// Checkpoint `t0 + Delta N^2 - 2N + 1`, bound `1 - alpha^(Delta N^2 - 2N + 1)`.
    Coordinated,
    /// Checkpoint `max_j theta_j`, bound `1 - N alpha^(Delta N)`.
    Decentralized,
    /// Checkpoint `max_j theta_j`, bound `1 - N alpha^(Phi Delta N)`.
    Granular { phi: usize },
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::Coordinated => write!(f, "coordinated"),
            BoundKind::Decentralized => write!(f, "decentralized"),
            BoundKind::Granular { phi } => write!(f, "granular(phi={phi})"),
        }
    }
}

impl BoundKind {
    pub fn exponent(&self, n: usize, delta: usize) -> usize {
        match self {
            BoundKind::Coordinated => (delta * n * n + 1).saturating_sub(2 * n),
            BoundKind::Decentralized => delta * n,
            BoundKind::Granular { phi } => phi * delta * n,
        }
    }

    /// Number of columns the bound counts as filled.
    pub fn factor(&self, n: usize) -> usize {
        match self {
            BoundKind::Coordinated => 1,
            _ => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundStatus {
    Verified,
    Violated,
    /// The checkpoint lies past the end of the trace.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundOptions {
    /// Lemma-level assertions inside the support tracker.
    pub checks: bool,
    /// How many steps past the checkpoint the `pi` floor is followed;
    /// `None` follows it to the end of the trace.
    pub pi_window: Option<usize>,
}

impl Default for BoundOptions {
    fn default() -> Self {
        BoundOptions {
            checks: true,
            pi_window: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub n: usize,
    pub delta: usize,
    pub t0: usize,
    pub horizon: usize,
    pub exponent: usize,
    pub bound: String,
    pub checkpoint: Option<usize>,
    pub theta: Vec<Option<usize>>,
    pub measured: Option<String>,
    /// Whether `measured` is the exact seminorm or the `lambda` upper bound
    /// (augmented dimension above the enumeration limit).
    pub measured_exact: bool,
    pub status: BoundStatus,
    /// Last time through which the `pi` floor was followed.
    pub pi_checked_until: Option<usize>,
    /// Failures of the auxiliary floors (support cardinality, `pi`).
    pub floor_failures: Vec<String>,
    pub note: String,
}

impl BoundReport {
    pub fn verified(&self) -> bool {
        self.status == BoundStatus::Verified
    }
}

fn power<S: Scalar>(base: &S, e: usize) -> S {
    (0..e).fold(S::one(), |acc, _| acc * base)
}

/// Seminorm of the product, or its `lambda` upper bound past the enumeration limit.
fn measure<S: Scalar>(p: &StochasticMatrix<S>) -> Result<(S, bool)> {
    if p.n() <= MAX_ENUMERATION_DIM {
        Ok((seminorm(p)?, true))
    } else {
        Ok((erg_coeffs(p).lambda, false))
    }
}

/// Full augmented product `A_aug(c) ... A_aug(t0)`.
pub fn augmented_product<S: Scalar>(trace: &ScenarioTrace<S>, t0: usize, c: usize) -> Result<StochasticMatrix<S>> {
    if c < t0 || c >= trace.horizon() {
        return Err(Error::param(
            "checkpoint",
            format!("{c} outside [{t0}, {})", trace.horizon()),
        ));
    }
    let seq = (t0..=c)
        .map(|t| {
            build_augmented(trace.matrix(t), trace.delays().slice(t), t, trace.delta()).map(|a| a.matrix().clone())
        })
        .collect::<Result<Vec<_>>>()?;
    chain_product(&seq)
}

pub fn verify_bound<S: Scalar>(
    trace: &ScenarioTrace<S>,
    t0: usize,
    kind: BoundKind,
    opts: BoundOptions,
) -> Result<BoundReport> {
    if let BoundKind::Granular { phi: 0 } = kind {
        return Err(Error::param("phi", "must be positive"));
    }
    let (n, delta, horizon) = (trace.n(), trace.delta(), trace.horizon());
    let exponent = kind.exponent(n, delta);
    let floor = power(trace.alpha(), exponent);
    let bound = S::one() - S::from_ratio(kind.factor(n) as i64, 1) * &floor;
    // Per-column floor on pi. Decay by at most alpha per step from
    // pi(t0) >= alpha only gives alpha^(e + 1) at the coordinated checkpoint.
    let pi_floor = match kind {
        BoundKind::Coordinated => floor.clone() * trace.alpha(),
        _ => floor.clone(),
    };

    let mut report = BoundReport {
        kind,
        n,
        delta,
        t0,
        horizon,
        exponent,
        bound: render(&bound),
        checkpoint: None,
        theta: vec![None; n],
        measured: None,
        measured_exact: true,
        status: BoundStatus::Inconclusive,
        pi_checked_until: None,
        floor_failures: Vec::new(),
        note: String::new(),
    };

    let coordinated_checkpoint = t0 + exponent;
    let mut checkpoint_state: Option<SupportState<S>> = None;
    let mut pi_until = None;
    for state in SupportWalk::new(trace, t0, opts.checks)? {
        let state = state?;
        let t = state.t();
        for j in state.full_columns() {
            report.theta[j].get_or_insert(t);
        }
        match kind {
            BoundKind::Coordinated => {
                if report.theta.iter().all(Option::is_none) && state.total_support() < n + t - t0 {
                    report.floor_failures.push(format!(
                        "t = {t}: |S^Delta| = {} below N + t - t0 = {}",
                        state.total_support(),
                        n + t - t0
                    ));
                }
                if t == coordinated_checkpoint {
                    for j in state.full_columns() {
                        if state.column(j).pi < pi_floor {
                            report.floor_failures.push(format!(
                                "t = {t}: pi_{j} = {} below alpha^{}",
                                state.column(j).pi,
                                exponent + 1
                            ));
                        }
                    }
                    checkpoint_state = Some(state);
                    break;
                }
            }
            _ => {
                let theta = report.theta.iter().copied().collect::<Option<Vec<_>>>();
                let Some(theta) = theta.and_then(|v| v.into_iter().max()) else {
                    continue;
                };
                for (j, c) in state.columns().iter().enumerate() {
                    if c.pi < pi_floor {
                        report
                            .floor_failures
                            .push(format!("t = {t}: pi_{j} = {} below alpha^{exponent}", c.pi));
                    }
                }
                pi_until = Some(t);
                if t == theta {
                    checkpoint_state = Some(state.clone());
                }
                if opts.pi_window.is_some_and(|w| t >= theta + w) {
                    break;
                }
            }
        }
    }
    report.pi_checked_until = pi_until;

    let Some(state) = checkpoint_state else {
        report.note = match kind {
            BoundKind::Coordinated => format!(
                "inconclusive: checkpoint {coordinated_checkpoint} is past the horizon {horizon}; extend horizon"
            ),
            _ => format!("inconclusive: some column never fills before the horizon {horizon}; extend horizon"),
        };
        return Ok(report);
    };
    let c = state.t();
    report.checkpoint = Some(c);
    let p = augmented_product(trace, t0, c)?;
    if opts.checks {
        for j in 0..n {
            let col: Vec<S> = p.column(head(delta, j)).cloned().collect();
            if col.iter().zip(&state.column(j).values()).any(|(x, y)| !x.near(y)) {
                return Err(Error::LemmaViolation {
                    t: c,
                    detail: format!("tracked column {j} disagrees with the full product"),
                });
            }
        }
    }
    let (measured, exact) = measure(&p)?;
    report.measured_exact = exact;
    report.status = if measured <= bound {
        BoundStatus::Verified
    } else {
        BoundStatus::Violated
    };
    report.measured = Some(render(&measured));
    if !exact {
        report.note = "measured value is lambda, an upper bound on the seminorm".into();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelaySchedule;
    use crate::matrix::{from_ratios, Rational};
    use crate::trace::TraceMeta;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn alternating(h: usize) -> ScenarioTrace<Rational> {
        let a = from_ratios(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]).unwrap();
        let b = from_ratios(&[&[(1, 1), (0, 1)], &[(1, 2), (1, 2)]]).unwrap();
        let ms = (0..h).map(|t| if t % 2 == 0 { a.clone() } else { b.clone() }).collect();
        ScenarioTrace::new(q(1, 2), ms, DelaySchedule::zero(2, h), TraceMeta::default()).unwrap()
    }

    #[test]
    fn exponents() {
        assert_eq!(BoundKind::Coordinated.exponent(3, 1), 4);
        assert_eq!(BoundKind::Coordinated.exponent(5, 3), 66);
        assert_eq!(BoundKind::Decentralized.exponent(3, 2), 6);
        assert_eq!(BoundKind::Granular { phi: 2 }.exponent(2, 1), 4);
    }

    #[test]
    fn coordinated_bound_on_oriented_steps() {
        let r = verify_bound(&alternating(6), 0, BoundKind::Coordinated, BoundOptions::default()).unwrap();
        assert_eq!(r.checkpoint, Some(1));
        assert_eq!(r.bound, "1/2");
        assert!(r.verified(), "{r:?}");
        assert!(r.floor_failures.is_empty());
    }

    #[test]
    fn granular_bound_at_theta() {
        let r = verify_bound(
            &alternating(8),
            0,
            BoundKind::Granular { phi: 2 },
            BoundOptions::default(),
        )
        .unwrap();
        assert_eq!(r.bound, "7/8");
        assert!(r.verified(), "{r:?}");
    }

    #[test]
    fn short_trace_is_inconclusive() {
        let r = verify_bound(&alternating(1), 0, BoundKind::Coordinated, BoundOptions::default()).unwrap();
        assert_eq!(r.status, BoundStatus::Inconclusive);
        assert!(r.note.contains("extend horizon"));
    }

    #[test]
    fn identity_never_fills() {
        let ms = vec![StochasticMatrix::<Rational>::identity(2); 5];
        let t = ScenarioTrace::new(q(1, 1), ms, DelaySchedule::zero(2, 5), TraceMeta::default()).unwrap();
        let r = verify_bound(&t, 0, BoundKind::Decentralized, BoundOptions::default()).unwrap();
        assert_eq!(r.status, BoundStatus::Inconclusive);
        assert_eq!(r.theta, vec![None, None]);
    }
}
