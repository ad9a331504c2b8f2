//! Two three-agent traces that satisfy most hypotheses yet do not converge.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::delay::DelaySchedule;
use crate::error::{Error, Result};
use crate::matrix::{from_ratios, render, Rational, Scalar, StochasticMatrix};
use crate::sim::{run_delayed, Trajectory};
use crate::trace::{ScenarioTrace, TraceMeta};

fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

/// Three rotating permutation matrices without self-loops; every three
/// steps they swap agents 0 and 2 and fix agent 1.
pub fn counterexample_permutation(horizon: usize) -> ScenarioTrace<Rational> {
    let cycle = [
        StochasticMatrix::permutation(&[0, 2, 1]),
        StochasticMatrix::permutation(&[2, 1, 0]),
        StochasticMatrix::permutation(&[1, 0, 2]),
    ];
    let matrices = (0..horizon).map(|t| cycle[t % 3].clone()).collect();
    let meta = TraceMeta {
        generator: "permutation".into(),
        seed: None,
        violates_a2: true,
        period: Some(3),
        params: BTreeMap::from([("horizon".to_string(), horizon.to_string())]),
    };
    ScenarioTrace::new(Rational::one(), matrices, DelaySchedule::zero(3, horizon), meta)
        .expect("permutation trace is valid")
}

/// `A_1`: agent 0 averages with agent 2; `A_2`: agent 2 with agent 1;
/// `A_3`: agent 1 with agent 0.
fn shifting_matrices() -> [StochasticMatrix<Rational>; 3] {
    [
        from_ratios(&[
            &[(1, 2), (0, 1), (1, 2)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]),
        from_ratios(&[
            &[(1, 1), (0, 1), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (1, 2), (1, 2)],
        ]),
        from_ratios(&[
            &[(1, 1), (0, 1), (0, 1)],
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]),
    ]
    .map(|r| r.expect("fixed matrices are stochastic"))
}

/// Agent whose row `A_k` changes.
const ACTIVE: [usize; 3] = [0, 2, 1];

/// `eps_n = (2/5) 2^-n`, so the budget sum stays below `2/5`.
pub fn default_eps(count: usize) -> Vec<Rational> {
    (1..=count)
        .map(|k| q(2, 5) / Rational::from_integer(num_bigint::BigInt::from(2u8).pow(k as u32)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftingRun {
    pub trace: ScenarioTrace<Rational>,
    pub trajectory: Trajectory<Rational>,
    /// Phase boundaries `t_0 = 0 < t_1 < ... < t_P`; phase `p` covers `[t_{p-1}, t_p)`.
    pub boundaries: Vec<usize>,
    /// Sum of the epsilons used.
    pub ell: Rational,
}

impl ShiftingRun {
    /// Per agent, how many phase boundaries see its value above `high` and
    /// how many below `low`.
    pub fn boundary_counts(&self, high: &Rational, low: &Rational) -> Vec<(usize, usize)> {
        (0..3)
            .map(|i| {
                let xs = self.boundaries.iter().map(|&t| &self.trajectory.at(t)[i]);
                let above = xs.clone().filter(|v| *v > high).count();
                let below = xs.filter(|v| *v < low).count();
                (above, below)
            })
            .collect()
    }
}

/// Longest a phase may take before the target is declared unreachable.
const PHASE_CAP: usize = 100_000;

/// Adaptive schedule over `A_1, A_2, A_3` (cycled) from `x(0) = (0, 1, 0)`.
///
/// Phase 1 is a single `A_1` step (agent 0 averages two zeros). From phase 2
/// on, even phases raise the active agent to at least `1 - L_m` and odd
/// phases lower it to at most `L_m`, where `m = p / 2` and `L_m` is the sum
/// of the first `m` epsilons. Each phase stops at the first step reaching
/// its target.
pub fn counterexample_shifting(eps: &[Rational], phases: usize) -> Result<ShiftingRun> {
    if phases == 0 {
        return Err(Error::param("phases", "must be at least 1"));
    }
    let needed = phases / 2;
    if eps.len() < needed {
        return Err(Error::param(
            "eps",
            format!("{phases} phases need {needed} epsilons, got {}", eps.len()),
        ));
    }
    if eps.iter().any(|e| !e.is_positive()) {
        return Err(Error::param("eps", "every epsilon must be positive"));
    }
    let ell = eps.iter().fold(Rational::zero(), |s, e| s + e);
    if ell >= q(1, 2) {
        return Err(Error::param("eps", format!("sum {} is not below 1/2", render(&ell))));
    }
    let mats = shifting_matrices();
    let mut x = vec![q(0, 1), q(1, 1), q(0, 1)];
    let mut seq: Vec<usize> = vec![0];
    x = mats[0].apply(&x)?;
    let mut boundaries = vec![0, 1];
    let mut budget = Rational::zero();
    for p in 2..=phases {
        let k = (p - 1) % 3;
        let a = ACTIVE[k];
        if p % 2 == 0 {
            budget += &eps[p / 2 - 1];
        }
        let raise = p % 2 == 0;
        let target = if raise {
            Rational::one() - &budget
        } else {
            budget.clone()
        };
        let mut steps = 0;
        loop {
            x = mats[k].apply(&x)?;
            seq.push(k);
            steps += 1;
            let reached = if raise { x[a] >= target } else { x[a] <= target };
            if reached {
                break;
            }
            if steps >= PHASE_CAP {
                return Err(Error::param(
                    "eps",
                    format!("phase {p} did not reach {} within {PHASE_CAP} steps", render(&target)),
                ));
            }
        }
        boundaries.push(boundaries.last().expect("non-empty") + steps);
    }

    let horizon = seq.len();
    let matrices = seq.iter().map(|&k| mats[k].clone()).collect();
    let mut params = BTreeMap::new();
    params.insert("phases".to_string(), phases.to_string());
    params.insert("eps".to_string(), eps.iter().map(render).collect::<Vec<_>>().join(","));
    params.insert(
        "boundaries".to_string(),
        boundaries.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
    );
    let meta = TraceMeta {
        generator: "shifting".into(),
        seed: None,
        violates_a2: false,
        period: None,
        params,
    };
    let trace = ScenarioTrace::new(q(1, 2), matrices, DelaySchedule::zero(3, horizon), meta)?;
    let trajectory = run_delayed(&trace, &[q(0, 1), q(1, 1), q(0, 1)])?;
    debug_assert_eq!(trajectory.last(), x.as_slice());
    Ok(ShiftingRun {
        trace,
        trajectory,
        boundaries,
        ell,
    })
}
