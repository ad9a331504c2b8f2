//! Positive supports of the head columns of `P(t) = A_aug(t) ... A_aug(t0)`.
//!
//! Only the `N` head columns of `P(t)` are carried, each advanced by a
//! matrix-vector product with the next augmented matrix; the full product is
//! formed separately where a seminorm is needed. For each agent `j` the
//! tracker keeps, for column `head(j)`:
//! the augmented support `{m : P[m][head j] > 0}`, the agent support
//! `{i : P[head i][head j] > 0}`, and `pi_j`, the smallest positive entry.
//! With checks enabled every step verifies the shift/averaging recurrences
//! and the monotonicity, decay and stationarity lemmas, returning
//! [`Error::LemmaViolation`] on the first failure.

use serde::Serialize;

use super::augmented::{build_augmented, head, is_head, slot, AugmentedMatrix};
use crate::error::{Error, Result};
use crate::graph::{comm_graph, is_j_oriented, Digraph};
use crate::matrix::Scalar;
use crate::trace::ScenarioTrace;

/// Column `head(j)` of `P(t)`, stored as lanes over a common unit
/// (integer numerators and `1/den` for rationals) so the per-step
/// matrix-vector product never reduces fractions.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSupport<S: Scalar> {
    lanes: Vec<S::Lane>,
    unit: S,
    pub augmented: Vec<bool>,
    pub agents: Vec<bool>,
    pub pi: S,
}

impl<S: Scalar> ColumnSupport<S> {
    fn of(lanes: Vec<S::Lane>, unit: S, delta: usize, n: usize) -> Self {
        let zero = S::lane_zero();
        let augmented: Vec<bool> = lanes.iter().map(|l| *l > zero).collect();
        let agents = (0..n).map(|i| augmented[head(delta, i)]).collect();
        let pi = lanes
            .iter()
            .filter(|l| **l > zero)
            .fold(None::<&S::Lane>, |acc, l| match acc {
                Some(a) if a <= l => Some(a),
                _ => Some(l),
            })
            .map(|l| S::from_lane(l, &unit))
            // An all-zero column can only arise without self-loops.
            .unwrap_or_else(S::zero);
        ColumnSupport {
            lanes,
            unit,
            augmented,
            agents,
            pi,
        }
    }

    fn from_values(values: &[S], delta: usize, n: usize) -> Self {
        let (lanes, unit) = S::to_lanes(values);
        Self::of(lanes, unit, delta, n)
    }

    pub fn values(&self) -> Vec<S> {
        self.lanes.iter().map(|l| S::from_lane(l, &self.unit)).collect()
    }

    pub fn value(&self, m: usize) -> S {
        S::from_lane(&self.lanes[m], &self.unit)
    }

    pub fn augmented_size(&self) -> usize {
        self.augmented.iter().filter(|&&b| b).count()
    }

    pub fn is_full(&self) -> bool {
        self.augmented.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportState<S: Scalar> {
    t0: usize,
    t: usize,
    n: usize,
    delta: usize,
    alpha: Option<S>,
    checks: bool,
    /// Whether `A(t0)` has a positive diagonal; some lemmas lean on it.
    origin_self_loops: bool,
    columns: Vec<ColumnSupport<S>>,
}

impl<S: Scalar> SupportState<S> {
    /// Starts the product at `P(t0) = A_aug(t0)`.
    pub fn start(first: &AugmentedMatrix<S>, checks: bool) -> Result<Self> {
        let (t0, delta, n) = (first.t(), first.delta(), first.base_n());
        if t0 + 1 < delta {
            return Err(Error::param("t0", format!("{t0} is below delta - 1 = {}", delta - 1)));
        }
        let columns = (0..n)
            .map(|j| {
                let col: Vec<S> = first.matrix().column(head(delta, j)).cloned().collect();
                ColumnSupport::from_values(&col, delta, n)
            })
            .collect();
        let state = SupportState {
            t0,
            t: t0,
            n,
            delta,
            alpha: first.base().alpha().cloned(),
            checks,
            origin_self_loops: first.base().has_self_loops(),
            columns,
        };
        if checks && state.origin_self_loops {
            for (j, c) in state.columns.iter().enumerate() {
                if !c.augmented[head(delta, j)] {
                    return Err(state.violation(format!("head slot of agent {j} missing from its own column at t0")));
                }
            }
        }
        Ok(state)
    }

    pub fn t0(&self) -> usize {
        self.t0
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn columns(&self) -> &[ColumnSupport<S>] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &ColumnSupport<S> {
        &self.columns[j]
    }

    /// `|S^Delta(t)|`, summed over the per-agent supports.
    pub fn total_support(&self) -> usize {
        self.columns.iter().map(ColumnSupport::augmented_size).sum()
    }

    pub fn full_columns(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.columns[j].is_full()).collect()
    }

    fn violation(&self, detail: String) -> Error {
        Error::LemmaViolation { t: self.t, detail }
    }

    /// Head columns of `P(t+1) = A_aug(t+1) P(t)` and their supports.
    pub fn advance(&self, next: &AugmentedMatrix<S>) -> Result<Self> {
        if next.base_n() != self.n || next.delta() != self.delta {
            return Err(Error::Dimension(
                "augmented matrix does not match the tracked product".into(),
            ));
        }
        if next.t() != self.t + 1 {
            return Err(Error::param(
                "next",
                format!("expected the matrix for t = {}, got t = {}", self.t + 1, next.t()),
            ));
        }
        let dim = self.delta * self.n;
        let (m_lanes, m_unit) = S::to_lanes(next.matrix().entries());
        let zero = S::lane_zero();
        let columns = self
            .columns
            .iter()
            .map(|c| {
                let lanes = (0..dim)
                    .map(|r| {
                        let mut acc = S::lane_zero();
                        for (w, x) in m_lanes[r * dim..(r + 1) * dim].iter().zip(&c.lanes) {
                            if *w != zero {
                                acc += &(w.clone() * x);
                            }
                        }
                        acc
                    })
                    .collect();
                ColumnSupport::of(lanes, m_unit.clone() * &c.unit, self.delta, self.n)
            })
            .collect();
        let after = SupportState {
            t0: self.t0,
            t: self.t + 1,
            n: self.n,
            delta: self.delta,
            alpha: self.alpha.clone(),
            checks: self.checks,
            origin_self_loops: self.origin_self_loops,
            columns,
        };
        if self.checks {
            self.check_recurrences(&after, next)?;
            self.check_lemmas(&after, next)?;
            let report = stationarity_checks(self, &after, &comm_graph(next.base()));
            if let Some(v) = report.violations(next.base().has_self_loops()).first() {
                return Err(after.violation(v.clone()));
            }
        }
        Ok(after)
    }

    /// Shift rows copy the next slot's entry; head rows satisfy the
    /// delayed averaging recurrence, recomputed from `A(t+1)` and its lags
    /// rather than from the augmented matrix.
    fn check_recurrences(&self, after: &Self, next: &AugmentedMatrix<S>) -> Result<()> {
        let (d, n) = (self.delta, self.n);
        let mut base: Vec<S> = next.base().entries().to_vec();
        base.push(S::one());
        let (w, unit) = S::to_lanes(&base);
        let one = &w[n * n];
        let zero = S::lane_zero();
        for (j, (b, a)) in self.columns.iter().zip(&after.columns).enumerate() {
            if !(unit.clone() * &b.unit).near(&a.unit) {
                return Err(after.violation(format!("column {j} lost its common scale")));
            }
            for m in 0..d * n {
                if !is_head(d, m) {
                    if !S::lane_near(&a.lanes[m], &(one.clone() * &b.lanes[m + 1])) {
                        return Err(after.violation(format!("shift recurrence fails at row {m}, column {j}")));
                    }
                    continue;
                }
                let i = m / d;
                let mut expected = S::lane_zero();
                for k in 0..n {
                    let wik = &w[i * n + k];
                    if *wik != zero {
                        expected += &(wik.clone() * &b.lanes[slot(d, k, next.lag(i, k))]);
                    }
                }
                if !S::lane_near(&expected, &a.lanes[m]) {
                    return Err(after.violation(format!(
                        "averaging recurrence fails at agent {i}, column {j}: {} vs {}",
                        a.value(m),
                        S::from_lane(&expected, &a.unit)
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_lemmas(&self, after: &Self, next: &AugmentedMatrix<S>) -> Result<()> {
        if !next.base().has_self_loops() {
            return Ok(());
        }
        for (j, (b, a)) in self.columns.iter().zip(&after.columns).enumerate() {
            if b.agents.iter().zip(&a.agents).any(|(&x, &y)| x && !y) {
                return Err(after.violation(format!("agent support of column {j} shrank")));
            }
            if self.origin_self_loops && b.augmented.iter().zip(&a.augmented).any(|(&x, &y)| x && !y) {
                return Err(after.violation(format!("augmented support of column {j} shrank")));
            }
            if let Some(alpha) = &self.alpha {
                if a.pi < alpha.clone() * &b.pi {
                    return Err(after.violation(format!(
                        "pi_{j} fell from {} to {}, below alpha times its previous value",
                        b.pi, a.pi
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColumnStationarity {
    /// Augmented support unchanged between the two states.
    pub stalled: bool,
    /// Agent support had no incoming edge in `G(t+1)`.
    pub no_incoming: bool,
    /// Agent support had no outgoing edge in `G(t+1)`.
    pub no_outgoing: bool,
    /// Every slot of every supported agent's block was positive at `t`.
    pub block_positive: bool,
    pub pi_nondecreasing: bool,
    pub full: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StationarityReport {
    pub t: usize,
    pub columns: Vec<ColumnStationarity>,
    /// All augmented supports unchanged.
    pub all_stalled: bool,
    /// Agents `j` for which `G(t+1)` is `j`-oriented.
    pub oriented_toward: Vec<usize>,
}

impl StationarityReport {
    /// Failed conclusions. `self_loops` states whether `A(t+1)` has a positive
    /// diagonal; the pi conclusion depends on it.
    pub fn violations(&self, self_loops: bool) -> Vec<String> {
        let mut out = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            if !c.stalled {
                continue;
            }
            if !c.no_incoming {
                out.push(format!("column {j} stalled but its agent support has an incoming edge"));
            }
            if !c.block_positive {
                out.push(format!(
                    "column {j} stalled but a supported block is not fully positive"
                ));
            }
            if self_loops && c.no_outgoing && !c.pi_nondecreasing {
                out.push(format!("column {j} stalled with no outgoing edge but pi decreased"));
            }
        }
        if self.all_stalled {
            for &j in &self.oriented_toward {
                if !self.columns[j].full {
                    out.push(format!(
                        "supports stalled under a {j}-oriented graph but column {j} is not full"
                    ));
                }
            }
        }
        out
    }
}

/// Evaluates the stationarity conclusions between consecutive states.
pub fn stationarity_checks<S: Scalar>(
    before: &SupportState<S>,
    after: &SupportState<S>,
    g_next: &Digraph,
) -> StationarityReport {
    let (d, n) = (before.delta, before.n);
    let columns: Vec<ColumnStationarity> = before
        .columns
        .iter()
        .zip(&after.columns)
        .map(|(b, a)| {
            let support = &b.agents;
            let mut no_incoming = true;
            let mut no_outgoing = true;
            for (u, v) in g_next.edges() {
                match (support[u], support[v]) {
                    (false, true) => no_incoming = false,
                    (true, false) => no_outgoing = false,
                    _ => {}
                }
            }
            let block_positive = (0..n)
                .filter(|&i| support[i])
                .all(|i| (d * i..d * (i + 1)).all(|m| b.augmented[m]));
            ColumnStationarity {
                stalled: b.augmented == a.augmented,
                no_incoming,
                no_outgoing,
                block_positive,
                pi_nondecreasing: a.pi >= b.pi,
                full: b.is_full(),
            }
        })
        .collect();
    let all_stalled = columns.iter().all(|c| c.stalled);
    let oriented_toward = (0..n).filter(|&j| is_j_oriented(g_next, j).unwrap_or(false)).collect();
    StationarityReport {
        t: before.t,
        columns,
        all_stalled,
        oriented_toward,
    }
}

/// Iterates `P(t0), P(t0+1), ..., P(last)` over a trace.
pub struct SupportWalk<'a, S: Scalar> {
    trace: &'a ScenarioTrace<S>,
    state: Option<SupportState<S>>,
    t0: usize,
    last: usize,
    checks: bool,
    failed: bool,
}

impl<'a, S: Scalar> SupportWalk<'a, S> {
    pub fn new(trace: &'a ScenarioTrace<S>, t0: usize, checks: bool) -> Result<Self> {
        if t0 + 1 < trace.delta() {
            return Err(Error::param(
                "t0",
                format!("{t0} is below delta - 1 = {}", trace.delta() - 1),
            ));
        }
        if t0 >= trace.horizon() {
            return Err(Error::param(
                "t0",
                format!("{t0} is not inside the trace horizon {}", trace.horizon()),
            ));
        }
        Ok(SupportWalk {
            trace,
            state: None,
            t0,
            last: trace.horizon() - 1,
            checks,
            failed: false,
        })
    }

    fn augmented(&self, t: usize) -> Result<AugmentedMatrix<S>> {
        build_augmented(
            self.trace.matrix(t),
            self.trace.delays().slice(t),
            t,
            self.trace.delta(),
        )
    }
}

impl<S: Scalar> Iterator for SupportWalk<'_, S> {
    type Item = Result<SupportState<S>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let next = match &self.state {
            None => self
                .augmented(self.t0)
                .and_then(|a| SupportState::start(&a, self.checks)),
            Some(s) if s.t() >= self.last => return None,
            Some(s) => self.augmented(s.t() + 1).and_then(|a| s.advance(&a)),
        };
        match next {
            Ok(s) => {
                self.state = Some(s.clone());
                Some(Ok(s))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThetaReport {
    pub t0: usize,
    pub horizon: usize,
    /// Earliest `t` at which column `head(j)` of `P(t)` is entirely positive.
    pub theta: Vec<Option<usize>>,
}

impl ThetaReport {
    /// `max_j theta_j`, if every column filled.
    pub fn max_theta(&self) -> Option<usize> {
        self.theta
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()?
            .into_iter()
            .max()
    }

    pub fn earliest(&self) -> Option<(usize, usize)> {
        self.theta
            .iter()
            .enumerate()
            .filter_map(|(j, t)| t.map(|t| (j, t)))
            .min_by_key(|&(j, t)| (t, j))
    }
}

/// Scans the trace from `t0` for the first time each head column fills.
pub fn first_positive_column<S: Scalar>(trace: &ScenarioTrace<S>, t0: usize, checks: bool) -> Result<ThetaReport> {
    let mut theta = vec![None; trace.n()];
    for state in SupportWalk::new(trace, t0, checks)? {
        let state = state?;
        for j in state.full_columns() {
            theta[j].get_or_insert(state.t());
        }
        if theta.iter().all(Option::is_some) {
            break;
        }
    }
    Ok(ThetaReport {
        t0,
        horizon: trace.horizon(),
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelaySchedule;
    use crate::matrix::{from_ratios, Rational, StochasticMatrix};
    use crate::trace::TraceMeta;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn trace_of(ms: Vec<StochasticMatrix<Rational>>, alpha: Rational) -> ScenarioTrace<Rational> {
        let n = ms[0].n();
        let h = ms.len();
        ScenarioTrace::new(alpha, ms, DelaySchedule::zero(n, h), TraceMeta::default()).unwrap()
    }

    #[test]
    fn own_head_is_supported_from_t0() {
        let a = from_ratios::<Rational>(&[
            &[(1, 2), (1, 2), (0, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(1, 4), (1, 4), (1, 2)],
        ])
        .unwrap();
        let t = trace_of(vec![a; 3], q(1, 4));
        let s = SupportWalk::new(&t, 0, true).unwrap().next().unwrap().unwrap();
        for j in 0..3 {
            assert!(s.column(j).augmented[j]);
        }
    }

    #[test]
    fn identity_steps_keep_supports_fixed() {
        let t = trace_of(vec![StochasticMatrix::identity(3); 5], q(1, 1));
        let states: Vec<_> = SupportWalk::new(&t, 0, true).unwrap().collect::<Result<_>>().unwrap();
        assert_eq!(states.len(), 5);
        for s in &states {
            for j in 0..3 {
                assert_eq!(s.column(j).augmented_size(), 1);
                assert_eq!(s.column(j).pi, q(1, 1));
            }
        }
        let report = stationarity_checks(&states[0], &states[1], &t.graph(1));
        assert!(report.violations(true).is_empty());
        assert!(report.all_stalled);
    }

    #[test]
    fn positive_matrix_fills_every_column_at_t0() {
        let t = trace_of(vec![StochasticMatrix::uniform(3); 2], q(1, 3));
        let r = first_positive_column(&t, 0, true).unwrap();
        assert_eq!(r.theta, vec![Some(0); 3]);
        assert_eq!(r.max_theta(), Some(0));
    }

    #[test]
    fn t0_below_delta_minus_one_is_rejected() {
        let a = StochasticMatrix::<Rational>::identity(2);
        let d = DelaySchedule::new(2, 3, (0..4).map(|t| vec![vec![t; 2]; 2]).collect()).unwrap();
        let t = ScenarioTrace::new(q(1, 1), vec![a; 4], d, TraceMeta::default()).unwrap();
        assert!(first_positive_column(&t, 1, true).is_err());
        assert!(first_positive_column(&t, 2, true).is_ok());
    }

    #[test]
    fn tampered_step_is_reported() {
        let t = trace_of(vec![StochasticMatrix::uniform(2); 3], q(1, 2));
        let mut walk = SupportWalk::new(&t, 0, true).unwrap();
        let s0 = walk.next().unwrap().unwrap();
        let a1 = build_augmented(t.matrix(1), t.delays().slice(1), 1, 1).unwrap();
        let mut forged = s0.advance(&a1).unwrap();
        // Pretend column 0 lost support to trip the monotonicity check.
        forged.columns[0].agents[1] = false;
        forged.columns[0].augmented[1] = false;
        assert!(s0.check_lemmas(&forged, &a1).is_err());
    }
}
