//! Running the delayed recursion and its augmented zero-delay form.

use serde::Serialize;
use serde_json::{json, Value};

use crate::delay::{build_augmented, slot};
use crate::error::{Error, Result};
use crate::matrix::{osc, render, Scalar};
use crate::trace::ScenarioTrace;

/// States `x(start), x(start + 1), ..., x(start + len - 1)`.
///
/// `window` is how many consecutive states the monotone envelope spans:
/// `Delta` for the delayed recursion, 1 for augmented vectors, which
/// already hold a whole window.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    start: usize,
    window: usize,
    states: Vec<Vec<S>>,
    osc_log: Vec<S>,
}

impl<S: Scalar> Trajectory<S> {
    fn new(start: usize, window: usize, states: Vec<Vec<S>>) -> Result<Self> {
        let osc_log = states.iter().map(|x| osc(x)).collect::<Result<_>>()?;
        Ok(Trajectory {
            start,
            window,
            states,
            osc_log,
        })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Last time with a stored state.
    pub fn end(&self) -> usize {
        self.start + self.states.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn states(&self) -> &[Vec<S>] {
        &self.states
    }

    /// State at absolute time `t`.
    pub fn at(&self, t: usize) -> &[S] {
        &self.states[t - self.start]
    }

    pub fn osc_log(&self) -> &[S] {
        &self.osc_log
    }

    pub fn last(&self) -> &[S] {
        self.states.last().expect("trajectories are never empty")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 1..=self.dim() {
            out.push_str(&format!(",x_{i}"));
        }
        out.push_str(",osc\n");
        for (k, (x, o)) in self.states.iter().zip(&self.osc_log).enumerate() {
            out.push_str(&(self.start + k).to_string());
            for v in x {
                out.push(',');
                out.push_str(&render(v));
            }
            out.push(',');
            out.push_str(&render(o));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "v1",
            "mode": S::MODE,
            "start": self.start,
            "rows": self.states.iter().zip(&self.osc_log).enumerate().map(|(k, (x, o))| json!({
                "t": self.start + k,
                "x": x.iter().map(Scalar::to_json).collect::<Vec<_>>(),
                "osc": o.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn check_x0<S>(trace: &ScenarioTrace<S>, x0: &[S]) -> Result<()>
where
    S: Scalar,
{
    if x0.len() != trace.n() {
        return Err(Error::Dimension(format!(
            "x0 has {} entries for {} agents",
            x0.len(),
            trace.n()
        )));
    }
    Ok(())
}

fn delayed_states<S: Scalar>(trace: &ScenarioTrace<S>, x0: &[S], steps: usize) -> Vec<Vec<S>> {
    let n = trace.n();
    let mut xs = Vec::with_capacity(steps + 1);
    xs.push(x0.to_vec());
    for t in 0..steps {
        let a = trace.matrix(t);
        let next = (0..n)
            .map(|i| {
                (0..n).fold(S::zero(), |acc, j| {
                    let w = a.get(i, j);
                    if w.is_zero() {
                        acc
                    } else {
                        acc + w.clone() * &xs[trace.delays().tau(t, i, j)][j]
                    }
                })
            })
            .collect();
        xs.push(next);
    }
    xs
}

/// `x_i(t+1) = sum_j A_ij(t) x_j(tau_ij(t))` for `t < horizon`.
pub fn run_delayed<S: Scalar>(trace: &ScenarioTrace<S>, x0: &[S]) -> Result<Trajectory<S>> {
    check_x0(trace, x0)?;
    Trajectory::new(0, trace.delta(), delayed_states(trace, x0, trace.horizon()))
}

/// `X(t+1) = A_aug(t) X(t)` from `t = Delta - 1`, the first time a full
/// window of past values exists; earlier steps run the delayed recursion.
pub fn run_augmented<S: Scalar>(trace: &ScenarioTrace<S>, x0: &[S]) -> Result<Trajectory<S>> {
    check_x0(trace, x0)?;
    let (n, d) = (trace.n(), trace.delta());
    let start = d - 1;
    if trace.horizon() < start {
        return Err(Error::InvalidTrace(format!(
            "horizon {} shorter than delta - 1 = {start}",
            trace.horizon()
        )));
    }
    let prefix = delayed_states(trace, x0, start);
    let mut big = vec![S::zero(); d * n];
    for i in 0..n {
        for lag in 1..=d {
            big[slot(d, i, lag)] = prefix[start + 1 - lag][i].clone();
        }
    }
    let mut states = Vec::with_capacity(trace.horizon() - start + 1);
    states.push(big);
    for t in start..trace.horizon() {
        let aug = build_augmented(trace.matrix(t), trace.delays().slice(t), t, d)?;
        let next = aug.matrix().apply(states.last().expect("non-empty"))?;
        states.push(next);
    }
    Trajectory::new(start, 1, states)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// Largest `|x_i(t - lag + 1) - X(t)[slot(i, lag)]|` over all `t >= Delta - 1`.
    pub max_abs_gap: String,
    pub max_abs_gap_f64: f64,
    pub steps_compared: usize,
    /// Exact mode: gap is zero. Float mode: gap within `1e-12 * osc(x0)`
    /// (`max |x0|` when `x0` is constant).
    pub within_tolerance: bool,
}

fn abs_diff<S: Scalar>(a: &S, b: &S) -> S {
    if a > b {
        a.clone() - b
    } else {
        b.clone() - a
    }
}

pub fn equivalence_check<S: Scalar>(trace: &ScenarioTrace<S>, x0: &[S]) -> Result<EquivalenceReport> {
    let delayed = run_delayed(trace, x0)?;
    let aug = run_augmented(trace, x0)?;
    let (n, d) = (trace.n(), trace.delta());
    let mut gap = S::zero();
    for t in aug.start()..=aug.end() {
        let big = aug.at(t);
        for i in 0..n {
            for lag in 1..=d {
                let g = abs_diff(&delayed.at(t + 1 - lag)[i], &big[slot(d, i, lag)]);
                if g > gap {
                    gap = g;
                }
            }
        }
    }
    let within_tolerance = match S::MODE {
        crate::matrix::Mode::Rational => gap.is_zero(),
        crate::matrix::Mode::Float => {
            let spread = osc(x0)?.to_f64();
            let scale = if spread > 0.0 {
                spread
            } else {
                x0.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
            };
            gap.to_f64() <= 1e-12 * scale
        }
    };
    Ok(EquivalenceReport {
        max_abs_gap_f64: gap.to_f64(),
        max_abs_gap: render(&gap),
        steps_compared: aug.end() - aug.start() + 1,
        within_tolerance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsensusVerdict {
    pub converged: bool,
    pub t_hit: Option<usize>,
    /// `(max + min) / 2` at `t_hit`.
    pub limit: Option<String>,
    pub limit_f64: Option<f64>,
    /// Last time simulated; a negative verdict only covers `[start, horizon]`.
    pub horizon: usize,
    pub final_osc: String,
    /// Window maxima never increase and window minima never decrease.
    pub window_max_nonincreasing: bool,
    pub window_min_nondecreasing: bool,
}

fn weakly_le<S: Scalar>(a: &S, b: &S) -> bool {
    a <= b || a.near(b)
}

pub fn consensus_verdict<S: Scalar>(traj: &Trajectory<S>, tol: &S) -> Result<ConsensusVerdict> {
    if !tol.is_positive() {
        return Err(Error::param("tol", "must be positive"));
    }
    let hit = traj.osc_log.iter().position(|o| o < tol);
    let limit = hit.map(|k| {
        let x = &traj.states[k];
        let lo = x.iter().fold(&x[0], |m, v| if v < m { v } else { m });
        let hi = x.iter().fold(&x[0], |m, v| if v > m { v } else { m });
        (lo.clone() + hi) / S::from_ratio(2, 1)
    });

    let extremes: Vec<(S, S)> = traj
        .states
        .iter()
        .map(|x| {
            let lo = x.iter().fold(&x[0], |m, v| if v < m { v } else { m });
            let hi = x.iter().fold(&x[0], |m, v| if v > m { v } else { m });
            (lo.clone(), hi.clone())
        })
        .collect();
    let windowed = |k: usize| {
        let from = k.saturating_sub(traj.window - 1);
        let w = &extremes[from..=k];
        let lo = w.iter().map(|e| &e.0).fold(&w[0].0, |m, v| if v < m { v } else { m });
        let hi = w.iter().map(|e| &e.1).fold(&w[0].1, |m, v| if v > m { v } else { m });
        (lo.clone(), hi.clone())
    };
    let mut max_ok = true;
    let mut min_ok = true;
    let mut prev = windowed(0);
    for k in 1..extremes.len() {
        let cur = windowed(k);
        max_ok &= weakly_le(&cur.1, &prev.1);
        min_ok &= weakly_le(&prev.0, &cur.0);
        prev = cur;
    }
    Ok(ConsensusVerdict {
        converged: hit.is_some(),
        t_hit: hit.map(|k| traj.start + k),
        limit_f64: limit.as_ref().map(Scalar::to_f64),
        limit: limit.as_ref().map(render),
        horizon: traj.end(),
        final_osc: render(traj.osc_log.last().expect("non-empty")),
        window_max_nonincreasing: max_ok,
        window_min_nondecreasing: min_ok,
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

    fn half_upper() -> StochasticMatrix<Rational> {
        from_ratios(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]]).unwrap()
    }

    fn trace(h: usize, delays: DelaySchedule) -> ScenarioTrace<Rational> {
        ScenarioTrace::new(q(1, 2), vec![half_upper(); h], delays, TraceMeta::default()).unwrap()
    }

    #[test]
    fn single_step() {
        let t = trace(1, DelaySchedule::zero(2, 1));
        let traj = run_delayed(&t, &[q(0, 1), q(1, 1)]).unwrap();
        assert_eq!(traj.at(1), &[q(1, 2), q(1, 1)]);
    }

    #[test]
    fn constants_are_fixed() {
        let t = trace(6, DelaySchedule::zero(2, 6));
        let c = vec![q(7, 3); 2];
        let traj = run_delayed(&t, &c).unwrap();
        assert!(traj.states().iter().all(|x| x == &c));
        let v = consensus_verdict(&traj, &q(1, 1000)).unwrap();
        assert_eq!((v.converged, v.t_hit), (true, Some(0)));
        assert_eq!(v.limit.as_deref(), Some("7/3"));
    }

    #[test]
    fn augmented_head_matches_delayed() {
        // Agent 0 always reads agent 1 one step late.
        let tau = (0..6)
            .map(|t: usize| vec![vec![t, t.saturating_sub(1)], vec![t, t]])
            .collect();
        let d = DelaySchedule::new(2, 2, tau).unwrap();
        let t = trace(6, d);
        let x0 = [q(0, 1), q(1, 1)];
        let delayed = run_delayed(&t, &x0).unwrap();
        let aug = run_augmented(&t, &x0).unwrap();
        assert_eq!(aug.start(), 1);
        for s in 1..=6 {
            for i in 0..2 {
                assert_eq!(aug.at(s)[slot(2, i, 1)], delayed.at(s)[i]);
            }
        }
        let r = equivalence_check(&t, &x0).unwrap();
        assert!(r.within_tolerance);
        assert_eq!(r.max_abs_gap, "0/1");
    }

    #[test]
    fn csv_header_and_rationals() {
        let t = trace(1, DelaySchedule::zero(2, 1));
        let csv = run_delayed(&t, &[q(0, 1), q(1, 1)]).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,x_1,x_2,osc");
        assert_eq!(lines[1], "0,0/1,1/1,1/1");
        assert_eq!(lines[2], "1,1/2,1/1,1/2");
    }

    #[test]
    fn tolerance_must_be_positive() {
        let t = trace(1, DelaySchedule::zero(2, 1));
        let traj = run_delayed(&t, &[q(0, 1), q(1, 1)]).unwrap();
        assert!(consensus_verdict(&traj, &q(0, 1)).is_err());
    }

    #[test]
    fn wrong_length_x0() {
        let t = trace(1, DelaySchedule::zero(2, 1));
        assert!(matches!(run_delayed(&t, &[q(0, 1)]), Err(Error::Dimension(_))));
    }
}
