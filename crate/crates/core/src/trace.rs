//! Scenario traces: a finite run of weight matrices and delays, shared by the
//! simulator, the monitors and the contraction-bound checks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::delay::{validate_delays, DelaySchedule};
use crate::error::{Error, Result};
use crate::graph::{comm_graph, Digraph};
use crate::matrix::{Mode, Rational, Scalar, StochasticMatrix};

pub const SCHEMA: &str = "v1";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub generator: String,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Set on traces that deliberately drop the self-loop assumption.
    #[serde(default)]
    pub violates_a2: bool,
    /// Known period of the matrix sequence, letting monitors decide
    /// infinite-suffix conditions exactly.
    #[serde(default)]
    pub period: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
}

/// `A(0), ..., A(H-1)` with delays `tau(0), ..., tau(H-1)`.
///
/// Invariants: every matrix is `n x n`, stochastic, has all positive entries
/// at least `alpha`, and has positive diagonal unless `meta.violates_a2`; the
/// delay table covers the same horizon and satisfies B1-B3.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTrace<S> {
    n: usize,
    alpha: S,
    matrices: Vec<StochasticMatrix<S>>,
    delays: DelaySchedule,
    pub meta: TraceMeta,
}

impl<S: Scalar> ScenarioTrace<S> {
    pub fn new(alpha: S, matrices: Vec<StochasticMatrix<S>>, delays: DelaySchedule, meta: TraceMeta) -> Result<Self> {
        let n = delays.n();
        if matrices.len() != delays.horizon() {
            return Err(Error::InvalidTrace(format!(
                "{} matrices but delays cover {} steps",
                matrices.len(),
                delays.horizon()
            )));
        }
        if let Some(v) = validate_delays(&delays).first() {
            return Err(Error::InvalidDelays(v.to_string()));
        }
        let matrices = matrices
            .into_iter()
            .enumerate()
            .map(|(t, a)| {
                if a.n() != n {
                    return Err(Error::InvalidTrace(format!("A({t}) is {0}x{0}, expected {n}", a.n())));
                }
                if !meta.violates_a2 && !a.has_self_loops() {
                    return Err(Error::InvalidTrace(format!(
                        "A({t}) has a zero diagonal entry but the trace is not flagged violates-A2"
                    )));
                }
                a.with_alpha(alpha.clone())
                    .map_err(|e| Error::InvalidTrace(format!("A({t}): {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScenarioTrace {
            n,
            alpha,
            matrices,
            delays,
            meta,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Delay bound `Delta`.
    pub fn delta(&self) -> usize {
        self.delays.delta()
    }

    pub fn alpha(&self) -> &S {
        &self.alpha
    }

    pub fn horizon(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[StochasticMatrix<S>] {
        &self.matrices
    }

    pub fn matrix(&self, t: usize) -> &StochasticMatrix<S> {
        &self.matrices[t]
    }

    pub fn delays(&self) -> &DelaySchedule {
        &self.delays
    }

    pub fn graph(&self, t: usize) -> Digraph {
        comm_graph(&self.matrices[t])
    }

    pub fn graphs(&self) -> Vec<Digraph> {
        self.matrices.iter().map(comm_graph).collect()
    }

    /// Whether every matrix has a positive diagonal.
    pub fn satisfies_a2(&self) -> bool {
        self.matrices.iter().all(StochasticMatrix::has_self_loops)
    }

    /// The first `horizon` steps.
    pub fn truncated(&self, horizon: usize) -> Self {
        let h = horizon.min(self.horizon());
        ScenarioTrace {
            n: self.n,
            alpha: self.alpha.clone(),
            matrices: self.matrices[..h].to_vec(),
            delays: self.delays.truncated(h),
            meta: self.meta.clone(),
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ScenarioTrace<T> {
        ScenarioTrace {
            n: self.n,
            alpha: f(&self.alpha),
            matrices: self.matrices.iter().map(|a| a.map(&f)).collect(),
            delays: self.delays.clone(),
            meta: self.meta.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "mode": S::MODE,
            "n": self.n,
            "delta": self.delta(),
            "alpha": self.alpha.to_json(),
            "horizon": self.horizon(),
            "matrices": self.matrices.iter().map(StochasticMatrix::to_json).collect::<Vec<_>>(),
            "delays": self.delays.to_json(),
            "metadata": self.meta,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        check_schema(v)?;
        let mode = trace_mode(v)?;
        if mode != S::MODE {
            return Err(Error::parse("mode", format!("file is {mode}, expected {}", S::MODE)));
        }
        let alpha = S::from_json(v.get("alpha").unwrap_or(&Value::Null), "alpha")?;
        let matrices = v
            .get("matrices")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("matrices", "missing or not an array"))?
            .iter()
            .enumerate()
            .map(|(t, m)| {
                StochasticMatrix::from_json(m).map_err(|e| Error::parse(format!("matrices[{t}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let delays = DelaySchedule::from_json(v.get("delays").ok_or_else(|| Error::parse("delays", "missing"))?)?;
        let meta: TraceMeta = match v.get("metadata") {
            Some(m) => serde_json::from_value(m.clone()).map_err(|e| Error::parse("metadata", e.to_string()))?,
            None => TraceMeta::default(),
        };
        if let Some(h) = v.get("horizon").and_then(Value::as_u64) {
            if h as usize != matrices.len() {
                return Err(Error::parse(
                    "horizon",
                    format!("{h} but {} matrices present", matrices.len()),
                ));
            }
        }
        if let Some(n) = v.get("n").and_then(Value::as_u64) {
            if n as usize != delays.n() {
                return Err(Error::parse(
                    "n",
                    format!("{n} but delays are for {} agents", delays.n()),
                ));
            }
        }
        Self::new(alpha, matrices, delays, meta)
    }
}

impl ScenarioTrace<Rational> {
    pub fn to_float(&self) -> ScenarioTrace<f64> {
        self.map(f64::from_rational)
    }
}

pub(crate) fn check_schema(v: &Value) -> Result<()> {
    match v.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) | None => Ok(()),
        Some(other) => Err(Error::parse("schema", format!("unsupported schema {other:?}"))),
    }
}

fn trace_mode(v: &Value) -> Result<Mode> {
    let m = v.get("mode").ok_or_else(|| Error::parse("mode", "missing"))?;
    serde_json::from_value(m.clone()).map_err(|e| Error::parse("mode", e.to_string()))
}

/// A trace whose arithmetic mode is only known at run time (e.g. loaded from disk).
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTrace {
    Rational(ScenarioTrace<Rational>),
    Float(ScenarioTrace<f64>),
}

impl AnyTrace {
    pub fn from_json(v: &Value) -> Result<Self> {
        match trace_mode(v)? {
            Mode::Rational => ScenarioTrace::from_json(v).map(AnyTrace::Rational),
            Mode::Float => ScenarioTrace::from_json(v).map(AnyTrace::Float),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Value {
        match self {
            AnyTrace::Rational(t) => t.to_json(),
            AnyTrace::Float(t) => t.to_json(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            AnyTrace::Rational(_) => Mode::Rational,
            AnyTrace::Float(_) => Mode::Float,
        }
    }

    pub fn meta(&self) -> &TraceMeta {
        match self {
            AnyTrace::Rational(t) => &t.meta,
            AnyTrace::Float(t) => &t.meta,
        }
    }
}
