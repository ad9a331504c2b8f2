use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Table of send times `tau[t][i][j]`: at time `t`, agent `i` uses the value
/// agent `j` held at time `tau[t][i][j]`.
///
/// Non-monotone, repeated or skipped send times (non-FIFO, duplicating,
/// lossy links) are all permitted; only causality, immediate self-access and
/// the staleness bound are required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelaySchedule {
    n: usize,
    delta: usize,
    tau: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DelayRule {
    /// `tau_ij(t) <= t`
    B1,
    /// `tau_ii(t) = t`
    B2,
    /// `tau_ij(t) >= max(0, t - delta + 1)`
    B3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DelayViolation {
    pub rule: DelayRule,
    pub i: usize,
    pub j: usize,
    pub t: usize,
    pub tau: usize,
}

impl fmt::Display for DelayViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} violated at (i={}, j={}, t={}): tau = {}",
            self.rule, self.i, self.j, self.t, self.tau
        )
    }
}

impl DelaySchedule {
    /// Checks only the table's shape; see [`validate_delays`] for B1-B3.
    pub fn new(n: usize, delta: usize, tau: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        if delta == 0 {
            return Err(Error::param("delta", "must be at least 1"));
        }
        for (t, slice) in tau.iter().enumerate() {
            if slice.len() != n || slice.iter().any(|r| r.len() != n) {
                return Err(Error::InvalidDelays(format!("tau[{t}] is not {n}x{n}")));
            }
        }
        Ok(DelaySchedule { n, delta, tau })
    }

    /// `tau_ij(t) = t`: the synchronous, zero-delay case.
    pub fn zero(n: usize, horizon: usize) -> Self {
        DelaySchedule {
            n,
            delta: 1,
            tau: (0..horizon).map(|t| vec![vec![t; n]; n]).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn horizon(&self) -> usize {
        self.tau.len()
    }

    pub fn tau(&self, t: usize, i: usize, j: usize) -> usize {
        self.tau[t][i][j]
    }

    pub fn slice(&self, t: usize) -> &[Vec<usize>] {
        &self.tau[t]
    }

    /// Lag `t - tau_ij(t) + 1`, in `1..=delta` for a valid schedule.
    pub fn lag(&self, t: usize, i: usize, j: usize) -> usize {
        t + 1 - self.tau[t][i][j]
    }

    pub fn truncated(&self, horizon: usize) -> Self {
        DelaySchedule {
            n: self.n,
            delta: self.delta,
            tau: self.tau[..horizon.min(self.tau.len())].to_vec(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "v1",
            "n": self.n,
            "delta": self.delta,
            "horizon": self.horizon(),
            "tau": self.tau,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let get = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::parse(format!("delays.{k}"), "missing or not an integer"))
        };
        let (n, delta, horizon) = (get("n")?, get("delta")?, get("horizon")?);
        let tau: Vec<Vec<Vec<usize>>> = serde_json::from_value(
            v.get("tau")
                .cloned()
                .ok_or_else(|| Error::parse("delays.tau", "missing"))?,
        )
        .map_err(|e| Error::parse("delays.tau", e.to_string()))?;
        if tau.len() != horizon {
            return Err(Error::parse(
                "delays.tau",
                format!("{} slices for horizon {horizon}", tau.len()),
            ));
        }
        Self::new(n, delta, tau)
    }
}

/// Every `(i, j, t)` breaking B1, B2 or B3; empty iff the schedule is valid.
pub fn validate_delays(d: &DelaySchedule) -> Vec<DelayViolation> {
    let mut out = Vec::new();
    for (t, slice) in d.tau.iter().enumerate() {
        out.extend(validate_slice(slice, t, d.delta));
    }
    out
}

pub(crate) fn validate_slice(slice: &[Vec<usize>], t: usize, delta: usize) -> Vec<DelayViolation> {
    let floor = (t + 1).saturating_sub(delta);
    let mut out = Vec::new();
    for (i, row) in slice.iter().enumerate() {
        for (j, &tau) in row.iter().enumerate() {
            let mut flag = |rule| out.push(DelayViolation { rule, i, j, t, tau });
            if tau > t {
                flag(DelayRule::B1);
            }
            if i == j && tau != t {
                flag(DelayRule::B2);
            }
            if tau < floor {
                flag(DelayRule::B3);
            }
        }
    }
    out
}
