//! Connectivity conditions decided over a finite sequence of communication
//! graphs `G(0), ..., G(H-1)`.
//!
//! Conditions quantifying over infinite suffixes (D1, the first half of D*)
//! can only be witnessed on a finite trace. Their reports say `witnessed`
//! together with the last time the witness covers, unless the caller
//! declares the sequence periodic, in which case the recurring edges are
//! exactly one period's union and the verdict is decided.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{is_completely_reducible, is_j_oriented, is_oriented, satisfies_pj, Digraph, PjMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Condition {
    C,
    D1,
    D2,
    DiamondC,
    DiamondD2,
    Dstar,
    /// Bounded intercommunication intervals.
    Bic,
}

impl Condition {
    pub const ALL: [Condition; 7] = [
        Condition::C,
        Condition::D1,
        Condition::D2,
        Condition::DiamondC,
        Condition::DiamondD2,
        Condition::Dstar,
        Condition::Bic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Condition::C => "C",
            Condition::D1 => "D1",
            Condition::D2 => "D2",
            Condition::DiamondC => "diamondC",
            Condition::DiamondD2 => "diamondD2",
            Condition::Dstar => "Dstar",
            Condition::Bic => "bic",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Condition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::param(
                    "conditions",
                    format!("unknown condition {s:?}; expected one of C, D1, D2, Dstar, diamondC, diamondD2, bic"),
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    /// Oriented (condition C and its eventual variant).
    Oriented,
    /// Completely reducible (condition D2 and its eventual variant).
    Reducible,
}

impl GraphKind {
    fn test(&self, g: &Digraph) -> std::result::Result<Option<usize>, String> {
        match self {
            GraphKind::Oriented => is_oriented(g)
                .map(Some)
                .ok_or_else(|| "no node is reachable from every other node".to_string()),
            GraphKind::Reducible => {
                if is_completely_reducible(g) {
                    Ok(None)
                } else {
                    let bad = g
                        .weak_components()
                        .into_iter()
                        .find(|c| !g.induced(c).is_strongly_connected())
                        .expect("some component is not strong");
                    Err(format!("weak component {bad:?} is not strongly connected"))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    /// Finite-trace witness of a suffix condition, covering start times up to `until`.
    Witnessed {
        until: usize,
    },
    Fails,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub t: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub verdict: Verdict,
    pub first_violation: Option<Violation>,
    pub params: Params,
    pub horizon: usize,
    /// Per-step witness node where the condition has one (the coordinator
    /// for C, the fixed agent candidate for D*), indexed from `params.t0` or 0.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Option<usize>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ConditionReport {
    fn new(condition: Condition, horizon: usize) -> Self {
        ConditionReport {
            condition,
            verdict: Verdict::Holds,
            first_violation: None,
            params: Params::default(),
            horizon,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn fail(&mut self, t: usize, reason: impl Into<String>) {
        self.verdict = Verdict::Fails;
        if self.first_violation.is_none() {
            self.first_violation = Some(Violation {
                t,
                reason: reason.into(),
            });
        }
    }

    /// Holds or is witnessed.
    pub fn ok(&self) -> bool {
        !matches!(self.verdict, Verdict::Fails)
    }

    pub fn summary(&self) -> String {
        match (&self.verdict, &self.first_violation) {
            (Verdict::Holds, _) => "holds".into(),
            (Verdict::Witnessed { until }, _) => format!("witnessed until t={until}"),
            (Verdict::Fails, Some(v)) => format!("fails at t={}: {}", v.t, v.reason),
            (Verdict::Fails, None) => "fails".into(),
        }
    }
}

fn per_step(condition: Condition, graphs: &[Digraph], kind: GraphKind) -> ConditionReport {
    let mut r = ConditionReport::new(condition, graphs.len());
    for (t, g) in graphs.iter().enumerate() {
        match kind.test(g) {
            Ok(w) => r.witnesses.push(w),
            Err(reason) => {
                r.witnesses.push(None);
                r.fail(t, reason);
            }
        }
    }
    if kind == GraphKind::Reducible {
        r.witnesses.clear();
    }
    r
}

/// Every `G(t)` is oriented; records the smallest coordinator per step.
pub fn check_c(graphs: &[Digraph]) -> ConditionReport {
    per_step(Condition::C, graphs, GraphKind::Oriented)
}

/// Every `G(t)` is completely reducible.
pub fn check_d2(graphs: &[Digraph]) -> ConditionReport {
    per_step(Condition::D2, graphs, GraphKind::Reducible)
}

fn check_start(graphs: &[Digraph], from_t: usize) -> Result<()> {
    if from_t >= graphs.len() {
        return Err(Error::param(
            "from_t",
            format!("{from_t} is not inside the trace horizon {}", graphs.len()),
        ));
    }
    Ok(())
}

/// `U(t) = G(t) u ... u G(H-1)` for `t` in `from_t..H`.
fn suffix_unions(graphs: &[Digraph], from_t: usize) -> Vec<Digraph> {
    let mut out: Vec<Digraph> = Vec::with_capacity(graphs.len() - from_t);
    for g in graphs[from_t..].iter().rev() {
        let u = match out.last() {
            Some(prev) => prev.union(g),
            None => g.clone(),
        };
        out.push(u);
    }
    out.reverse();
    out
}

fn period_union(graphs: &[Digraph], from_t: usize, period: usize) -> Result<Digraph> {
    if period == 0 || from_t + period > graphs.len() {
        return Err(Error::param(
            "period",
            format!(
                "need a full period of {period} steps from t = {from_t} within {} steps",
                graphs.len()
            ),
        ));
    }
    Ok(graphs[from_t + 1..from_t + period]
        .iter()
        .fold(graphs[from_t].clone(), |u, g| u.union(g)))
}

/// Suffix unions are strongly connected.
///
/// With `period`, decided exactly from one period's union. Otherwise
/// witnessed when `U(from_t)` is strongly connected, up to the last start
/// time whose suffix union still is (unions shrink as the start advances).
pub fn check_d1(graphs: &[Digraph], from_t: usize, period: Option<usize>) -> Result<ConditionReport> {
    check_start(graphs, from_t)?;
    let mut r = ConditionReport::new(Condition::D1, graphs.len());
    r.params.t0 = Some(from_t);
    if let Some(p) = period {
        let u = period_union(graphs, from_t, p)?;
        r.notes
            .push(format!("decided from the union over one period of {p} steps"));
        if !u.is_strongly_connected() {
            r.fail(
                from_t,
                "the edges recurring every period do not form a strongly connected graph",
            );
        }
        return Ok(r);
    }
    let unions = suffix_unions(graphs, from_t);
    let covered = unions.iter().take_while(|u| u.is_strongly_connected()).count();
    if covered == 0 {
        r.fail(from_t, "the union of all remaining graphs is not strongly connected");
    } else {
        let until = from_t + covered - 1;
        r.verdict = Verdict::Witnessed { until };
        if until + 1 < graphs.len() {
            r.notes.push(format!(
                "suffix unions starting after t={until} are not strongly connected within the horizon"
            ));
        }
    }
    Ok(r)
}

/// Graph of `A(t+phi-1) ... A(t)` from the step graphs.
pub fn window_graph(graphs: &[Digraph], t: usize, phi: usize) -> Digraph {
    graphs[t + 1..t + phi]
        .iter()
        .fold(graphs[t].clone(), |h, g| Digraph::compose(g, &h))
}

/// Eventual variants: for every `t >= t0` with `t + phi <= H`, the graph of
/// the product over `phi` consecutive steps is oriented / completely reducible.
pub fn check_diamond(graphs: &[Digraph], kind: GraphKind, t0: usize, phi: usize) -> Result<ConditionReport> {
    if phi == 0 {
        return Err(Error::param("phi", "must be positive"));
    }
    if t0 + phi > graphs.len() {
        return Err(Error::param(
            "t0",
            format!("t0 + phi = {} exceeds the horizon {}", t0 + phi, graphs.len()),
        ));
    }
    let condition = match kind {
        GraphKind::Oriented => Condition::DiamondC,
        GraphKind::Reducible => Condition::DiamondD2,
    };
    let hs: Vec<Digraph> = (t0..=graphs.len() - phi)
        .map(|t| window_graph(graphs, t, phi))
        .collect();
    let mut r = per_step(condition, &hs, kind);
    r.horizon = graphs.len();
    if let Some(v) = &mut r.first_violation {
        v.t += t0;
    }
    r.params.t0 = Some(t0);
    r.params.phi = Some(phi);
    Ok(r)
}

/// Smallest `phi` in `1..=phi_max` for which [`check_diamond`] succeeds.
pub fn search_diamond(graphs: &[Digraph], kind: GraphKind, t0: usize, phi_max: usize) -> Option<ConditionReport> {
    (1..=phi_max)
        .filter(|&phi| t0 + phi <= graphs.len())
        .filter_map(|phi| check_diamond(graphs, kind, t0, phi).ok())
        .find(ConditionReport::ok)
}

/// Condition D*: a fixed agent `j` such that (1) every suffix union is
/// `j`-oriented and (2) at every step `j`'s weak component is `j`-oriented
/// and every other weak component is strongly connected.
///
/// The report also tells whether (2) holds step by step for a `j` allowed
/// to change over time; `witnesses[t]` is the smallest such `j`.
pub fn check_dstar(graphs: &[Digraph], from_t: usize, period: Option<usize>) -> Result<ConditionReport> {
    check_start(graphs, from_t)?;
    let n = graphs[0].n();
    let mut r = ConditionReport::new(Condition::Dstar, graphs.len());
    r.params.t0 = Some(from_t);
    let steps = &graphs[from_t..];

    let step_ok: Vec<Vec<bool>> = steps
        .iter()
        .map(|g| {
            (0..n)
                .map(|j| satisfies_pj(g, j, PjMethod::Structural).unwrap_or(false))
                .collect()
        })
        .collect();
    r.witnesses = step_ok.iter().map(|row| row.iter().position(|&b| b)).collect();
    let weak_holds = r.witnesses.iter().all(Option::is_some);

    let union_until = |j: usize| -> Result<Option<usize>> {
        if let Some(p) = period {
            let u = period_union(graphs, from_t, p)?;
            return Ok(is_j_oriented(&u, j)?.then_some(graphs.len() - 1));
        }
        let unions = suffix_unions(graphs, from_t);
        if !is_j_oriented(&unions[0], j)? {
            return Ok(None);
        }
        let mut last = 0;
        for (k, u) in unions.iter().enumerate() {
            if is_j_oriented(u, j)? {
                last = k;
            } else {
                break;
            }
        }
        Ok(Some(from_t + last))
    };

    let mut found = None;
    for j in 0..n {
        if !step_ok.iter().all(|row| row[j]) {
            continue;
        }
        if let Some(until) = union_until(j)? {
            found = Some((j, until));
            break;
        }
    }
    match found {
        Some((j, until)) => {
            r.params.j = Some(j);
            r.verdict = if period.is_some() {
                Verdict::Holds
            } else {
                Verdict::Witnessed { until }
            };
        }
        None => {
            let t = (0..n)
                .filter_map(|j| step_ok.iter().position(|row| !row[j]))
                .max()
                .map_or(from_t, |k| from_t + k);
            r.fail(t, "no agent is a fixed witness: every candidate fails by this step");
        }
    }
    if weak_holds {
        r.notes
            .push("per-step weak variant holds: every step satisfies part (2) for some agent".into());
    } else {
        r.notes.push("per-step weak variant fails".into());
    }
    if !graphs.iter().all(Digraph::has_all_self_loops) {
        r.notes
            .push("some step lacks self-loops (the positive-diagonal assumption fails)".into());
    }
    Ok(r)
}

/// Every edge that appears anywhere in the trace appears in every window of
/// `phi` consecutive steps.
pub fn check_bic(graphs: &[Digraph], phi: usize) -> Result<ConditionReport> {
    if phi == 0 {
        return Err(Error::param("phi", "must be positive"));
    }
    if graphs.len() < phi {
        return Err(Error::param(
            "phi",
            format!("{phi} exceeds the horizon {}", graphs.len()),
        ));
    }
    let mut r = ConditionReport::new(Condition::Bic, graphs.len());
    r.params.phi = Some(phi);
    let all = graphs[1..].iter().fold(graphs[0].clone(), |u, g| u.union(g));
    for t in 0..=graphs.len() - phi {
        let w = window_graph_union(&graphs[t..t + phi]);
        if let Some((i, j)) = all.edges().find(|&(i, j)| !w.has_edge(i, j)) {
            r.fail(t, format!("edge ({i}, {j}) is absent from steps {t}..{}", t + phi - 1));
            break;
        }
    }
    Ok(r)
}

fn window_graph_union(gs: &[Digraph]) -> Digraph {
    gs[1..].iter().fold(gs[0].clone(), |u, g| u.union(g))
}

/// Smallest `phi` in `1..=phi_max` for which [`check_bic`] succeeds.
pub fn search_bic(graphs: &[Digraph], phi_max: usize) -> Option<ConditionReport> {
    (1..=phi_max.min(graphs.len()))
        .filter_map(|phi| check_bic(graphs, phi).ok())
        .find(ConditionReport::ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> Digraph {
        let mut d = Digraph::from_edges(n, edges.iter().copied()).unwrap();
        for i in 0..n {
            d.add_edge(i, i);
        }
        d
    }

    #[test]
    fn strongly_connected_steps_pass_c_and_d2() {
        let gs = vec![g(3, &[(0, 1), (1, 2), (2, 0)]); 4];
        assert_eq!(check_c(&gs).verdict, Verdict::Holds);
        assert_eq!(check_d2(&gs).verdict, Verdict::Holds);
        assert_eq!(check_c(&gs).witnesses, vec![Some(0); 4]);
    }

    #[test]
    fn identity_trace_fails_d1() {
        let gs = vec![g(2, &[]); 3];
        let r = check_d1(&gs, 0, None).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert_eq!(r.first_violation.unwrap().t, 0);
    }

    #[test]
    fn periodic_union_witness() {
        let a = g(3, &[(0, 1)]);
        let b = g(3, &[(1, 2)]);
        let c = g(3, &[(2, 0)]);
        let gs: Vec<Digraph> = (0..9).map(|t| [&a, &b, &c][t % 3].clone()).collect();
        let r = check_d1(&gs, 0, None).unwrap();
        assert_eq!(r.verdict, Verdict::Witnessed { until: 6 });
        let exact = check_d1(&gs, 0, Some(3)).unwrap();
        assert_eq!(exact.verdict, Verdict::Holds);
    }

    #[test]
    fn diamond_two_step_orientation() {
        // Even steps route 0 -> 1, odd steps 1 -> 2.
        let gs: Vec<Digraph> = (0..6)
            .map(|t| if t % 2 == 0 { g(3, &[(0, 1)]) } else { g(3, &[(1, 2)]) })
            .collect();
        assert!(!check_c(&gs).ok());
        let r = check_diamond(&gs, GraphKind::Oriented, 0, 2).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(
            search_diamond(&gs, GraphKind::Oriented, 0, 4).unwrap().params.phi,
            Some(2)
        );
    }

    #[test]
    fn diamond_phi_one_matches_per_step() {
        let gs = vec![g(3, &[(0, 1)]), g(3, &[(0, 1), (1, 0), (2, 1)])];
        let d = check_diamond(&gs, GraphKind::Oriented, 0, 1).unwrap();
        let c = check_c(&gs);
        assert_eq!((d.verdict, d.first_violation), (c.verdict, c.first_violation));
    }

    #[test]
    fn bic_alternating_edge() {
        let gs: Vec<Digraph> = (0..6)
            .map(|t| if t % 2 == 0 { g(2, &[(0, 1)]) } else { g(2, &[]) })
            .collect();
        assert!(!check_bic(&gs, 1).unwrap().ok());
        assert!(check_bic(&gs, 2).unwrap().ok());
        assert!(check_bic(&gs, 0).is_err());
        assert_eq!(search_bic(&gs, 5).unwrap().params.phi, Some(2));
    }

    #[test]
    fn dstar_on_strong_steps_picks_smallest() {
        let gs = vec![g(3, &[(0, 1), (1, 2), (2, 0)]); 3];
        let r = check_dstar(&gs, 0, None).unwrap();
        assert_eq!(r.params.j, Some(0));
        assert!(r.ok());
    }

    #[test]
    fn condition_names_parse() {
        assert_eq!("dstar".parse::<Condition>().unwrap(), Condition::Dstar);
        assert_eq!("diamondD2".parse::<Condition>().unwrap(), Condition::DiamondD2);
        assert!("cut-balance".parse::<Condition>().is_err());
    }
}
