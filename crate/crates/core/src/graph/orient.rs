use super::Digraph;
use crate::error::{Error, Result};

pub const MAX_BRUTEFORCE_DIM: usize = 20;

fn check_node(g: &Digraph, j: usize) -> Result<()> {
    if j >= g.n() {
        return Err(Error::param("j", format!("node {j} outside 0..{}", g.n())));
    }
    Ok(())
}

/// Every node has a directed path to `j`.
pub fn is_j_oriented(g: &Digraph, j: usize) -> Result<bool> {
    check_node(g, j)?;
    Ok(g.ancestors(j).into_iter().all(|b| b))
}

/// Smallest `j` for which `g` is `j`-oriented.
pub fn is_oriented(g: &Digraph) -> Option<usize> {
    // Every witness lies in the unique sink SCC of the condensation, so one
    // candidate check per SCC would do; graphs here are small.
    (0..g.n()).find(|&j| g.ancestors(j).into_iter().all(|b| b))
}

/// Every weakly connected component is strongly connected.
pub fn is_completely_reducible(g: &Digraph) -> bool {
    g.weak_components().iter().all(|c| g.induced(c).is_strongly_connected())
}

/// Nodes with no edge to a different node.
pub fn sinks(g: &Digraph) -> Vec<usize> {
    (0..g.n()).filter(|&i| g.successors(i).all(|j| j == i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PjMethod {
    /// j0's weak component is j0-oriented and every other weak component is
    /// strongly connected.
    Structural,
    /// No subset containing j0 has an outgoing edge but no incoming edge.
    BruteForce,
}

/// Property P_{j0}: no node set containing `j0` has an edge leaving it while
/// no edge enters it.
pub fn satisfies_pj(g: &Digraph, j0: usize, method: PjMethod) -> Result<bool> {
    check_node(g, j0)?;
    match method {
        PjMethod::Structural => Ok(pj_structural(g, j0)),
        PjMethod::BruteForce => {
            if g.n() > MAX_BRUTEFORCE_DIM {
                return Err(Error::Capability(format!(
                    "brute-force P_j enumeration is limited to n <= {MAX_BRUTEFORCE_DIM} (got {})",
                    g.n()
                )));
            }
            Ok(pj_bruteforce(g, j0))
        }
    }
}

fn pj_structural(g: &Digraph, j0: usize) -> bool {
    g.weak_components().iter().all(|comp| {
        let sub = g.induced(comp);
        match comp.iter().position(|&v| v == j0) {
            Some(local) => sub.ancestors(local).into_iter().all(|b| b),
            None => sub.is_strongly_connected(),
        }
    })
}

fn pj_bruteforce(g: &Digraph, j0: usize) -> bool {
    let n = g.n();
    let others: Vec<usize> = (0..n).filter(|&v| v != j0).collect();
    let mut in_set = vec![false; n];
    for mask in 0u64..(1u64 << others.len()) {
        in_set.iter_mut().for_each(|b| *b = false);
        in_set[j0] = true;
        for (bit, &v) in others.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                in_set[v] = true;
            }
        }
        let mut outgoing = false;
        let mut incoming = false;
        for (u, v) in g.edges() {
            match (in_set[u], in_set[v]) {
                (true, false) => outgoing = true,
                (false, true) => incoming = true,
                _ => {}
            }
        }
        if outgoing && !incoming {
            return false;
        }
    }
    true
}
