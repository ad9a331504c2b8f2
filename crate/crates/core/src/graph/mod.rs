//! Communication graphs and the structural queries the convergence conditions
//! are phrased in.
//!
//! Nodes are `0..n`. An edge `(i, j)` means "agent `i` hears of agent `j`",
//! i.e. `A[i][j] > 0`. A *connected component* always means a component of
//! the undirected version ([`Digraph::weak_components`]); strongly connected
//! components go through [`scc_condense`].

mod orient;
mod scc;

pub use orient::{
    is_completely_reducible, is_j_oriented, is_oriented, satisfies_pj, sinks, PjMethod, MAX_BRUTEFORCE_DIM,
};
pub use scc::{scc_condense, Condensation};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::matrix::{Scalar, StochasticMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Digraph {
            n,
            adj: vec![false; n * n],
        }
    }

    pub fn complete(n: usize) -> Self {
        Digraph {
            n,
            adj: vec![true; n * n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::Dimension(format!("edge ({i}, {j}) outside 0..{n}")));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.adj[i * self.n + j] = true;
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&e| e).count()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    pub fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.has_edge(i, j))
    }

    pub fn has_all_self_loops(&self) -> bool {
        (0..self.n).all(|i| self.has_edge(i, i))
    }

    pub fn without_self_loops(&self) -> Self {
        let mut g = self.clone();
        for i in 0..self.n {
            g.adj[i * self.n + i] = false;
        }
        g
    }

    /// Edge-set union of two graphs on the same nodes.
    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Digraph {
            n: self.n,
            adj: self.adj.iter().zip(&other.adj).map(|(a, b)| *a || *b).collect(),
        }
    }

    /// Graph of the product `L * E` of nonnegative matrices whose graphs are
    /// `later` (L) and `earlier` (E): `(i, k)` is an edge iff some `l` has
    /// `(i, l)` in `later` and `(l, k)` in `earlier`.
    pub fn compose(later: &Self, earlier: &Self) -> Self {
        debug_assert_eq!(later.n, earlier.n);
        let n = later.n;
        let mut g = Self::empty(n);
        for i in 0..n {
            for l in later.successors(i) {
                for k in earlier.successors(l) {
                    g.add_edge(i, k);
                }
            }
        }
        g
    }

    /// Nodes from which `target` is reachable (including `target`).
    pub fn ancestors(&self, target: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![target];
        seen[target] = true;
        while let Some(v) = stack.pop() {
            for u in self.predecessors(v) {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }

    /// Nodes reachable from `source` (including `source`).
    pub fn descendants(&self, source: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        let mut stack = vec![source];
        seen[source] = true;
        while let Some(u) = stack.pop() {
            for v in self.successors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.n == 0 || (self.ancestors(0).iter().all(|&b| b) && self.descendants(0).iter().all(|&b| b))
    }

    /// Components of the undirected version, each sorted, ordered by smallest node.
    #[allow(clippy::needless_range_loop)]
    pub fn weak_components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for v in 0..self.n {
                    if comp[v] == usize::MAX && (self.has_edge(u, v) || self.has_edge(v, u)) {
                        comp[v] = id;
                        members.push(v);
                        stack.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Subgraph induced by `nodes`; node `k` of the result is `nodes[k]`.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut g = Self::empty(nodes.len());
        for (a, &u) in nodes.iter().enumerate() {
            for (b, &v) in nodes.iter().enumerate() {
                if self.has_edge(u, v) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Primitive = strongly connected and aperiodic (cycle-length gcd 1).
    pub fn is_primitive(&self) -> bool {
        self.n > 0 && self.is_strongly_connected() && self.period() == Some(1)
    }

    /// Gcd of the cycle lengths of a strongly connected graph, from BFS levels.
    pub fn period(&self) -> Option<usize> {
        if self.n == 0 || !self.is_strongly_connected() {
            return None;
        }
        let mut level = vec![usize::MAX; self.n];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for v in self.successors(u) {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let g = self
            .edges()
            .fold(0usize, |g, (u, v)| gcd(g, (level[u] + 1).abs_diff(level[v])));
        Some(g)
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<[usize; 2]> = self.edges().map(|(i, j)| [i, j]).collect();
        json!({ "n": self.n, "edges": edges })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::parse("n", "missing or not an integer"))? as usize;
        let edges = v
            .get("edges")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("edges", "missing or not an array"))?;
        let pairs = edges
            .iter()
            .enumerate()
            .map(|(k, e)| {
                let pair = e.as_array().filter(|p| p.len() == 2);
                let ij = pair.and_then(|p| Some((p[0].as_u64()? as usize, p[1].as_u64()? as usize)));
                ij.ok_or_else(|| Error::parse(format!("edges[{k}]"), "expected [i, j]"))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_edges(n, pairs)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `G(A)`: edge `(i, j)` iff `A[i][j] > 0` as stored (never thresholded).
pub fn comm_graph<S: Scalar>(a: &StochasticMatrix<S>) -> Digraph {
    let n = a.n();
    Digraph {
        n,
        adj: a.entries().iter().map(Scalar::is_positive).collect(),
    }
}
