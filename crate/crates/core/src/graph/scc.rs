use super::Digraph;

/// Strongly connected components contracted to single nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    /// SCCs, each sorted, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    /// `component_of[v]` indexes `components`.
    pub component_of: Vec<usize>,
    /// Edges between distinct components; acyclic, no self-loops.
    pub dag: Digraph,
}

pub fn scc_condense(g: &Digraph) -> Condensation {
    let n = g.n();
    let mut component_of = vec![usize::MAX; n];
    let mut components = Vec::new();
    for v in 0..n {
        if component_of[v] != usize::MAX {
            continue;
        }
        let down = g.descendants(v);
        let up = g.ancestors(v);
        let members: Vec<usize> = (0..n).filter(|&u| down[u] && up[u]).collect();
        for &u in &members {
            component_of[u] = components.len();
        }
        components.push(members);
    }
    let mut dag = Digraph::empty(components.len());
    for (u, v) in g.edges() {
        let (cu, cv) = (component_of[u], component_of[v]);
        if cu != cv {
            dag.add_edge(cu, cv);
        }
    }
    Condensation {
        components,
        component_of,
        dag,
    }
}
