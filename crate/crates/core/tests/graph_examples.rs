use agreement_core::graph::*;
use agreement_core::matrix::{from_ratios, Rational, StochasticMatrix};
use agreement_core::scenario::counterexample_permutation;

fn g(n: usize, edges: &[(usize, usize)]) -> Digraph {
    Digraph::from_edges(n, edges.iter().copied()).unwrap()
}

fn loops(n: usize, edges: &[(usize, usize)]) -> Digraph {
    let mut d = g(n, edges);
    for i in 0..n {
        d.add_edge(i, i);
    }
    d
}

/// Graph of the first matrix of the shifting example.
fn shifting_a1() -> Digraph {
    let a: StochasticMatrix<Rational> = from_ratios(&[
        &[(1, 2), (0, 1), (1, 2)],
        &[(0, 1), (1, 1), (0, 1)],
        &[(0, 1), (0, 1), (1, 1)],
    ])
    .unwrap();
    comm_graph(&a)
}

fn perm_g0() -> Digraph {
    counterexample_permutation(1).graph(0)
}

#[test]
fn comm_graph_examples() {
    let id = comm_graph(&StochasticMatrix::<Rational>::identity(4));
    assert_eq!(id, loops(4, &[]));
    assert_eq!(perm_g0().edges().collect::<Vec<_>>(), vec![(0, 0), (1, 2), (2, 1)]);
    assert_eq!(
        comm_graph(&StochasticMatrix::<Rational>::uniform(3)),
        Digraph::complete(3)
    );
}

#[test]
fn condensation_examples() {
    let c = scc_condense(&loops(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]));
    assert_eq!(c.components.len(), 1);
    let dag = loops(4, &[(0, 1), (0, 2), (2, 3)]);
    let c = scc_condense(&dag);
    assert_eq!(c.components, vec![vec![0], vec![1], vec![2], vec![3]]);
    assert_eq!(c.dag.edge_count(), 3);
    let c = scc_condense(&g(3, &[(0, 1), (1, 0), (1, 2)]));
    assert_eq!(c.components, vec![vec![0, 1], vec![2]]);
    assert_eq!(c.dag.edges().collect::<Vec<_>>(), vec![(0, 1)]);
}

#[test]
fn orientation_examples() {
    assert!(is_j_oriented(&g(1, &[]), 0).unwrap());
    let star = g(5, &[(0, 3), (1, 3), (2, 3), (4, 3)]);
    assert!(is_j_oriented(&star, 3).unwrap());
    assert!(!is_j_oriented(&shifting_a1(), 0).unwrap());
    assert!(is_j_oriented(&star, 5).is_err());

    assert_eq!(is_oriented(&loops(3, &[(0, 1), (1, 2), (2, 0)])), Some(0));
    assert_eq!(is_oriented(&perm_g0()), None);
    assert_eq!(is_oriented(&loops(2, &[(1, 0)])), Some(0));
}

#[test]
fn reducibility_examples() {
    assert!(is_completely_reducible(&perm_g0()));
    assert!(!is_completely_reducible(&loops(2, &[(0, 1)])));
    assert!(is_completely_reducible(&loops(
        7,
        &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 3), (5, 6), (6, 5)]
    )));
}

#[test]
fn pj_examples() {
    let sc = loops(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let a1 = shifting_a1();
    let bad = loops(3, &[(0, 1)]);
    for method in [PjMethod::Structural, PjMethod::BruteForce] {
        assert!((0..4).all(|j| satisfies_pj(&sc, j, method).unwrap()));
        assert!(satisfies_pj(&a1, 2, method).unwrap());
        assert!(!satisfies_pj(&bad, 2, method).unwrap());
    }
    assert!(satisfies_pj(&Digraph::complete(21), 0, PjMethod::BruteForce).is_err());
}

#[test]
fn sink_examples() {
    assert_eq!(sinks(&g(3, &[(0, 1), (1, 2)])), vec![2]);
    assert!(sinks(&Digraph::complete(4)).is_empty());
    let c = scc_condense(&shifting_a1());
    let s = sinks(&c.dag);
    assert_eq!(s.len(), 2);
    assert!(s.contains(&c.component_of[2]));
    assert!(!s.contains(&c.component_of[0]));
}
