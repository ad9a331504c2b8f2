use agreement_core::graph::Digraph;
use agreement_core::monitor::*;
use agreement_core::scenario::{counterexample_permutation, counterexample_shifting, default_eps};

fn g(n: usize, edges: &[(usize, usize)]) -> Digraph {
    let mut d = Digraph::from_edges(n, edges.iter().copied()).unwrap();
    for i in 0..n {
        d.add_edge(i, i);
    }
    d
}

fn shifting_graphs() -> (Vec<Digraph>, Vec<usize>) {
    let run = counterexample_shifting(&default_eps(6), 12).unwrap();
    (run.trace.graphs(), run.boundaries)
}

#[test]
fn c_examples() {
    let sc = vec![g(3, &[(0, 1), (1, 2), (2, 0)]); 5];
    assert_eq!(check_c(&sc).verdict, Verdict::Holds);

    let perm = counterexample_permutation(6).graphs();
    let r = check_c(&perm);
    assert_eq!(r.verdict, Verdict::Fails);
    assert_eq!(r.first_violation.unwrap().t, 0);

    let (sh, _) = shifting_graphs();
    let r = check_c(&sh);
    assert!(r.witnesses.iter().all(Option::is_none));
}

#[test]
fn d2_examples() {
    let sym = vec![g(4, &[(0, 1), (1, 0), (2, 3), (3, 2)]), g(4, &[(1, 2), (2, 1)])];
    assert_eq!(check_d2(&sym).verdict, Verdict::Holds);
    assert_eq!(
        check_d2(&counterexample_permutation(6).graphs()).verdict,
        Verdict::Holds
    );
    let (sh, _) = shifting_graphs();
    let r = check_d2(&sh);
    assert_eq!(r.first_violation.unwrap().t, 0);
}

#[test]
fn d1_examples() {
    // One edge of a 3-cycle per step: only full periods are strongly connected.
    let cyc = [g(3, &[(0, 1)]), g(3, &[(1, 2)]), g(3, &[(2, 0)])];
    let gs: Vec<Digraph> = (0..9).map(|t| cyc[t % 3].clone()).collect();
    assert_eq!(check_d1(&gs, 0, None).unwrap().verdict, Verdict::Witnessed { until: 6 });
    assert_eq!(check_d1(&gs, 0, Some(3)).unwrap().verdict, Verdict::Holds);

    let id = vec![g(2, &[]); 5];
    let r = check_d1(&id, 0, None).unwrap();
    assert_eq!(r.first_violation.unwrap().t, 0);

    let (sh, _) = shifting_graphs();
    assert!(matches!(
        check_d1(&sh, 0, None).unwrap().verdict,
        Verdict::Witnessed { .. }
    ));
}

#[test]
fn diamond_examples() {
    let traces = [
        counterexample_permutation(9).graphs(),
        shifting_graphs().0,
        vec![g(3, &[(0, 1), (1, 2)]); 4],
    ];
    for gs in &traces {
        let c = check_diamond(gs, GraphKind::Oriented, 0, 1).unwrap();
        assert_eq!(c.verdict, check_c(gs).verdict);
        assert_eq!(c.first_violation, check_c(gs).first_violation);
        let d = check_diamond(gs, GraphKind::Reducible, 0, 1).unwrap();
        assert_eq!(d.verdict, check_d2(gs).verdict);
    }

    // Even steps 0 -> 1, odd steps 1 -> 2: only two-step products are oriented.
    let alt: Vec<Digraph> = (0..8)
        .map(|t| if t % 2 == 0 { g(3, &[(0, 1)]) } else { g(3, &[(1, 2)]) })
        .collect();
    assert!(!check_c(&alt).ok());
    assert_eq!(window_graph(&alt, 0, 2), g(3, &[(0, 1), (1, 2)]));
    let r = check_diamond(&alt, GraphKind::Oriented, 0, 2).unwrap();
    assert!(r.ok(), "{}", r.summary());
    assert_eq!(
        search_diamond(&alt, GraphKind::Oriented, 0, 4).unwrap().params.phi,
        Some(2)
    );

    // Two consecutive distinct transpositions compose to a 3-cycle, so
    // two-step products are oriented; full periods swap agents 0 and 2.
    let perm = counterexample_permutation(12).graphs();
    assert!(!check_diamond(&perm, GraphKind::Oriented, 0, 1).unwrap().ok());
    for t0 in 0..3 {
        assert!(check_diamond(&perm, GraphKind::Oriented, t0, 2).unwrap().ok());
        assert!(!check_diamond(&perm, GraphKind::Oriented, t0, 3).unwrap().ok());
    }
    assert!(check_diamond(&perm, GraphKind::Oriented, 0, 0).is_err());
}

#[test]
fn dstar_examples() {
    let sc = vec![g(3, &[(0, 1), (1, 2), (2, 0)]); 4];
    let r = check_dstar(&sc, 0, None).unwrap();
    assert!(r.ok());
    assert_eq!(r.params.j, Some(0));

    let (sh, _) = shifting_graphs();
    let r = check_dstar(&sh, 0, None).unwrap();
    assert_eq!(r.verdict, Verdict::Fails);
    assert!(r.first_violation.is_some());
    assert!(r.witnesses.iter().all(Option::is_some));
    assert!(r.notes.iter().any(|n| n.contains("weak variant holds")));

    let perm = counterexample_permutation(9).graphs();
    let r = check_dstar(&perm, 0, Some(3)).unwrap();
    assert!(r.ok());
    assert!(r.notes.iter().any(|n| n.contains("self-loops")));
}

#[test]
fn bic_examples() {
    let st = vec![g(3, &[(0, 1), (2, 1)]); 6];
    assert_eq!(check_bic(&st, 1).unwrap().verdict, Verdict::Holds);

    let even: Vec<Digraph> = (0..8)
        .map(|t| if t % 2 == 0 { g(2, &[(0, 1)]) } else { g(2, &[]) })
        .collect();
    assert!(check_bic(&even, 2).unwrap().ok());
    assert!(!check_bic(&even, 1).unwrap().ok());
    assert!(check_bic(&even, 0).is_err());

    let (sh, bounds) = shifting_graphs();
    let longest = bounds.windows(2).map(|w| w[1] - w[0]).max().unwrap();
    for phi in 1..longest {
        assert!(!check_bic(&sh, phi).unwrap().ok(), "phi {phi}");
    }
}
