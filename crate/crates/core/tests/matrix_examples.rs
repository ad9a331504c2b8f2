use agreement_core::matrix::*;
use agreement_core::scenario::counterexample_permutation;
use agreement_core::Error;

fn q(p: i64, d: i64) -> Rational {
    Rational::from_ratio(p, d)
}

fn m(rows: &[&[(i64, i64)]]) -> StochasticMatrix<Rational> {
    from_ratios(rows).unwrap()
}

fn half_absorbing() -> StochasticMatrix<Rational> {
    m(&[&[(1, 2), (1, 2)], &[(0, 1), (1, 1)]])
}

fn ergodic2() -> StochasticMatrix<Rational> {
    m(&[&[(1, 2), (1, 2)], &[(1, 1), (0, 1)]])
}

#[test]
fn osc_examples() {
    assert_eq!(osc(&[q(0, 1), q(1, 1), q(0, 1)]).unwrap(), q(1, 1));
    assert_eq!(osc(&vec![q(7, 3); 4]).unwrap(), q(0, 1));
    assert_eq!(osc(&[q(3, 1), q(-2, 1), q(5, 1), q(5, 1)]).unwrap(), q(7, 1));
    assert!(matches!(osc::<Rational>(&[]), Err(Error::Dimension(_))));
}

#[test]
fn seminorm_examples() {
    for n in 2..6 {
        assert_eq!(seminorm(&StochasticMatrix::<Rational>::identity(n)).unwrap(), q(1, 1));
    }
    let r1 = StochasticMatrix::rank_one(&[q(1, 6), q(1, 2), q(1, 3)]).unwrap();
    assert_eq!(seminorm(&r1).unwrap(), q(0, 1));
    assert_eq!(seminorm(&half_absorbing()).unwrap(), q(1, 2));
    let big = StochasticMatrix::<f64>::identity(21);
    assert!(matches!(seminorm(&big), Err(Error::Capability(_))));
}

#[test]
fn ergodicity_coefficient_examples() {
    let c = erg_coeffs(&half_absorbing());
    assert_eq!((c.delta, c.lambda), (q(1, 2), q(1, 2)));
    let c = erg_coeffs(&StochasticMatrix::<Rational>::identity(2));
    assert_eq!((c.delta, c.lambda), (q(1, 1), q(1, 1)));
    let c = erg_coeffs(&StochasticMatrix::rank_one(&[q(1, 4), q(3, 4)]).unwrap());
    assert_eq!((c.delta, c.lambda), (q(0, 1), q(0, 1)));
}

#[test]
fn column_bound_examples() {
    assert_eq!(column_bound(&half_absorbing()), q(1, 2));
    assert_eq!(column_bound(&StochasticMatrix::<Rational>::uniform(4)), q(0, 1));
    let p = StochasticMatrix::<Rational>::permutation(&[2, 0, 3, 1]);
    assert_eq!(column_bound(&p), q(1, 1));
}

#[test]
fn ergodicity_examples() {
    assert!(!is_ergodic(&StochasticMatrix::<Rational>::identity(3)));
    assert!(!is_ergodic(&StochasticMatrix::<Rational>::permutation(&[1, 0])));
    let a = ergodic2();
    assert!(is_ergodic(&a));
    let a2 = a.mul(&a).unwrap();
    assert_eq!(a2.entries(), &[q(3, 4), q(1, 4), q(1, 2), q(1, 2)]);
}

#[test]
fn chain_product_examples() {
    let a = ergodic2();
    assert_eq!(chain_product(std::slice::from_ref(&a)).unwrap(), a);
    let id = id_n(2);
    let p = StochasticMatrix::permutation(&[1, 0]);
    assert_eq!(chain_product(&[p.clone(), id.clone()]).unwrap().entries(), p.entries());
    assert_eq!(chain_product(&[id, p.clone()]).unwrap().entries(), p.entries());
    let t = counterexample_permutation(3);
    let prod = chain_product(t.matrices()).unwrap();
    assert_eq!(
        prod.entries(),
        StochasticMatrix::<Rational>::permutation(&[2, 1, 0]).entries()
    );
    assert!(matches!(
        chain_product::<Rational>(&[id_n(2), id_n(3)]),
        Err(Error::Dimension(_))
    ));
}

fn id_n(n: usize) -> StochasticMatrix<Rational> {
    StochasticMatrix::identity(n)
}

#[test]
fn certificate_examples() {
    let a = ergodic2().map(|v| v.to_f64());
    let cert = convergence_certificate(&vec![a; 60], &1e-9).unwrap();
    assert!(cert.converged && cert.nonincreasing);
    let row = cert.limit_row.unwrap();
    assert!((row[0] - 2.0 / 3.0).abs() < 1e-9 && (row[1] - 1.0 / 3.0).abs() < 1e-9);

    let cert = convergence_certificate(&vec![id_n(3); 10], &q(1, 1000)).unwrap();
    assert!(!cert.converged);
    assert_eq!(cert.final_seminorm, q(1, 1));

    let t = counterexample_permutation(21);
    let cert = convergence_certificate(t.matrices(), &q(1, 1000)).unwrap();
    assert!(!cert.converged);
    assert!(cert.seminorms.iter().all(|s| *s == q(1, 1)));

    assert!(convergence_certificate(&[id_n(2)], &q(0, 1)).is_err());
}

#[test]
fn wolfowitz_examples() {
    let r = wolfowitz_contraction(&[ergodic2()], DEFAULT_PRODUCT_CAP).unwrap();
    assert_eq!(r.length, 5);
    // A^5 = [[21/32, 11/32], [11/16, 5/16]].
    assert_eq!(r.max_seminorm, q(1, 32));
    assert!(r.all_ergodic);

    let r1 = StochasticMatrix::rank_one(&[q(1, 3), q(2, 3)]).unwrap();
    assert_eq!(
        wolfowitz_contraction(&[r1], DEFAULT_PRODUCT_CAP).unwrap().max_seminorm,
        q(0, 1)
    );

    let r = wolfowitz_contraction(&[id_n(2)], DEFAULT_PRODUCT_CAP).unwrap();
    assert_eq!(r.max_seminorm, q(1, 1));
    assert!(!r.all_ergodic && r.non_ergodic_witness.is_some());

    let set = vec![ergodic2(); 3];
    assert!(matches!(
        wolfowitz_contraction(&set, 100),
        Err(Error::EnumerationCap { .. })
    ));
}
