use masakit_core::catalog::*;
use masakit_core::cocycle::*;
use masakit_core::liecore::*;
use masakit_core::{ExactMatrix, ExactScalar};

fn q(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

fn diag(d: &[i64]) -> ExactMatrix {
    ExactMatrix::diag_ints(d)
}

#[test]
fn cases_a_and_b_have_only_coboundaries() {
    for p in 3..=5 {
        for (case, kp, l, _) in admissible_splitting(p) {
            if case == SplitCase::C {
                continue;
            }
            let s = masa_ep1_splitting(p, case, kp, l, None).unwrap();
            let prob = CocycleProblem::from_splitting(&s).unwrap();
            assert_eq!(quotient_dimension(&prob).unwrap(), 0, "{case:?} p={p} k+={kp} l={l}");
            assert!(coboundaries_in_solutions(&prob).unwrap());
            assert!(solve_cocycles(&prob).unwrap().iter().all(|s| s.coboundary));
        }
    }
}

/// Independent count: symmetric mu x mu blocks modulo multiples of I, plus
/// the extra isotropic tail that survives only when mu = 1.
fn expected_quotient(mu: usize) -> usize {
    if mu == 1 {
        1
    } else {
        mu * (mu + 1) / 2 - 1
    }
}

#[test]
fn case_c_solutions_are_symmetric() {
    let prob = CocycleProblem::case_c(4, 0, 0).unwrap();
    let sols = solve_cocycles(&prob).unwrap();
    for s in &sols {
        assert!(verify_solution(&prob, s).unwrap());
        let a = s.alpha.block(0, 0, 3, 3);
        assert!(a.is_symmetric());
        // no tail along the second isotropic direction
        assert!((0..3).all(|r| s.alpha.get(r, 3).is_zero()));
    }
    assert_eq!(quotient_dimension(&prob).unwrap(), 5);
    let cob = coboundaries(&prob).unwrap();
    let ids: Vec<ExactMatrix> = cob.iter().map(|c| c.alpha.block(0, 0, 3, 3)).collect();
    assert_eq!(ids.len(), 1);
    assert_eq!(ids[0].rank(), 3);
    assert!(ids[0].is_diagonal());
    let d = ids[0].diagonal();
    assert!(d.iter().all(|x| *x == d[0]));
}

#[test]
fn case_c_quotient_dimension_by_count() {
    for p in 2..=5 {
        for (case, kp, l, mu) in admissible_splitting(p) {
            if case != SplitCase::C {
                continue;
            }
            let prob = CocycleProblem::case_c(p, kp, l).unwrap();
            assert_eq!(quotient_dimension(&prob).unwrap(), expected_quotient(mu), "p={p} k+={kp} l={l}");
            assert!(coboundaries_in_solutions(&prob).unwrap());
        }
    }
}

#[test]
fn rotation_coboundary_pattern() {
    let e = build_epq(2, 0).unwrap();
    let s = Subalgebra::from_elements(vec![e.l(1, 2)]).unwrap();
    let prob = CocycleProblem::from_splitting(&s).unwrap();
    let cob = coboundaries(&prob).unwrap();
    assert_eq!(cob.len(), 2);
    // conjugating L12 by exp(c1 P1 + c2 P2) adds c1 P2 - c2 P1 (up to overall sign)
    for (i, c) in cob.iter().enumerate() {
        let t = prob.substitute(&c.alpha).unwrap().basis[0].clone();
        let tail = t.sub(&e.l(1, 2)).unwrap();
        let other = if i == 0 { e.p(2) } else { e.p(1) };
        assert!(Subalgebra::from_elements(vec![other]).unwrap().same_span(&Subalgebra::from_elements(vec![tail]).unwrap()));
    }

    let t = Subalgebra::from_elements(vec![e.p(1), e.p(2)]).unwrap();
    let prob = CocycleProblem::from_splitting(&t).unwrap();
    assert!(coboundaries(&prob).unwrap().is_empty());
}

#[test]
fn normal_forms() {
    assert_eq!(normalize_matrix(&diag(&[3, 1])).unwrap(), NormalForm::Diagonal(vec![q(1), q(-1)]));
    assert_eq!(normalize_matrix(&diag(&[5, 5, 5])).unwrap(), NormalForm::Zero);
    assert_eq!(normalize_matrix(&diag(&[-2, 0, 2])).unwrap(), NormalForm::Diagonal(vec![q(1), q(-1), q(0)]));
    assert_eq!(
        normalize_matrix(&diag(&[0, 3, -1, 1])).unwrap(),
        // shift by 3/4, scale by 9/4
        NormalForm::Diagonal(vec![q(1), ExactScalar::ratio(-7, 9), ExactScalar::ratio(-1, 3), ExactScalar::ratio(1, 9)])
    );
    let bad = ExactMatrix::from_ints(&[&[1, 2], &[0, 1]]);
    assert!(normalize_matrix(&bad).is_err());
    let sym = ExactMatrix::from_ints(&[&[1, 1], &[1, -1]]);
    match normalize_matrix(&sym).unwrap() {
        NormalForm::Uncanonical { charpoly, .. } => assert_eq!(charpoly, vec![q(-2), q(0), q(1)]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn normalize_solution_and_materialize() {
    let prob = CocycleProblem::case_c(3, 0, 0).unwrap();
    let mut alpha = ExactMatrix::zeros(prob.j(), prob.n_complement());
    alpha.set_int(0, 0, 3);
    alpha.set_int(1, 1, 1);
    let sol = CocycleSolution { alpha, coboundary: false, canonical: None };
    assert!(verify_solution(&prob, &sol).unwrap());
    let n = normalize(&sol, &prob).unwrap();
    assert_eq!(n.canonical, Some(NormalForm::Diagonal(vec![q(1), q(-1)])));
    assert!(verify_solution(&prob, &n).unwrap());
    assert_eq!(normalize(&n, &prob).unwrap(), n);
    let s = prob.substitute(&n.alpha).unwrap();
    assert!(is_masa(&s, &s.ambient.full()).unwrap());
    let direct = masa_ep1_nonsplitting(3, 0, 0, &NonsplitParams::Diagonal(vec![q(1), q(-1)])).unwrap();
    assert!(s.same_span(&direct));
}
