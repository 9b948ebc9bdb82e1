use masakit_core::catalog::*;
use masakit_core::liecore::*;
use masakit_core::{ExactMatrix, ExactScalar};

fn q(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

fn masa(s: &Subalgebra) -> bool {
    is_abelian(s) && is_masa(s, &s.ambient.full()).unwrap()
}

#[test]
fn euclidean_examples() {
    let s = masa_euclidean(4, 2).unwrap();
    assert_eq!(physical_basis_strings(&s).unwrap(), ["L(1,2)", "L(3,4)"]);
    let s = masa_euclidean(5, 2).unwrap();
    assert_eq!(physical_basis_strings(&s).unwrap(), ["L(1,2)", "L(3,4)", "P5"]);
    assert_eq!(physical_basis_strings(&masa_euclidean(1, 0).unwrap()).unwrap(), ["P1"]);
    assert!(masa_euclidean(3, 2).is_err());
    assert_eq!(count_masa_classes_euclidean(4), 3);
    assert_eq!(count_masa_classes_euclidean(1), 1);
    assert_eq!(count_masa_classes_euclidean(7), 4);
    for p in 1..=5 {
        for l in 0..=p / 2 {
            assert!(masa(&masa_euclidean(p, l).unwrap()));
        }
    }
}

#[test]
fn op1_families() {
    for p in 2..=5 {
        let m = mans_op1(p).unwrap();
        assert_eq!(m.dim(), p - 1);
        assert!(m.basis.iter().all(|b| b.matrix.pow(3).is_zero()));
        assert!(masa(&m));
        assert!(is_mans(&m, &m.ambient.full()).unwrap());
    }
    assert!(mans_op1(1).is_err());

    let c = masa_op1(3, Op1Pattern::OdA { k: 1 }).unwrap();
    assert_eq!(c.dim(), 2);
    assert!(masa(&c));
    assert!(!span_is_nilpotent(&c));
    let b = masa_op1(2, Op1Pattern::OdB).unwrap();
    assert_eq!(b.dim(), 1);
    assert!(masa(&b));
    assert!(masa_op1(3, Op1Pattern::OdB).is_err());
    assert_eq!(masa_op1(4, Op1Pattern::Mans).unwrap().dim(), 3);
    for (p, k) in [(4, 0), (4, 2), (5, 3), (5, 1), (6, 2)] {
        assert!(masa(&masa_op1(p, Op1Pattern::OdA { k }).unwrap()), "p={p} k={k}");
    }
    assert!(masa(&masa_op1(6, Op1Pattern::OdB).unwrap()));
}

#[test]
fn splitting_examples() {
    let a = masa_ep1_splitting(3, SplitCase::A, 1, 1, None).unwrap();
    assert_eq!(a.dim(), 3);
    assert!(masa(&a));
    let b = masa_ep1_splitting(2, SplitCase::B, 1, 0, None).unwrap();
    assert_eq!(b.dim(), 2);
    assert!(masa(&b));
    let c = masa_ep1_splitting(4, SplitCase::C, 0, 0, Some(3)).unwrap();
    assert_eq!(c.dim(), 4);
    assert!(masa(&c));
    assert!(masa_ep1_splitting(4, SplitCase::C, 0, 0, Some(2)).is_err());
    assert!(masa_ep1_splitting(3, SplitCase::A, 0, 1, None).is_err());
    assert!(masa_ep1_splitting(3, SplitCase::B, 1, 1, None).is_err());
}

#[test]
fn splitting_admissible_list_p4() {
    for (case, kp, l, mu) in admissible_splitting(4) {
        let s = masa_ep1_splitting(4, case, kp, l, Some(mu).filter(|_| case == SplitCase::C)).unwrap();
        assert_eq!(s.dim(), split_dimension(case, kp, l, mu));
        assert!(masa(&s), "{case:?} {kp} {l}");
    }
}

#[test]
fn nonsplitting_examples() {
    let s = masa_ep1_nonsplitting(3, 0, 0, &NonsplitParams::Diagonal(vec![q(1), q(-1)])).unwrap();
    assert_eq!(s.dim(), 3);
    assert!(masa(&s));
    let m1 = masa_ep1_nonsplitting(2, 0, 0, &NonsplitParams::Mu1).unwrap();
    assert!(masa(&m1));
    assert!(masa_ep1_nonsplitting(3, 0, 0, &NonsplitParams::Diagonal(vec![q(0), q(0)])).is_err());
    assert!(masa_ep1_nonsplitting(3, 0, 0, &NonsplitParams::Diagonal(vec![q(1), q(1)])).is_err());
    assert!(masa_ep1_nonsplitting(4, 0, 0, &NonsplitParams::Diagonal(vec![q(1), q(-1), q(0)])).is_ok());
    // ties: positive before negative
    let half = ExactScalar::ratio(1, 2);
    let good = vec![q(1), half.clone(), -&half, q(-1)];
    assert!(check_normalized_diagonal(&good).is_err()); // |a_4| = 1 > 1/2
    let good = vec![q(1), q(-1), half.clone(), -&half];
    assert!(check_normalized_diagonal(&good).is_ok());
    let bad = vec![q(1), q(-1), -&half, half];
    assert!(check_normalized_diagonal(&bad).is_err());
}

#[test]
fn enumeration_patterns() {
    let ds = enumerate_ep1(2);
    assert_eq!(patterns(&ds), [(0, 0, 2), (0, 1, 0), (1, 0, 1), (2, 0, 0)]);
    let kappas: Vec<i64> = ds.iter().filter(|d| d.k == 2).map(|d| d.kappa.unwrap()).collect();
    assert_eq!(kappas, [0, 1, -1]);
    assert!(ds.iter().any(|d| d.kappa == Some(-1) && d.kappa_equivalent));

    let ds = enumerate_ep1(1);
    let got: Vec<Vec<String>> =
        ds.iter().map(|d| physical_basis_strings(&d.materialize().unwrap()).unwrap()).collect();
    assert_eq!(got, [vec!["L(0,1)"], vec!["P0", "P1"]]);

    for p in 1..=6 {
        let mut expect = Vec::new();
        for k in 0..=p {
            for l in 0..=(p - k) / 2 {
                expect.push((k, l, p - k - 2 * l));
            }
        }
        expect.sort();
        assert_eq!(patterns(&enumerate_ep1(p)), expect);
    }
}

#[test]
fn descriptors_materialize_as_masas() {
    for p in 1..=4 {
        for d in enumerate_ep1(p) {
            let s = d.materialize().unwrap();
            assert_eq!(s.dim(), d.dimension(), "{}", d.label());
            assert!(masa(&s), "{}", d.label());
        }
    }
}

#[test]
fn block_generator_names() {
    let d = MasaDescriptor::ep1(2, 2, 0, 0).unwrap().with_kappa(1).unwrap();
    let s = d.materialize().unwrap();
    assert_eq!(physical_basis_strings(&s).unwrap(), ["P0 - P1", "P0 + P1 + L(0,2) - L(1,2)"]);
}

#[test]
fn kravchuk_relations() {
    let k0 = lightcone_metric(1);
    let unit = |i: usize| {
        let mut a = ExactMatrix::zeros(1, 3);
        a.set_int(0, i, 1);
        KravchukPayload { a, s: ExactMatrix::zeros(3, 3), y: ExactMatrix::zeros(1, 1) }
    };
    let s = kravchuk_mans(1, &k0, &[unit(0), unit(1), unit(2)]).unwrap();
    assert!(masa(&s));
    // two payloads violating A K0 A'^T = A' K0 A^T: use a nonzero S on one side
    let mut sn = ExactMatrix::zeros(3, 3);
    sn.set_int(0, 1, 1);
    sn.set_int(1, 2, -1);
    let x = KravchukPayload { a: unit(0).a, s: sn, y: ExactMatrix::zeros(1, 1) };
    let err = kravchuk_mans(1, &k0, &[x, unit(1)]).unwrap_err();
    assert!(err.to_string().contains("A S' = A' S"), "{err}");
    assert!(KravchukSignature::new(1, 3, 3, 2).is_ok());
    assert!(KravchukSignature::new(2, 1, 3, 2).is_ok());
    assert!(KravchukSignature::new(3, 0, 3, 3).is_ok());
    assert!(KravchukSignature::new(1, 2, 3, 2).is_err());
}

#[test]
fn or2_catalog() {
    for r in 2..=5 {
        for kind in or2_kinds(r) {
            let s = masa_or2(r, &kind).unwrap();
            let sig = s.ambient.signature();
            assert_eq!((sig.p + usize::from(s.ambient.kind == AlgebraKind::Conformal), sig.q + usize::from(s.ambient.kind == AlgebraKind::Conformal)), (r, 2));
            assert!(masa(&s), "r={r} {kind:?}");
        }
    }
    assert_eq!(or2_kinds(2).len(), 6);
    assert!(masa(&masa_or2(6, &Or2Kind::Naoid).unwrap()));
    assert!(or2_degenerate(3, &Or2Kind::NonFreeRowed));
    assert_eq!(masa_or2(3, &Or2Kind::NonFreeRowed).unwrap().dim(), 2);
    assert!(masa_or2(3, &Or2Kind::TwoBlock { q: vec![q(1)] }).is_err());
    assert!(masa_or2(3, &Or2Kind::Naoid).is_err());
    assert!(masa_or2(3, &Or2Kind::O22Jordan).is_err());
    assert_eq!(masa_or2(4, &Or2Kind::NonFreeRowed).unwrap().dim(), 3);
    assert_eq!(masa_or2(5, &Or2Kind::FreeRowed).unwrap().dim(), 5);
    let n = masa_or2(4, &Or2Kind::Naoid).unwrap();
    assert!(naoid_complex_structure(&n));
    assert!(!naoid_complex_structure(&masa_or2(4, &Or2Kind::FreeRowed).unwrap()));
}

fn dilation(n: usize) -> ExactMatrix {
    let mut g = ExactMatrix::identity(n);
    g.set(0, 0, ExactScalar::ratio(1, 2));
    g.set(n - 1, n - 1, q(2));
    g
}

fn reference(s: &Subalgebra, exprs: &[String]) -> Subalgebra {
    Subalgebra::from_elements(exprs.iter().map(|e| s.ambient.parse_combination(e).unwrap()).collect()).unwrap()
}

#[test]
fn or2_reference_bases_up_to_dilation() {
    // two-block MANS, q = (1, -1, 0)
    let s = masa_or2(5, &Or2Kind::TwoBlock { q: vec![q(1), q(-1), q(0)] }).unwrap();
    let want = reference(&s, &["P0 - P1".into(), "P2 + L(0,2) - L(1,2)".into(), "P3 - L(0,3) + L(1,3)".into(), "P4".into()]);
    assert!(conjugate(&s, &dilation(7)).unwrap().same_span(&want));

    let s = masa_or2(2, &Or2Kind::O22Rotation).unwrap();
    // with [P_a, C_a] = 2 g_aa D the rotation-type generator is P0 - P1 - (C0 + C1);
    // the opposite sign squares to +4 (hyperbolic), the family generator to -1
    let want = reference(&s, &["D - L(0,1)".into(), "P0 - P1 - C0 - C1".into()]);
    assert!(!s.same_span(&want));
    assert!(conjugate(&s, &dilation(4)).unwrap().same_span(&want));
    let plus = s.ambient.parse_combination("P0 - P1 + C0 + C1").unwrap();
    assert_eq!(plus.matrix.pow(2), ExactMatrix::identity(4).scale(&q(4)));
    assert_eq!(s.basis[1].matrix.pow(2), ExactMatrix::identity(4).scale(&q(-1)));

    for k in 1..=3usize {
        let s = to_conformal_frame(&masa_or2(2 * k, &Or2Kind::Naoid).unwrap()).unwrap();
        let mut first = String::new();
        for j in 1..k {
            first += &format!("2 L({},{}) + ", 2 * j, 2 * j + 1);
        }
        first += "P0 - P1 - C0 - C1";
        let mut ex = vec![first];
        for j in (2..=2 * k - 2).step_by(2) {
            let j1 = j + 1;
            ex.push(format!("P{j} + P{j1} + L(0,{j}) + L(1,{j}) - L(0,{j1}) - L(1,{j1})"));
        }
        ex.push("P0 + P1".into());
        let want = reference(&s, &ex);
        assert!(conjugate(&s, &dilation(2 * k + 2)).unwrap().same_span(&want), "k={k}");
    }
}

#[test]
fn or2_physical_bases() {
    let s = masa_or2(4, &Or2Kind::FreeRowed).unwrap();
    let b = Subalgebra::from_elements((0..4).map(|i| s.ambient.p(i)).collect()).unwrap();
    assert!(s.same_span(&b));

    let s = masa_or2(5, &Or2Kind::NonFreeRowed).unwrap();
    let amb = s.ambient.clone();
    let e = |x: &str| amb.parse_combination(x).unwrap();
    assert_eq!(physical_basis_strings(&s).unwrap(), ["-P0 - P1 - 1/2 L(0,2) + 1/2 L(1,2)", "1/2 P0 - 1/2 P1", "P3", "P4"]);
    // the reference normalization is reached by the dilation exp(tD), e^t = 2
    let g = dilation(7);
    let reference = Subalgebra::from_elements(vec![e("P0 - P1"), e("L(0,2) - L(1,2) + P0 + P1"), e("P3"), e("P4")]).unwrap();
    assert!(!s.same_span(&reference));
    assert!(conjugate(&s, &g).unwrap().same_span(&reference));

    let s = masa_or2(2, &Or2Kind::O22Jordan).unwrap();
    let amb = s.ambient.clone();
    let e = |x: &str| amb.parse_combination(x).unwrap();
    let want = Subalgebra::from_elements(vec![e("P0 - P1"), e("D - L(0,1)")]).unwrap();
    assert!(s.same_span(&want), "{:?}", physical_basis_strings(&s));

    // round trip through the symbolic form
    for r in 2..=4 {
        for kind in or2_kinds(r) {
            let s = masa_or2(r, &kind).unwrap();
            let c = to_conformal_frame(&s).unwrap();
            let terms = physical_basis(&s).unwrap();
            assert!(materialize_terms(&c.ambient, &terms).unwrap().same_span(&c));
        }
    }
}
