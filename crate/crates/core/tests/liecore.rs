use masakit_core::exactla::ExactMatrix;
use masakit_core::liecore::*;
use masakit_core::{Error, ExactScalar};

fn q(n: i64, d: i64) -> ExactScalar {
    ExactScalar::ratio(n, d)
}

#[test]
fn translation_rotation_brackets() {
    let e2 = build_epq(2, 0).unwrap();
    assert_eq!(bracket(&e2.p(1), &e2.l(1, 2)).unwrap(), e2.p(2));

    let e31 = build_epq(3, 1).unwrap();
    assert!(bracket(&e31.p(1), &e31.p(2)).unwrap().is_zero());

    // index 0 is the negative direction when q = 1
    let e11 = build_epq(1, 1).unwrap();
    assert_eq!(bracket(&e11.p(0), &e11.l(1, 0)).unwrap(), e11.p(1));
}

#[test]
fn rotation_brackets() {
    let e3 = build_epq(3, 0).unwrap();
    let x = bracket(&e3.l(1, 2), &e3.l(1, 3)).unwrap();
    assert_eq!(x, e3.l(2, 3).scale_int(-1));
    assert!(bracket(&e3.l(1, 2), &e3.l(1, 2)).unwrap().is_zero());

    let e21 = build_epq(2, 1).unwrap();
    assert_eq!(bracket(&e21.l(1, 0), &e21.l(2, 0)).unwrap(), e21.l(1, 2));
}

#[test]
fn comm1_for_every_index_triple() {
    for (p, qq) in [(3, 0), (2, 1), (3, 1), (2, 2)] {
        let e = build_epq(p, qq).unwrap();
        let sig = e.signature();
        let n = sig.n();
        let idx = |pos: usize| if qq == 1 && pos == p { 0 } else { pos + 1 };
        for a in 0..n {
            for m in 0..n {
                for v in 0..n {
                    if m == v {
                        continue;
                    }
                    let lhs = bracket(&e.p(idx(a)), &e.l(idx(m), idx(v))).unwrap();
                    let mut rhs = LieElement::zero(&e);
                    if a == m {
                        rhs = rhs.add(&e.p(idx(v)).scale_int(sig.g(a))).unwrap();
                    }
                    if a == v {
                        rhs = rhs.sub(&e.p(idx(m)).scale_int(sig.g(a))).unwrap();
                    }
                    assert_eq!(lhs, rhs, "e({p},{qq}) a={a} m={m} v={v}");
                }
            }
        }
    }
}

#[test]
fn bad_signatures() {
    assert!(build_epq(1, 2).is_err());
    assert!(build_epq(0, 0).is_err());
}

#[test]
fn ambient_mismatch() {
    let a = build_epq(2, 0).unwrap();
    let b = build_epq(3, 0).unwrap();
    assert_eq!(bracket(&a.p(1), &b.p(1)).unwrap_err(), Error::AmbientMismatch);
}

#[test]
fn basis_sizes() {
    for n in 1..=5 {
        for qq in 0..=n / 2 {
            let p = n - qq;
            assert_eq!(build_epq(p, qq).unwrap().dim(), n * (n - 1) / 2 + n);
            assert_eq!(build_conformal(p, qq).unwrap().dim(), (n + 2) * (n + 1) / 2);
            assert_eq!(build_opq(p, qq).unwrap().dim(), n * (n - 1) / 2);
        }
    }
}

#[test]
fn span_membership() {
    let e = build_epq(3, 0).unwrap();
    let s1 = Subalgebra::from_elements(vec![e.p(1)]).unwrap();
    assert!(span_contains(&s1, &e.p(1).scale_int(3)).unwrap());
    assert!(!span_contains(&s1, &e.p(2)).unwrap());
    let s2 = Subalgebra::from_elements(vec![e.l(1, 2), e.p(3)]).unwrap();
    let x = e.l(1, 2).sub(&e.p(3).scale_int(7)).unwrap();
    assert!(span_contains(&s2, &x).unwrap());
}

#[test]
fn centralizer_examples() {
    // T(1) = {P4} inside o(4,0): centralizer is the o(3,0) on indices 1..3
    let e4 = build_epq(4, 0).unwrap();
    let t = Subalgebra::from_elements(vec![e4.p(4)]).unwrap();
    let rots: Vec<LieElement> = e4.full().basis.into_iter().filter(|b| b.matrix.get(0, 4).is_zero()
        && (0..4).all(|i| b.matrix.get(i, 4).is_zero())).collect();
    let o4 = Subalgebra::from_elements(rots).unwrap();
    assert_eq!(o4.dim(), 6);
    let c = centralizer(&t, &o4).unwrap();
    let expect = Subalgebra::from_elements(vec![e4.l(1, 2), e4.l(1, 3), e4.l(2, 3)]).unwrap();
    assert!(c.same_span(&expect));

    let e2 = build_epq(2, 0).unwrap();
    let full = e2.full();
    assert_eq!(centralizer(&full, &full).unwrap().dim(), 0);

    let e1 = build_epq(1, 0).unwrap();
    let p1 = Subalgebra::from_elements(vec![e1.p(1)]).unwrap();
    assert!(centralizer(&p1, &e1.full()).unwrap().same_span(&p1));
}

#[test]
fn abelian_and_masa_examples() {
    let e3 = build_epq(3, 0).unwrap();
    let ps = Subalgebra::from_elements(vec![e3.p(1), e3.p(2), e3.p(3)]).unwrap();
    assert!(is_abelian(&ps));
    let ls = Subalgebra::from_elements(vec![e3.l(1, 2), e3.l(1, 3)]).unwrap_or_else(|_| unreachable!());
    assert!(!is_abelian(&ls));
    assert!(is_abelian(&Subalgebra::empty(&e3)));
    assert_eq!(is_masa(&ls, &e3.full()).unwrap_err(), Error::NotAbelian);

    let e2 = build_epq(2, 0).unwrap();
    let l12 = Subalgebra::from_elements(vec![e2.l(1, 2)]).unwrap();
    assert!(is_masa(&l12, &e2.full()).unwrap());
    let t2 = Subalgebra::from_elements(vec![e2.p(1), e2.p(2)]).unwrap();
    assert!(is_masa(&t2, &e2.full()).unwrap());

    let p3 = Subalgebra::from_elements(vec![e3.p(3)]).unwrap();
    assert!(!is_masa(&p3, &e3.full()).unwrap());
    let c = centralizer(&p3, &e3.full()).unwrap();
    assert!(span_contains(&c, &e3.l(1, 2)).unwrap());
}

#[test]
fn nilpotency() {
    let e2 = build_epq(2, 0).unwrap();
    assert!(is_nilpotent(&e2.p(1)));
    let l = e2.l(1, 2);
    assert!(!is_nilpotent(&l));
    let cube = l.matrix.pow(3);
    assert_eq!(cube, l.matrix.scale(&ExactScalar::from_int(-1)));
}

#[test]
fn conjugation() {
    let e2 = build_epq(2, 0).unwrap();
    let s = Subalgebra::from_elements(vec![e2.p(1)]).unwrap();
    let id = ExactMatrix::identity(3);
    assert!(conjugate(&s, &id).unwrap().same_span(&s));

    let g = rational_rotation(3, 0, 1, q(3, 5), q(4, 5));
    let c = conjugate(&s, &g).unwrap();
    let t = Subalgebra::from_elements(vec![e2.p(1), e2.p(2)]).unwrap();
    assert!(t.contains_span(&c));
    assert!(!c.same_span(&s));

    let mut bad = ExactMatrix::identity(3);
    bad.set_int(0, 0, 2);
    assert_eq!(conjugate(&s, &bad).unwrap_err(), Error::MetricViolation);
    assert_eq!(conjugate(&s, &ExactMatrix::zeros(3, 3)).unwrap_err(), Error::Singular);
}

#[test]
fn conformal_brackets() {
    for (p, qq) in [(2, 0), (3, 1), (2, 1)] {
        let c = build_conformal(p, qq).unwrap();
        let sig = c.signature();
        let n = sig.n();
        let idx = |pos: usize| if qq == 1 && pos == p { 0 } else { pos + 1 };
        let d = c.generator("D").unwrap();
        for m in 0..n {
            let pm = c.p(idx(m));
            let cm = c.generator(&format!("C{}", idx(m))).unwrap();
            assert_eq!(bracket(&pm, &d).unwrap(), pm);
            assert_eq!(bracket(&cm, &d).unwrap(), cm.scale_int(-1));
            for a in 0..n {
                let ca = c.generator(&format!("C{}", idx(a))).unwrap();
                let mut rhs = LieElement::zero(&c);
                if a == m {
                    rhs = d.scale_int(2 * sig.g(m));
                } else {
                    rhs = rhs.sub(&c.l(idx(m), idx(a)).scale_int(2)).unwrap();
                }
                assert_eq!(bracket(&pm, &ca).unwrap(), rhs, "P{m} C{a}");
            }
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        assert!(bracket(&d, &c.l(idx(a), idx(b))).unwrap().is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn frames_and_names() {
    // lightcone metric of o(2,1): antidiag(1,1,1)
    let mut k = ExactMatrix::zeros(3, 3);
    k.set_int(0, 2, 1);
    k.set_int(2, 0, 1);
    k.set_int(1, 1, 1);
    let amb = AmbientAlgebra::with_metric(AlgebraKind::Orthogonal, &k).unwrap();
    assert_eq!(amb.signature(), MetricSignature { p: 2, q: 1 });
    assert_eq!(amb.metric.matrix, k);
    for b in &amb.basis {
        assert!(amb.contains_matrix(b));
    }
    let x = amb.parse_combination("L(1,2) - 2 L(0,1)").unwrap();
    let t = x.terms().unwrap();
    // terms come back in generator order
    assert_eq!(format_terms(&t), "-2 L(0,1) + L(1,2)");
}

#[test]
fn parse_terms_forms() {
    let t = parse_terms("P0 - P1 + 1/2 L(0,2) - D").unwrap();
    let names: Vec<&str> = t.iter().map(|x| x.1.as_str()).collect();
    assert_eq!(names, ["P0", "P1", "L(0,2)", "D"]);
    assert_eq!(t[1].0, ExactScalar::from_int(-1));
    assert_eq!(t[2].0, q(1, 2));
}
