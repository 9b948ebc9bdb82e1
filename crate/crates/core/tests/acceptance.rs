//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria that cannot hold as stated fail here and report the reason.
//! Runs without the test harness so the lines always show. It exits nonzero
//! only when a failure is missing from `KNOWN_UNATTAINABLE`.

use std::time::{Duration, Instant};

use masakit_core::catalog::*;
use masakit_core::charts::*;
use masakit_core::cocycle::*;
use masakit_core::conformal::{conformally_equivalent, is_masa_upstairs, swap_transform};
use masakit_core::liecore::*;
use masakit_core::{ExactMatrix, ExactScalar};
use num_dual::{Dual2DVec64, DualNum as _};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_UNATTAINABLE: &[(u32, &str)] = &[
    (5, "with 2l = p no translation is left and D commutes with every rotation, so the algebra is not maximal upstairs"),
    (8, "the split-chart radial factor r^(-k/2) leaves a residual -m/r; r^(-(k-1)/2) is the one that solves"),
    (9, "the two sides of the stated identity differ by an overall sign"),
];

struct Outcome {
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }
}

fn masa(s: &Subalgebra) -> bool {
    is_abelian(s) && is_masa(s, &s.ambient.full()).unwrap()
}

fn span(p: usize, q: usize, exprs: &[&str]) -> Subalgebra {
    let e = build_epq(p, q).unwrap();
    let elems = exprs.iter().map(|x| e.parse_combination(x).unwrap()).collect();
    Subalgebra::from_elements(elems).unwrap()
}

fn criterion_1(o: &mut Outcome) {
    for p in 1..=7 {
        for l in 0..=p / 2 {
            let s = masa_euclidean(p, l).unwrap();
            o.check(masa(&s), || format!("p={p} l={l} not a MASA"));
            o.check(s.dim() == p - l, || format!("p={p} l={l} dim {}", s.dim()));
        }
        let n = enumerate_euclidean(p).len();
        o.check(n == p / 2 + 1, || format!("p={p}: {n} classes"));
    }
}

fn criterion_2(o: &mut Outcome) {
    for p in 2..=7 {
        let m = mans_op1(p).unwrap();
        o.check(m.dim() == p - 1, || format!("p={p} dim {}", m.dim()));
        o.check(m.basis.iter().all(is_nilpotent) && span_is_nilpotent(&m), || format!("p={p} not nilpotent"));
        o.check(masa(&m), || format!("p={p} not a MASA"));
    }
}

fn criterion_3(o: &mut Outcome) {
    for p in 2..=6 {
        let list = admissible_splitting(p);
        o.check(!list.is_empty(), || format!("p={p}: nothing admissible"));
        for (case, kp, l, mu) in list {
            let s = masa_ep1_splitting(p, case, kp, l, Some(mu).filter(|_| case == SplitCase::C)).unwrap();
            let want = match case {
                SplitCase::C => mu + l + kp + 1,
                _ => 1 + l + kp,
            };
            let (lo, hi) = split_bounds(case, p);
            let tag = format!("p={p} {case:?} k+={kp} l={l} mu={mu}");
            o.check(s.dim() == want, || format!("{tag}: dim {} != {want}", s.dim()));
            o.check(lo <= want && want <= hi, || format!("{tag}: {want} outside [{lo},{hi}]"));
            o.check(masa(&s), || format!("{tag}: not a MASA"));
        }
    }
}

fn criterion_4(o: &mut Outcome) {
    for p in 3..=5 {
        for (case, kp, l, mu) in admissible_splitting(p) {
            let tag = format!("p={p} {case:?} k+={kp} l={l} mu={mu}");
            if case != SplitCase::C {
                let s = masa_ep1_splitting(p, case, kp, l, None).unwrap();
                let prob = CocycleProblem::from_splitting(&s).unwrap();
                let d = quotient_dimension(&prob).unwrap();
                o.check(d == 0, || format!("{tag}: quotient dimension {d}"));
                continue;
            }
            let prob = CocycleProblem::case_c(p, kp, l).unwrap();
            let (rows, cols) = prob.sym_block.clone().unwrap();
            for sol in solve_cocycles(&prob).unwrap() {
                let a = ExactMatrix::from_rows(
                    rows.iter().map(|&r| cols.iter().map(|&c| sol.alpha.get(r, c).clone()).collect()).collect(),
                )
                .unwrap();
                o.check(a.is_symmetric(), || format!("{tag}: A not symmetric"));
                // no tail along the remaining complement directions; a single
                // block keeps one isotropic tail instead (the kappa family)
                let stray = rows.iter().any(|&r| (0..prob.n_complement()).any(|c| !cols.contains(&c) && !sol.alpha.get(r, c).is_zero()));
                o.check(mu == 1 || !stray, || format!("{tag}: tail outside the symmetric block"));
            }
            if mu == 1 {
                let d = quotient_dimension(&prob).unwrap();
                o.check(d == 1, || format!("{tag}: quotient dimension {d}, expected the kappa line"));
            }
            // a generic diagonal tail, normalized and materialized
            let mut alpha = ExactMatrix::zeros(prob.j(), prob.n_complement());
            for (i, (&r, &c)) in rows.iter().zip(&cols).enumerate() {
                alpha.set(r, c, ExactScalar::from_int((i * i) as i64 + 3 * i as i64));
            }
            let sol = CocycleSolution { alpha, coboundary: false, canonical: None };
            o.check(verify_solution(&prob, &sol).unwrap(), || format!("{tag}: diagonal tail rejected"));
            let n = normalize(&sol, &prob).unwrap();
            match &n.canonical {
                Some(NormalForm::Diagonal(d)) => {
                    let tr = d.iter().fold(ExactScalar::zero(), |acc, x| acc + x.clone());
                    o.check(tr.is_zero(), || format!("{tag}: trace {tr}"));
                    o.check(check_normalized_diagonal(d).is_ok(), || format!("{tag}: {d:?} not ordered"));
                }
                Some(NormalForm::Zero) => o.check(mu == 1, || format!("{tag}: generic tail normalized to zero")),
                other => o.check(false, || format!("{tag}: normal form {other:?}")),
            }
            if mu >= 2 {
                let s = prob.substitute(&n.alpha).unwrap();
                o.check(masa(&s), || format!("{tag}: normalized algebra not a MASA"));
            }
        }
    }
    for p in 2..=5 {
        for d in enumerate_ep1(p).into_iter().filter(|d| matches!(d.case, MasaCase::NonsplitC | MasaCase::NonsplitMu1)) {
            o.check(masa(&d.materialize().unwrap()), || format!("{} not a MASA", d.label()));
        }
    }
}

fn criterion_5(o: &mut Outcome) {
    for p in 2..=6 {
        for l in 0..=p / 2 {
            let s = masa_euclidean(p, l).unwrap();
            o.check(is_masa_upstairs(&s).unwrap(), || format!("p={p} l={l} not maximal upstairs"));
        }
    }
}

fn criterion_6(o: &mut Outcome) {
    let j = ExactMatrix::from_ints(&[&[0, 1], &[1, 0]]);
    for p in 3..=6 {
        // κ = 0, k = 2 against the translation-extended family
        let mut a: Vec<String> = vec!["L(0,2) - L(1,2)".into(), "P0 - P1".into()];
        let mut b: Vec<String> = vec!["P0 - P1".into(), "P2".into()];
        for i in 3..=p {
            a.push(format!("P{i}"));
            b.push(format!("L(0,{i}) - L(1,{i})"));
        }
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        let b: Vec<&str> = b.iter().map(String::as_str).collect();
        let g = swap_transform(p, &j).unwrap();
        o.check(conformally_equivalent(&span(p, 1, &a), &span(p, 1, &b), &g).unwrap(), || format!("p={p}: swap fails"));
    }
    let a = span(5, 1, &["P0 - P1", "L(0,2) - L(1,2)", "L(0,3) - L(1,3)", "L(4,5)"]);
    let b = span(5, 1, &["L(4,5)", "P0 - P1", "P2", "P3"]);
    let g = swap_transform(5, &j).unwrap();
    o.check(conformally_equivalent(&a, &b, &g).unwrap(), || "worked example in e(5,1) not equivalent".into());
}

fn criterion_7(o: &mut Outcome) {
    for r in 2..=5 {
        for kind in or2_kinds(r) {
            let s = masa_or2(r, &kind).unwrap();
            o.check(masa(&s), || format!("r={r} {kind:?} not a MASA"));
        }
    }
    let n = or2_kinds(2).len();
    o.check(n == 6, || format!("{n} kinds at r=2"));
}

/// Entry-wise relative error, absolute where the expected entry vanishes.
fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

fn criterion_8(o: &mut Outcome) {
    for k in 2..=5 {
        let c = chart_null_split(k).unwrap();
        for u in c.sample_points(20, 100 + k as u64) {
            let r = u[k];
            let op = c.lb_coefficients(&u).unwrap();
            let mut err = rel_err(2.0 * op.second[(0, k)], 2.0).max(rel_err(op.first[0], (k as f64 - 1.0) / r));
            for i in 1..k {
                err = err.max(rel_err(op.second[(i, i)], 1.0 / (r * r)));
            }
            for i in 0..=k {
                for j in 0..=k {
                    let expected = match (i.min(j), i.max(j)) {
                        (0, m) if m == k => 1.0,
                        (a, b) if a == b && a >= 1 && a < k => 1.0 / (r * r),
                        _ => 0.0,
                    };
                    err = err.max(rel_err(op.second[(i, j)], expected));
                }
                if i > 0 {
                    err = err.max(op.first[i].abs());
                }
            }
            o.check(err < 1e-7, || format!("split k={k} at {u:?}: error {err:e}"));
        }
    }
    for q in [vec![1.0, -1.0], vec![2.5, 3.0, 4.0], vec![1.0, 0.5, -0.5, -1.0]] {
        let c = chart_null_nonsplit(&q).unwrap();
        let k = q.len() + 1;
        for u in c.sample_points(20, 200 + k as u64) {
            let r = u[k];
            let op = c.lb_coefficients(&u).unwrap();
            let drift: f64 = -q.iter().map(|qi| 1.0 / (qi - r)).sum::<f64>();
            let mut err = rel_err(op.first[0], drift).max(rel_err(op.second[(0, k)], 1.0));
            for (i, qi) in q.iter().enumerate() {
                err = err.max(rel_err(op.second[(i + 1, i + 1)], 1.0 / ((qi - r) * (qi - r))));
            }
            o.check(err < 1e-7, || format!("nonsplit q={q:?} at {u:?}: error {err:e}"));
        }
    }
    let (m, energy) = (0.7, 1.3);
    for k in 2..=4 {
        let c = chart_null_split(k).unwrap();
        let a = null_block_ansatz_split(k, m, vec![0.5; k - 1], energy, k as f64 / 2.0);
        let res = verify_separated_solution(&c, &a, energy, 20, 31).unwrap();
        o.check(res < 1e-8, || format!("split k={k} separated solution residual {res:e}"));
    }
    let q = vec![2.5, 3.0, 4.0];
    let c = chart_null_nonsplit(&q).unwrap();
    let a = null_block_ansatz_nonsplit(q, m, vec![0.4, -0.3, 0.2], energy);
    let res = verify_separated_solution(&c, &a, energy, 20, 32).unwrap();
    o.check(res < 1e-8, || format!("nonsplit separated solution residual {res:e}"));
}

fn criterion_9(o: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 3..=4 {
        let link = conformal_cartesian_link(&chart_null_split(k).unwrap()).unwrap();
        let w: Vec<f64> = (0..=k).map(|i| 0.2 + 0.15 * i as f64).collect();
        let phi = move |x: &[Dual2DVec64]| {
            let lin: Dual2DVec64 = x.iter().zip(&w).map(|(v, c)| v.clone() * *c).sum();
            lin.sin() + x[0].clone() * x[1].clone()
        };
        for _ in 0..10 {
            let y: Vec<f64> = loop {
                let y: Vec<f64> = (0..=k).map(|_| rng.gen_range(-0.5..1.5)).collect();
                if y[0] + y[k] > 0.2 {
                    break y;
                }
            };
            let trip = link.round_trip_error(&y);
            o.check(trip < 1e-10, || format!("k={k} round trip {trip:e}"));
            let dev = link.similarity_deviation(&phi, &y, 1.0);
            o.check(dev < 1e-8, || format!("k={k} y={y:?}: deviation {dev:e}"));
        }
    }
}

fn sample_element(amb: &std::sync::Arc<AmbientAlgebra>, rng: &mut ChaCha8Rng) -> LieElement {
    let mut m = ExactMatrix::zeros(amb.size(), amb.size());
    for b in &amb.basis {
        m = m.try_add(&b.scale(&ExactScalar::from_int(rng.gen_range(-3..=3)))).unwrap();
    }
    LieElement::new(m, amb.clone()).unwrap()
}

fn criterion_10(o: &mut Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 1..=7 {
        for q in 0..=n / 2 {
            let p = n - q;
            for (name, amb) in [("e", build_epq(p, q)), ("o", build_opq(p, q)), ("c", build_conformal(p, q))] {
                let amb = amb.unwrap();
                let tag = format!("{name}({p},{q})");
                o.check(amb.ext == amb.ext.transpose(), || format!("{tag}: metric not symmetric"));
                let full = amb.full();
                o.check(amb.basis.iter().all(|b| amb.contains_matrix(b)), || format!("{tag}: basis leaves the metric"));
                let elems = full.basis.clone();
                for (i, x) in elems.iter().enumerate() {
                    for y in &elems[i..] {
                        let xy = bracket(x, y).unwrap();
                        let yx = bracket(y, x).unwrap();
                        o.check(xy.add(&yx).unwrap().is_zero(), || format!("{tag}: antisymmetry"));
                        o.check(amb.contains_matrix(&xy.matrix), || format!("{tag}: bracket leaves the algebra"));
                    }
                }
                let exhaustive = elems.len() <= 10;
                let triples: Vec<(LieElement, LieElement, LieElement)> = if exhaustive {
                    let mut t = Vec::new();
                    for a in 0..elems.len() {
                        for b in a + 1..elems.len() {
                            for c in b + 1..elems.len() {
                                t.push((elems[a].clone(), elems[b].clone(), elems[c].clone()));
                            }
                        }
                    }
                    t
                } else {
                    (0..12).map(|_| (sample_element(&amb, &mut rng), sample_element(&amb, &mut rng), sample_element(&amb, &mut rng))).collect()
                };
                for (x, y, z) in triples {
                    let t1 = bracket(&x, &bracket(&y, &z).unwrap()).unwrap();
                    let t2 = bracket(&y, &bracket(&z, &x).unwrap()).unwrap();
                    let t3 = bracket(&z, &bracket(&x, &y).unwrap()).unwrap();
                    o.check(t1.add(&t2).unwrap().add(&t3).unwrap().is_zero(), || format!("{tag}: Jacobi"));
                }
            }
        }
    }
}

fn main() {
    type Criterion = fn(&mut Outcome);
    let criteria: [(u32, &str, Criterion, u64); 10] = [
        (1, "Euclidean MASAs and class count, p = 1..7", criterion_1, 10),
        (2, "o(p,1) MANS, p = 2..7", criterion_2, 10),
        (3, "splitting e(p,1) dimension formulas, p = 2..6", criterion_3, 60),
        (4, "cocycle pipeline, p = 3..5", criterion_4, 60),
        (5, "conformal maximality of Euclidean MASAs, p = 2..6", criterion_5, 60),
        (6, "swap equivalences", criterion_6, 10),
        (7, "o(r,2) catalog, r = 2..5", criterion_7, 30),
        (8, "null-rotation charts: operators and separated solutions", criterion_8, 30),
        (9, "conformal-Cartesian similarity, k = 3, 4", criterion_9, 10),
        (10, "structural identities up to n = 7", criterion_10, 30),
    ];
    let mut failed = Vec::new();
    for (id, title, run, budget) in criteria {
        let start = Instant::now();
        let mut o = Outcome::new();
        run(&mut o);
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(budget) {
            o.failures.push(format!("took {elapsed:.1?}, budget {budget} s"));
        }
        if o.failures.is_empty() {
            println!("PASS  criterion {id:>2}: {title} ({elapsed:.2?})");
        } else {
            let note = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id).map(|(_, why)| *why);
            println!("FAIL  criterion {id:>2}: {title} ({elapsed:.2?})");
            for f in o.failures.iter().take(5) {
                println!("        {f}");
            }
            if o.failures.len() > 5 {
                println!("        ... {} more", o.failures.len() - 5);
            }
            if let Some(why) = note {
                println!("        known: {why}");
            }
            failed.push(id);
        }
    }
    let unexpected: Vec<u32> = failed.iter().copied().filter(|id| !KNOWN_UNATTAINABLE.iter().any(|(k, _)| k == id)).collect();
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
    println!("acceptance: {} passed, {} known failures", 10 - failed.len(), failed.len());
}
