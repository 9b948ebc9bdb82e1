use clap::ValueEnum;
use masakit_core::catalog::*;
use masakit_core::charts::*;
use masakit_core::conformal::{canonical_conformal_class, conformally_equivalent, is_masa_upstairs, swap_transform};
use masakit_core::liecore::*;
use masakit_core::{ExactMatrix, Result};
use rayon::prelude::*;

use crate::format::float;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Euclid,
    Minkowski,
    Conformal,
    Charts,
    All,
}

pub struct Claim {
    pub suite: &'static str,
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

fn claim(suite: &'static str, name: String, r: Result<(bool, String)>) -> Claim {
    match r {
        Ok((ok, detail)) => Claim { suite, name, ok, detail },
        Err(e) => Claim { suite, name, ok: false, detail: format!("error: {e}") },
    }
}

fn masa(s: &Subalgebra) -> Result<bool> {
    Ok(is_abelian(s) && is_masa(s, &s.ambient.full())?)
}

pub struct Settings {
    pub max_p: usize,
    pub seed: u64,
    pub tolerance: f64,
}

pub fn run(suite: Suite, cfg: &Settings) -> Vec<Claim> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Euclid | Suite::All) {
        out.extend(euclid(cfg));
    }
    if matches!(suite, Suite::Minkowski | Suite::All) {
        out.extend(minkowski(cfg));
    }
    if matches!(suite, Suite::Conformal | Suite::All) {
        out.extend(conformal(cfg));
    }
    if matches!(suite, Suite::Charts | Suite::All) {
        out.extend(charts(cfg));
    }
    out
}

fn euclid(cfg: &Settings) -> Vec<Claim> {
    let jobs: Vec<(usize, usize)> = (1..=cfg.max_p).flat_map(|p| (0..=p / 2).map(move |l| (p, l))).collect();
    let mut out: Vec<Claim> = jobs
        .par_iter()
        .map(|&(p, l)| {
            claim("euclid", format!("masa_euclidean({p},{l}) is a MASA of e({p},0)"), (|| {
                let s = masa_euclidean(p, l)?;
                Ok((masa(&s)? && s.dim() == p - l, format!("dim {}", s.dim())))
            })())
        })
        .collect();
    for p in 1..=cfg.max_p {
        let n = enumerate_euclidean(p).len();
        out.push(Claim {
            suite: "euclid",
            name: format!("e({p},0) has floor(p/2)+1 classes"),
            ok: n == p / 2 + 1 && count_masa_classes_euclidean(p) == n,
            detail: format!("{n} classes"),
        });
    }
    out
}

fn minkowski(cfg: &Settings) -> Vec<Claim> {
    let top = cfg.max_p.max(2);
    let mut out: Vec<Claim> = (2..=top)
        .into_par_iter()
        .map(|p| {
            claim("minkowski", format!("o({p},1) MANS has dimension p-1, is nilpotent and maximal"), (|| {
                let m = mans_op1(p)?;
                let ok = m.dim() == p - 1 && span_is_nilpotent(&m) && masa(&m)?;
                Ok((ok, format!("dim {}", m.dim())))
            })())
        })
        .collect();
    let splits: Vec<(usize, SplitCase, usize, usize, usize)> =
        (2..=top).flat_map(|p| admissible_splitting(p).into_iter().map(move |(c, kp, l, mu)| (p, c, kp, l, mu))).collect();
    out.extend(splits.par_iter().map(|&(p, case, kp, l, mu)| {
        claim("minkowski", format!("splitting e({p},1) {case:?} k+={kp} l={l} mu={mu}: dimension and maximality"), (|| {
            let s = masa_ep1_splitting(p, case, kp, l, Some(mu).filter(|_| case == SplitCase::C))?;
            let (lo, hi) = split_bounds(case, p);
            let want = split_dimension(case, kp, l, mu);
            Ok((s.dim() == want && (lo..=hi).contains(&want) && masa(&s)?, format!("dim {} in [{lo},{hi}]", s.dim())))
        })())
    }).collect::<Vec<_>>());
    let ds: Vec<MasaDescriptor> = (2..=top).flat_map(enumerate_ep1).collect();
    out.extend(ds.par_iter().map(|d| {
        claim("minkowski", format!("e({},1) {} is a MASA", d.p, d.label()), (|| {
            let s = d.materialize()?;
            Ok((s.dim() == d.dimension() && masa(&s)?, format!("dim {}", s.dim())))
        })())
    }).collect::<Vec<_>>());
    out
}

fn span(p: usize, exprs: &[String]) -> Result<Subalgebra> {
    let e = build_epq(p, 1)?;
    let elems = exprs.iter().map(|x| e.parse_combination(x)).collect::<Result<Vec<_>>>()?;
    Subalgebra::from_elements(elems)
}

fn conformal(cfg: &Settings) -> Vec<Claim> {
    let top = cfg.max_p.max(2);
    let jobs: Vec<(usize, usize)> = (1..=top).flat_map(|p| (0..=p / 2).map(move |l| (p, l))).collect();
    let mut out: Vec<Claim> = jobs
        .par_iter()
        .map(|&(p, l)| {
            let expect = 2 * l < p;
            let name = if expect {
                format!("masa_euclidean({p},{l}) stays maximal in o({},1)", p + 1)
            } else {
                format!("masa_euclidean({p},{l}) (rotations only) extends by D in o({},1)", p + 1)
            };
            claim("conformal", name, (|| {
                let up = is_masa_upstairs(&masa_euclidean(p, l)?)?;
                Ok((up == expect, format!("maximal upstairs: {up}")))
            })())
        })
        .collect();
    let ds: Vec<MasaDescriptor> = (2..=top).flat_map(enumerate_ep1).filter(|d| !d.kappa_equivalent).collect();
    out.extend(ds.par_iter().map(|d| {
        claim("conformal", format!("e({},1) {}: conformal class agrees with maximality upstairs", d.p, d.label()), (|| {
            let up = is_masa_upstairs(&d.materialize()?)?;
            let class = canonical_conformal_class(d);
            let detail = match &class {
                Ok(c) => format!("family {}", c.family),
                Err(e) => format!("no class: {e}"),
            };
            Ok((up == class.is_ok(), detail))
        })())
    }).collect::<Vec<_>>());
    let j = ExactMatrix::from_ints(&[&[0, 1], &[1, 0]]);
    for p in 3..=top {
        out.push(claim("conformal", format!("swap maps kappa=0 k=2 to the translation-extended family in e({p},1)"), (|| {
            let mut a = vec!["L(0,2) - L(1,2)".to_string(), "P0 - P1".into()];
            let mut b = vec!["P0 - P1".to_string(), "P2".into()];
            for i in 3..=p {
                a.push(format!("P{i}"));
                b.push(format!("L(0,{i}) - L(1,{i})"));
            }
            Ok((conformally_equivalent(&span(p, &a)?, &span(p, &b)?, &swap_transform(p, &j)?)?, String::new()))
        })()));
    }
    if top >= 5 {
        out.push(claim("conformal", "worked example in e(5,1) is conformally equivalent to {L(4,5), P0 - P1, P2, P3}".into(), (|| {
            let a = span(5, &["P0 - P1".into(), "L(0,2) - L(1,2)".into(), "L(0,3) - L(1,3)".into(), "L(4,5)".into()])?;
            let b = span(5, &["L(4,5)".into(), "P0 - P1".into(), "P2".into(), "P3".into()])?;
            Ok((conformally_equivalent(&a, &b, &swap_transform(5, &j)?)?, String::new()))
        })()));
    }
    out
}

fn worst_deviation(c: &Chart, points: &[Vec<f64>], q: &[f64], k: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for u in points {
        let op = c.lb_coefficients(u)?;
        let (s, f) = reference_null_block_operator(q, u[k]);
        worst = worst.max(operator_deviation(&op, &s, &f));
    }
    Ok(worst)
}

fn charts(cfg: &Settings) -> Vec<Claim> {
    let tol = cfg.tolerance;
    let mut out = Vec::new();
    for k in 2..=4 {
        out.push(claim("charts", format!("null-split k={k}: 2 dz dr + (k-1)/r dz + 1/r^2 sum da_i^2"), (|| {
            let c = chart_null_split(k)?;
            let pts = c.sample_points(20, cfg.seed);
            let dev = worst_deviation(&c, &pts, &vec![0.0; k - 1], k)?;
            Ok((dev < tol, format!("max relative deviation {}", float(dev))))
        })()));
    }
    for q in [vec![1.0, -1.0], vec![2.5, 3.0, 4.0]] {
        out.push(claim("charts", format!("null-nonsplit q={q:?}: operator coefficients"), (|| {
            let k = q.len() + 1;
            let c = chart_null_nonsplit(&q)?;
            let pts = c.sample_points(20, cfg.seed);
            let dev = worst_deviation(&c, &pts, &q, k)?;
            Ok((dev < tol, format!("max relative deviation {}", float(dev))))
        })()));
    }
    let named: Vec<(&str, Chart)> = vec![("polar", polar()), ("m21", chart_m21())];
    for (name, mut c) in named {
        c.tolerance = tol;
        let ok = c.ignorable.iter().all(|&i| c.check_ignorable(i));
        out.push(Claim { suite: "charts", name: format!("{name}: group parameters are ignorable"), ok, detail: String::new() });
    }
    out.push(claim("charts", "polar: g = diag(s^2, 1)".into(), (|| {
        let c = polar();
        let mut worst = 0.0f64;
        for u in c.sample_points(20, cfg.seed) {
            let g = c.pullback_metric(&u)?.g;
            let s = u[1];
            worst = worst.max((g[(0, 0)] - s * s).abs()).max((g[(1, 1)] - 1.0).abs()).max(g[(0, 1)].abs());
        }
        Ok((worst < tol, format!("max deviation {}", float(worst))))
    })()));
    let (m, energy) = (0.7, 1.3);
    for k in 2..=4 {
        out.push(claim("charts", format!("null-split k={k}: separated solution with r^(-(k-1)/2)"), (|| {
            let c = chart_null_split(k)?;
            let a = null_block_ansatz_split(k, m, vec![0.5; k - 1], energy, (k as f64 - 1.0) / 2.0);
            let res = verify_separated_solution(&c, &a, energy, 20, cfg.seed)?;
            Ok((res < tol, format!("max residual {}", float(res))))
        })()));
    }
    out.push(claim("charts", "null-nonsplit q=[2.5, 3, 4]: separated solution".into(), (|| {
        let q = vec![2.5, 3.0, 4.0];
        let c = chart_null_nonsplit(&q)?;
        let a = null_block_ansatz_nonsplit(q, m, vec![0.4, -0.3, 0.2], energy);
        let res = verify_separated_solution(&c, &a, energy, 20, cfg.seed)?;
        Ok((res < tol, format!("max residual {}", float(res))))
    })()));
    out
}
