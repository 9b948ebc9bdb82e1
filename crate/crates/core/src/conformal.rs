//! Embedding of e(p,q) into o(p+1,q+1), maximality upstairs, and the
//! conformal equivalences used to reduce MASAs of e(p,1) to a list
//! inequivalent under O(p+1,2).

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{lightcone_frame, MasaCase, MasaDescriptor};
use crate::error::{Error, Result};
use crate::exactla::{ExactMatrix, ExactScalar};
use crate::liecore::{
    bracket, conjugate, is_masa, AlgebraKind, AmbientAlgebra, LieElement, MetricSignature, Subalgebra,
};

/// Conformal ambient of M(p,1) in the lightcone frame: translation rows
/// `(0, p+, α, p−, 0)` with `p− ~ P0 − P1`, `p+ ~ P0 + P1`.
pub fn workhorse(p: usize) -> Result<Arc<AmbientAlgebra>> {
    AmbientAlgebra::with_frame(AlgebraKind::Conformal, MetricSignature::new(p, 1)?, lightcone_frame(p))
}

/// Conformal ambient receiving subalgebras of `e`: the lightcone frame for
/// the canonical e(p,1), the same frame otherwise.
pub fn conformal_ambient_for(e: &Arc<AmbientAlgebra>) -> Result<Arc<AmbientAlgebra>> {
    if e.kind != AlgebraKind::Euclidean {
        return Err(Error::Invalid("embedding needs an e(p,q) ambient".into()));
    }
    let sig = e.signature();
    if sig.q == 1 && e.is_canonical() {
        workhorse(sig.p)
    } else {
        AmbientAlgebra::with_frame(AlgebraKind::Conformal, sig, e.frame.clone())
    }
}

pub fn embed_element(x: &LieElement, target: &Arc<AmbientAlgebra>) -> Result<LieElement> {
    let terms = x.terms().ok_or_else(|| Error::Invalid("element outside the named span".into()))?;
    let refs: Vec<(ExactScalar, &str)> = terms.iter().map(|(c, n)| (c.clone(), n.as_str())).collect();
    target.combination(&refs)
}

/// Image in o(p+1,q+1) (β = 0, d = 0); brackets are checked pairwise.
pub fn embed(sub: &Subalgebra) -> Result<Subalgebra> {
    let target = conformal_ambient_for(&sub.ambient)?;
    embed_into(sub, &target)
}

pub fn embed_into(sub: &Subalgebra, target: &Arc<AmbientAlgebra>) -> Result<Subalgebra> {
    let imgs = sub.basis.iter().map(|b| embed_element(b, target)).collect::<Result<Vec<_>>>()?;
    for (i, x) in sub.basis.iter().enumerate() {
        for (j, y) in sub.basis.iter().enumerate().skip(i + 1) {
            let down = embed_element(&bracket(x, y)?, target)?;
            if bracket(&imgs[i], &imgs[j])? != down {
                return Err(Error::Other("embedding does not preserve a bracket".into()));
            }
        }
    }
    Subalgebra::spanned_by(target, imgs)
}

/// MASA of e(p,q) that stays maximal abelian in o(p+1,q+1)?
pub fn is_masa_upstairs(sub: &Subalgebra) -> Result<bool> {
    if !is_masa(sub, &sub.ambient.full())? {
        return Err(Error::NotMasa);
    }
    let up = embed(sub)?;
    is_masa(&up, &up.ambient.full())
}

fn antidiag2() -> ExactMatrix {
    ExactMatrix::from_ints(&[&[0, 1], &[1, 0]])
}

/// `diag(G0, I_{p−1}, J G0^{-T} J)`, J = antidiag(1,1), in the lightcone
/// conformal frame of e(p,1). Equals `diag(G0, I, G0)` for G0 = I or J.
pub fn swap_transform(p: usize, g0: &ExactMatrix) -> Result<ExactMatrix> {
    if (g0.rows(), g0.cols()) != (2, 2) {
        return Err(Error::Dimension("G0 must be 2x2".into()));
    }
    let inv = g0.inverse().ok_or(Error::Singular)?;
    let j = antidiag2();
    let g2 = j.try_mul(&inv.transpose())?.try_mul(&j)?;
    Ok(ExactMatrix::block_diag(&[g0.clone(), ExactMatrix::identity(p - 1), g2]))
}

/// `conjugate(embed(a), g)` and `embed(b)` span the same space.
pub fn conformally_equivalent(a: &Subalgebra, b: &Subalgebra, g: &ExactMatrix) -> Result<bool> {
    let ea = embed(a)?;
    let eb = embed(b)?;
    if !ea.ambient.same_as(&eb.ambient) {
        return Err(Error::AmbientMismatch);
    }
    let moved = conjugate(&ea, g)?;
    Ok(moved.dim() == eb.dim() && moved.same_span(&eb))
}

/// Position-permutation matrix on conformal coordinates, `σ` given on
/// display indices `i ≥ 2` of the lightcone frame (conformal index = i).
fn index_permutation(size: usize, sigma: &[(usize, usize)]) -> ExactMatrix {
    let mut g = ExactMatrix::identity(size);
    for &(from, _) in sigma {
        g.set_int(from, from, 0);
    }
    for &(from, to) in sigma {
        g.set_int(to, from, 1);
    }
    g
}

// ----------------------------------------------------------------- classes

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConformalClass {
    /// 1: boost ⊕ MANS, 2: translations, 3: non-free-rowed, 4: two-block.
    pub family: u8,
    pub l: usize,
    /// Size of the Minkowski part `j = p − 2l`.
    pub j: usize,
    pub epsilon: Option<i64>,
    /// Family 4: `s = j − r` with r the highest multiplicity.
    pub s: Option<usize>,
    pub multiplicity: Option<usize>,
    /// Family 4: normalized `r_2..r_s`.
    pub r: Vec<ExactScalar>,
    /// Family 4 from splitting data: the block values of Q, `(k−1) a + (j−k) b = 0`.
    pub q: Vec<ExactScalar>,
}

/// Projective ratio `P-coefficient : null-rotation coefficient`; `None` is ∞.
type Ratio = Option<ExactScalar>;

fn canonical_order(x: &ExactScalar, y: &ExactScalar) -> Ordering {
    y.abs().cmp(&x.abs()).then_with(|| x.is_negative().cmp(&y.is_negative()))
}

/// Scale so the first entry in canonical order is 1; returns the factor.
fn normalize_list(v: &[ExactScalar]) -> (Vec<ExactScalar>, ExactScalar) {
    let mut sorted = v.to_vec();
    sorted.sort_by(canonical_order);
    match sorted.first() {
        Some(x) if !x.is_zero() => {
            let f = x.recip();
            let mut out: Vec<ExactScalar> = v.iter().map(|y| y * &f).collect();
            out.sort_by(canonical_order);
            (out, f)
        }
        _ => (sorted, ExactScalar::one()),
    }
}

fn mean(v: &[ExactScalar]) -> ExactScalar {
    if v.is_empty() {
        return ExactScalar::zero();
    }
    v.iter().fold(ExactScalar::zero(), |s, x| s + x) * ExactScalar::from_int(v.len() as i64).recip()
}

/// Multiplicity reduction on ratios. Returns `(x*, r, unnormalized r0)` for
/// the choice of the most frequent value giving the smallest normal form.
struct Reduction {
    star: Ratio,
    rest: Vec<usize>,
    starred: Vec<usize>,
    r0: Vec<ExactScalar>,
    r: Vec<ExactScalar>,
    factor: ExactScalar,
}

fn reduce(xs: &[Ratio]) -> Reduction {
    let mut values: Vec<Ratio> = xs.to_vec();
    values.sort();
    values.dedup();
    let count = |v: &Ratio| xs.iter().filter(|x| *x == v).count();
    let best = values.iter().map(count).max().unwrap_or(0);
    let mut cands: Vec<Reduction> = values
        .iter()
        .filter(|v| count(v) == best)
        .map(|star| {
            let rest: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] != *star).collect();
            let starred: Vec<usize> = (0..xs.len()).filter(|&i| xs[i] == *star).collect();
            let ys: Vec<ExactScalar> = rest
                .iter()
                .map(|&i| match (star, &xs[i]) {
                    (None, xi) => xi.clone().expect("finite"),
                    (Some(_), None) => ExactScalar::zero(),
                    (Some(s), Some(xi)) => (xi - s).recip(),
                })
                .collect();
            let m = mean(&ys);
            let r0: Vec<ExactScalar> = ys.iter().map(|y| y - &m).collect();
            let (r, factor) = normalize_list(&r0);
            Reduction { star: star.clone(), rest, starred, r0, r, factor }
        })
        .collect();
    cands.sort_by(|a, b| {
        let key = |c: &Reduction| c.r.iter().map(|x| (std::cmp::Reverse(x.abs()), x.is_negative())).collect::<Vec<_>>();
        key(a).cmp(&key(b))
    });
    cands.remove(0)
}

/// Ratios of the Minkowski block, indexed by `j_indices(d)`.
fn block_ratios(d: &MasaDescriptor) -> Vec<Ratio> {
    let mut xs = Vec::new();
    for i in 2..=d.k {
        let a = d.a.get(i - 2).cloned().unwrap_or_else(ExactScalar::zero);
        xs.push(Some(a));
    }
    xs.extend((0..d.m).map(|_| None));
    xs
}

fn j_indices(d: &MasaDescriptor) -> Vec<usize> {
    let mut v: Vec<usize> = (2..=d.k).collect();
    v.extend(d.k + 2 * d.l + 1..=d.p);
    v
}

/// Conformal class of an e(p,1) MASA descriptor.
pub fn canonical_conformal_class(d: &MasaDescriptor) -> Result<ConformalClass> {
    if d.q != 1 || d.k + 2 * d.l + d.m != d.p {
        return Err(Error::Invalid("descriptor is not a valid e(p,1) pattern".into()));
    }
    let j = d.p - 2 * d.l;
    let base = ConformalClass { family: 0, l: d.l, j, epsilon: None, s: None, multiplicity: None, r: Vec::new(), q: Vec::new() };
    match (d.k, d.case) {
        (0, _) => Ok(ConformalClass { family: 2, ..base }),
        (1, _) if d.m == 0 => Err(Error::Invalid("boost and rotations only: D commutes with all of them, not maximal upstairs".into())),
        (1, _) => Ok(ConformalClass { family: 1, ..base }),
        (2, MasaCase::NonsplitMu1) => Ok(ConformalClass { family: 3, epsilon: d.kappa, ..base }),
        (_, MasaCase::C) | (_, MasaCase::NonsplitC) => {
            if d.case == MasaCase::C && d.m == 0 {
                return Err(Error::Invalid(
                    "without extra translations the null-rotation block is conjugate to translations and not maximal in o(j+1,2)"
                        .into(),
                ));
            }
            let red = reduce(&block_ratios(d));
            let q = if d.case == MasaCase::C {
                let (a, b) = (ExactScalar::from_int(d.m as i64), ExactScalar::from_int(-(d.k as i64 - 1)));
                let mut q = vec![a; d.k - 1];
                q.extend(std::iter::repeat(b).take(d.m));
                normalize_list(&q).0
            } else {
                Vec::new()
            };
            Ok(ConformalClass {
                family: 4,
                s: Some(j - red.starred.len()),
                multiplicity: Some(red.starred.len()),
                r: red.r,
                q,
                ..base
            })
        }
        _ => Err(Error::Invalid(format!("unexpected descriptor {}", d.label()))),
    }
}

/// Family-4 representative in the descriptor's index layout:
/// `P0 − P1`, `P_i + r_i (L_0i − L_1i)` on the first `s − 1` block indices,
/// `L_0i − L_1i` on the remaining ones, and the descriptor's rotations.
pub fn family4_representative(d: &MasaDescriptor, class: &ConformalClass) -> Result<Subalgebra> {
    if class.family != 4 {
        return Err(Error::Invalid("not a family-4 class".into()));
    }
    let e = crate::liecore::build_epq(d.p, 1)?;
    let idx = j_indices(d);
    let mut elems = vec![e.parse_combination("P0 - P1")?];
    for (n, &i) in idx.iter().enumerate() {
        let null = e.parse_combination(&format!("L(0,{i}) - L(1,{i})"))?;
        let x = match class.r.get(n) {
            Some(r) => e.p(i).add(&null.scale(r))?,
            None => null,
        };
        elems.push(x);
    }
    for t in 0..d.l {
        elems.push(e.l(d.k + 2 * t + 1, d.k + 2 * t + 2));
    }
    Subalgebra::from_elements(elems)
}

/// Explicit `G = σ · swap_transform(G0)` carrying the descriptor's MASA onto
/// its family-4 representative.
pub fn family4_witness(d: &MasaDescriptor) -> Result<ExactMatrix> {
    let class = canonical_conformal_class(d)?;
    if class.family != 4 {
        return Err(Error::Invalid("not a family-4 class".into()));
    }
    let w = workhorse(d.p)?;
    let idx = j_indices(d);
    let i0 = idx[0];
    let up = |expr: &str| w.parse_combination(expr);
    // frame factors of the α and β entries
    let c_a = up(&format!("P{i0}"))?.matrix.get(0, i0).clone();
    let c_b = up(&format!("L(0,{i0}) - L(1,{i0})"))?.matrix.get(1, i0).clone();
    let lambda = &c_a * &c_b.recip();
    // matrix-level ratios α/β
    let xs: Vec<Ratio> = block_ratios(d)
        .into_iter()
        .map(|x| x.map(|v| &v * &lambda))
        .collect();
    let red = reduce(&xs);
    // β'/α' = D (y − mean y) at matrix level must equal λ r at name level
    let dd = &red.factor * &lambda.recip();
    let g0 = match &red.star {
        Some(s) => {
            let ys: Vec<ExactScalar> =
                red.rest.iter().map(|&i| xs[i].as_ref().map_or(ExactScalar::zero(), |x| (x - s).recip())).collect();
            let c = -(&dd * &mean(&ys));
            let dval = &dd - &(&c * s);
            ExactMatrix::from_rows(vec![vec![ExactScalar::one(), -s.clone()], vec![c, dval]])?
        }
        None => {
            let xr: Vec<ExactScalar> = red.rest.iter().map(|&i| xs[i].clone().expect("finite")).collect();
            let c = dd.clone();
            let dval = -(&c * &mean(&xr));
            ExactMatrix::from_rows(vec![vec![ExactScalar::zero(), ExactScalar::one()], vec![c, dval]])?
        }
    };
    let g = swap_transform(d.p, &g0)?;
    // send the rest indices, in normalized order, to the front of the block
    let scaled: Vec<ExactScalar> = red.r0.iter().map(|x| x * &red.factor).collect();
    let mut order: Vec<usize> = (0..red.rest.len()).collect();
    order.sort_by(|&a, &b| canonical_order(&scaled[a], &scaled[b]));
    let mut targets = Vec::new();
    for &o in &order {
        targets.push(idx[red.rest[o]]);
    }
    targets.extend(red.starred.iter().map(|&i| idx[i]));
    let sigma: Vec<(usize, usize)> = targets.iter().zip(&idx).map(|(&from, &to)| (from, to)).collect();
    let perm = index_permutation(d.p + 3, &sigma);
    perm.try_mul(&g)
}
