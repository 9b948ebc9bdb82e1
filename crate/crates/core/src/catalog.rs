//! Constructors for the classified MASA families: Euclidean, o(p,1),
//! splitting and nonsplitting MASAs of e(p,1), the decomposition list of
//! e(p,1), Kravchuk normal forms and the o(r,2) catalog.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{ExactMatrix, ExactScalar};
use crate::liecore::{
    build_epq, format_terms, is_nilpotent_matrix, AlgebraKind, AmbientAlgebra, LieElement, MetricSignature,
    Subalgebra,
};

fn int(n: i64) -> ExactScalar {
    ExactScalar::from_int(n)
}

/// `antidiag(1, I_mid, 1)` of size `mid + 2`.
pub fn lightcone_metric(mid: usize) -> ExactMatrix {
    let n = mid + 2;
    let mut k = ExactMatrix::zeros(n, n);
    k.set_int(0, n - 1, 1);
    k.set_int(n - 1, 0, 1);
    for i in 1..=mid {
        k.set_int(i, i, 1);
    }
    k
}

/// Frame of M(p,1) with coordinates `(x0 − x1, x2, …, xp, −(x0 + x1)/2)`.
/// Its metric is `lightcone_metric(p − 1)`; `P0 − P1` spans the first
/// lightcone translation.
pub fn lightcone_frame(p: usize) -> ExactMatrix {
    assert!(p >= 1);
    let n = p + 1;
    let t = n - 1; // time position
    let mut s = ExactMatrix::zeros(n, n);
    s.set_int(0, t, 1);
    s.set_int(0, 0, -1);
    for i in 1..p {
        s.set_int(i, i, 1);
    }
    s.set(n - 1, 0, ExactScalar::ratio(-1, 2));
    s.set(n - 1, t, ExactScalar::ratio(-1, 2));
    s
}

// ---------------------------------------------------------------- Euclidean

/// `{L_12, …, L_{2l−1,2l}} ⊕ {P_{2l+1}, …, P_p}` in e(p,0).
pub fn masa_euclidean(p: usize, l: usize) -> Result<Subalgebra> {
    if p == 0 || 2 * l > p {
        return Err(Error::Invalid(format!("need 0 <= l <= floor(p/2), got p={p}, l={l}")));
    }
    let e = build_epq(p, 0)?;
    let mut elems: Vec<LieElement> = (0..l).map(|i| e.l(2 * i + 1, 2 * i + 2)).collect();
    elems.extend((2 * l + 1..=p).map(|i| e.p(i)));
    Subalgebra::from_elements(elems)
}

pub fn count_masa_classes_euclidean(p: usize) -> usize {
    p / 2 + 1
}

pub fn enumerate_euclidean(p: usize) -> Vec<MasaDescriptor> {
    (0..=p / 2)
        .map(|l| MasaDescriptor {
            p,
            q: 0,
            k: 0,
            l,
            m: p - 2 * l,
            case: MasaCase::Euclid,
            kappa: None,
            a: Vec::new(),
            kappa_equivalent: false,
            family_stub: false,
        })
        .collect()
}

// ------------------------------------------------------------------ o(p,1)

fn orthogonal(k: &ExactMatrix) -> Result<Arc<AmbientAlgebra>> {
    AmbientAlgebra::with_metric(AlgebraKind::Orthogonal, k)
}

/// `[[0, α, 0], [0, 0, −αᵀ], [0, 0, 0]]` at unit `α = e_i`, embedded at `off`.
fn null_rotation(size: usize, off: usize, mid: usize, i: usize) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(size, size);
    m.set_int(off, off + 1 + i, 1);
    m.set_int(off + 1 + i, off + mid + 1, -1);
    m
}

/// MANS of o(p,1) in the frame `antidiag(1, I_{p−1}, 1)`, dimension `p − 1`.
pub fn mans_op1(p: usize) -> Result<Subalgebra> {
    if p < 2 {
        return Err(Error::Invalid(format!("o(p,1) MANS needs p >= 2, got {p}")));
    }
    let mid = p - 1;
    let amb = orthogonal(&lightcone_metric(mid))?;
    let mats = (0..mid).map(|i| null_rotation(p + 1, 0, mid, i)).collect();
    Subalgebra::from_independent(&amb, mats)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op1Pattern {
    /// `l(2,0) ⊕ (k,1)` with a MANS (or the boost for k = 1) on the `(k,1)` block.
    OdA { k: usize },
    /// `(1,1) ⊕ (1,0) ⊕ l(2,0)`, p even.
    OdB,
    /// Orthogonally indecomposable: the MANS.
    Mans,
}

fn rotation_block() -> ExactMatrix {
    ExactMatrix::from_ints(&[&[0, 1], &[-1, 0]])
}

/// Block-diagonal MASA of o(p,1).
pub fn masa_op1(p: usize, pattern: Op1Pattern) -> Result<Subalgebra> {
    match pattern {
        Op1Pattern::Mans => mans_op1(p),
        Op1Pattern::OdA { k } => {
            if k + 2 > p || (p - k) % 2 != 0 {
                return Err(Error::Invalid(format!(
                    "pattern l(2,0)+(k,1) needs p - k even and l >= 1, got p={p}, k={k}"
                )));
            }
            let l = (p - k) / 2;
            let kb = match k {
                0 => ExactMatrix::diag_ints(&[-1]),
                _ => lightcone_metric(k - 1),
            };
            let metric = ExactMatrix::block_diag(&[ExactMatrix::identity(2 * l), kb]);
            let amb = orthogonal(&metric)?;
            let size = p + 1;
            let mut mats = rotations(size, 0, l);
            let off = 2 * l;
            if k == 1 {
                let mut b = ExactMatrix::zeros(size, size);
                b.set_int(off, off, 1);
                b.set_int(off + 1, off + 1, -1);
                mats.push(b);
            } else if k >= 2 {
                mats.extend((0..k - 1).map(|i| null_rotation(size, off, k - 1, i)));
            }
            Subalgebra::from_independent(&amb, mats)
        }
        Op1Pattern::OdB => {
            if p % 2 != 0 || p < 2 {
                return Err(Error::Invalid(format!("pattern (1,1)+(1,0)+l(2,0) needs p even, got {p}")));
            }
            let l = (p - 2) / 2;
            let metric = ExactMatrix::block_diag(&[
                lightcone_metric(0),
                ExactMatrix::identity(1),
                ExactMatrix::identity(2 * l),
            ]);
            let amb = orthogonal(&metric)?;
            let size = p + 1;
            let mut b = ExactMatrix::zeros(size, size);
            b.set_int(0, 0, 1);
            b.set_int(1, 1, -1);
            let mut mats = vec![b];
            mats.extend(rotations(size, 3, l));
            Subalgebra::from_independent(&amb, mats)
        }
    }
}

/// `l` consecutive 2×2 rotation generators starting at `off`.
fn rotations(size: usize, off: usize, l: usize) -> Vec<ExactMatrix> {
    (0..l)
        .map(|i| {
            let mut m = ExactMatrix::zeros(size, size);
            m.put(off + 2 * i, off + 2 * i, &rotation_block());
            m
        })
        .collect()
}

// ------------------------------------------------------- e(p,1), splitting

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitCase {
    /// One negative-length translation, compact rotations.
    A,
    /// Boost in a hyperbolic plane, no translation there.
    B,
    /// Isotropic translation with the null-rotation MANS.
    C,
}

/// Native frame of the block form: `K_e = diag(K0, I_{2l}, I_{k+}, 0)`.
fn split_frame(k0: &ExactMatrix, l: usize, k_plus: usize) -> Result<Arc<AmbientAlgebra>> {
    let k = ExactMatrix::block_diag(&[k0.clone(), ExactMatrix::identity(2 * l + k_plus)]);
    AmbientAlgebra::with_metric(AlgebraKind::Euclidean, &k)
}

/// Data shared by the splitting and nonsplitting assembly.
struct SplitLayout {
    amb: Arc<AmbientAlgebra>,
    size: usize,
    k0: usize,
    l: usize,
    k_plus: usize,
}

impl SplitLayout {
    fn translation(&self, pos: usize) -> ExactMatrix {
        ExactMatrix::unit(self.size, self.size, pos, self.size - 1)
    }

    /// Rotations and the k+ translations common to every case.
    fn tail(&self) -> Vec<ExactMatrix> {
        let mut mats = rotations(self.size, self.k0, self.l);
        let off = self.k0 + 2 * self.l;
        mats.extend((0..self.k_plus).map(|i| self.translation(off + i)));
        mats
    }
}

/// Case-C block count: `μ = p − k₊ − 2l − 1`.
pub fn case_c_mu(p: usize, k_plus: usize, l: usize) -> Option<usize> {
    (p + 1).checked_sub(k_plus + 2 * l + 2).filter(|&mu| mu >= 1)
}

/// Splitting MASA of e(p,1). For case C, `mu` may be given and is checked
/// against the block count.
pub fn masa_ep1_splitting(
    p: usize,
    case: SplitCase,
    k_plus: usize,
    l: usize,
    mu: Option<usize>,
) -> Result<Subalgebra> {
    if p == 0 || k_plus > p {
        return Err(Error::Invalid(format!("need 0 <= k+ <= p, got p={p}, k+={k_plus}")));
    }
    let rest = p - k_plus;
    match case {
        SplitCase::A => {
            if rest % 2 != 0 {
                return Err(Error::Invalid(format!("case A: p - k+ must be even (p={p}, k+={k_plus})")));
            }
            if 2 * l != rest {
                return Err(Error::Invalid(format!(
                    "case A: K0 = -1 has signature (0,1), so p - k+ - 2l = 0 is required (l = {})",
                    rest / 2
                )));
            }
            let lay = layout(ExactMatrix::diag_ints(&[-1]), l, k_plus)?;
            let mut mats = vec![lay.translation(0)];
            mats.extend(lay.tail());
            Subalgebra::from_independent(&lay.amb, mats)
        }
        SplitCase::B => {
            if rest % 2 != 1 {
                return Err(Error::Invalid(format!("case B: p - k+ must be odd (p={p}, k+={k_plus})")));
            }
            if 2 * l + 1 != rest {
                return Err(Error::Invalid(format!(
                    "case B: K0 has signature (1,1), so p - k+ - 2l = 1 is required (l = {})",
                    (rest - 1) / 2
                )));
            }
            let lay = layout(lightcone_metric(0), l, k_plus)?;
            let mut b = ExactMatrix::zeros(lay.size, lay.size);
            b.set_int(0, 0, 1);
            b.set_int(1, 1, -1);
            let mut mats = vec![b];
            mats.extend(lay.tail());
            Subalgebra::from_independent(&lay.amb, mats)
        }
        SplitCase::C => {
            let m = case_c_mu(p, k_plus, l).ok_or_else(|| {
                Error::Invalid(format!(
                    "case C: need 1 <= mu and 0 <= l <= (p - k+ - 2)/2 (p={p}, k+={k_plus}, l={l})"
                ))
            })?;
            if let Some(mu) = mu {
                if mu != m {
                    return Err(Error::Invalid(format!(
                        "case C: mu + 2l + k+ + 2 = p + 1 forces mu = {m}, got {mu}"
                    )));
                }
            }
            let lay = layout(lightcone_metric(m), l, k_plus)?;
            let mut mats: Vec<ExactMatrix> = (0..m).map(|i| null_rotation(lay.size, 0, m, i)).collect();
            mats.push(lay.translation(0));
            mats.extend(lay.tail());
            Subalgebra::from_independent(&lay.amb, mats)
        }
    }
}

fn layout(k0: ExactMatrix, l: usize, k_plus: usize) -> Result<SplitLayout> {
    let k0n = k0.rows();
    let amb = split_frame(&k0, l, k_plus)?;
    let size = amb.size();
    Ok(SplitLayout { amb, size, k0: k0n, l, k_plus })
}

/// Dimension formula: `1 + l + k₊` (A, B) or `μ + l + k₊ + 1` (C).
pub fn split_dimension(case: SplitCase, k_plus: usize, l: usize, mu: usize) -> usize {
    match case {
        SplitCase::A | SplitCase::B => 1 + l + k_plus,
        SplitCase::C => mu + l + k_plus + 1,
    }
}

/// Dimension bounds `(lower, upper)` with `[x]` read as the floor.
pub fn split_bounds(case: SplitCase, p: usize) -> (usize, usize) {
    match case {
        SplitCase::A => ((p + 3) / 2, p + 1),
        SplitCase::B => ((p + 2) / 2, p),
        SplitCase::C => ((p + 3) / 2, p),
    }
}

/// Every admissible `(case, k₊, l, μ)` for e(p,1).
pub fn admissible_splitting(p: usize) -> Vec<(SplitCase, usize, usize, usize)> {
    let mut out = Vec::new();
    for k_plus in 0..=p {
        let rest = p - k_plus;
        if rest % 2 == 0 {
            out.push((SplitCase::A, k_plus, rest / 2, 0));
        } else {
            out.push((SplitCase::B, k_plus, (rest - 1) / 2, 0));
        }
        let mut l = 0;
        while let Some(mu) = case_c_mu(p, k_plus, l) {
            out.push((SplitCase::C, k_plus, l, mu));
            l += 1;
        }
    }
    out
}

// ---------------------------------------------------- e(p,1), nonsplitting

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonsplitParams {
    /// Translation tail `Aαᵀ` with `A = diag(a)`, normalized, trace zero, μ ≥ 2.
    Diagonal(Vec<ExactScalar>),
    /// The μ = 1 form where the null rotation carries a translation in the
    /// second isotropic direction.
    Mu1,
}

/// Normalized diagonal: `a_1 = 1 ≥ |a_2| ≥ … ≥ 0`, positive first on ties,
/// trace zero, not all zero.
pub fn check_normalized_diagonal(a: &[ExactScalar]) -> Result<()> {
    if a.iter().all(|x| x.is_zero()) {
        return Err(Error::Invalid("A = 0 is a coboundary; use the splitting constructor".into()));
    }
    if !a[0].is_one() {
        return Err(Error::Invalid("normalization requires a_1 = 1".into()));
    }
    for w in a.windows(2) {
        let (x, y) = (&w[0], &w[1]);
        if y.abs() > x.abs() || (y.abs() == x.abs() && x.is_negative() && !y.is_negative()) {
            return Err(Error::Invalid(format!(
                "ordering violated: |a| must be non-increasing, positive first on ties ({x}, {y})"
            )));
        }
    }
    let tr = a.iter().fold(ExactScalar::zero(), |s, x| s + x);
    if !tr.is_zero() {
        return Err(Error::Invalid(format!("trace of A must vanish, got {tr}")));
    }
    Ok(())
}

pub fn masa_ep1_nonsplitting(p: usize, k_plus: usize, l: usize, params: &NonsplitParams) -> Result<Subalgebra> {
    let mu = case_c_mu(p, k_plus, l).ok_or_else(|| {
        Error::Invalid(format!("no case-C block for p={p}, k+={k_plus}, l={l}"))
    })?;
    let lay = layout(lightcone_metric(mu), l, k_plus)?;
    let mut mats = Vec::new();
    match params {
        NonsplitParams::Diagonal(a) => {
            if a.len() != mu {
                return Err(Error::Invalid(format!("A must be {mu}x{mu}, got {} entries", a.len())));
            }
            if mu < 2 {
                return Err(Error::Invalid("diagonal nonsplitting form needs mu >= 2".into()));
            }
            check_normalized_diagonal(a)?;
            for (i, ai) in a.iter().enumerate() {
                let x = null_rotation(lay.size, 0, mu, i);
                mats.push(x.try_add(&lay.translation(1 + i).scale(ai))?);
            }
        }
        NonsplitParams::Mu1 => {
            if mu != 1 {
                return Err(Error::Invalid(format!("the special form needs mu = 1, got {mu}")));
            }
            let x = null_rotation(lay.size, 0, 1, 0);
            mats.push(x.try_add(&lay.translation(2))?);
        }
    }
    mats.push(lay.translation(0));
    mats.extend(lay.tail());
    Subalgebra::from_independent(&lay.amb, mats)
}

// ------------------------------------------------ decomposition descriptors

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MasaCase {
    Euclid,
    /// `(k₊, 1, 0)`
    A,
    /// `(k₊, 0, 0)`
    B,
    /// `(k₊, 0, 1)`
    C,
    NonsplitC,
    NonsplitMu1,
}

/// Pattern `M(k,1) ⊕ l M(2,0) ⊕ m M(1,0)` plus parameters of the `M(k,1)` block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MasaDescriptor {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub case: MasaCase,
    pub kappa: Option<i64>,
    pub a: Vec<ExactScalar>,
    /// κ = −1 coincides with κ = +1 under the full group.
    pub kappa_equivalent: bool,
    /// Representative of a continuous parameter family.
    pub family_stub: bool,
}

impl MasaDescriptor {
    pub fn ep1(p: usize, k: usize, l: usize, m: usize) -> Result<Self> {
        if k + 2 * l + m != p {
            return Err(Error::Invalid(format!("k + 2l + m must equal p ({k} + 2*{l} + {m} != {p})")));
        }
        let case = match k {
            0 => MasaCase::A,
            1 => MasaCase::B,
            _ => MasaCase::C,
        };
        Ok(MasaDescriptor {
            p,
            q: 1,
            k,
            l,
            m,
            case,
            kappa: (k == 2).then_some(0),
            a: if k >= 3 { vec![ExactScalar::zero(); k - 1] } else { Vec::new() },
            kappa_equivalent: false,
            family_stub: false,
        })
    }

    pub fn with_kappa(mut self, kappa: i64) -> Result<Self> {
        if self.k != 2 || !(-1..=1).contains(&kappa) {
            return Err(Error::Invalid("kappa in {0, 1, -1} needs k = 2".into()));
        }
        self.kappa = Some(kappa);
        self.case = if kappa == 0 { MasaCase::C } else { MasaCase::NonsplitMu1 };
        self.kappa_equivalent = kappa == -1;
        Ok(self)
    }

    pub fn with_a(mut self, a: Vec<ExactScalar>) -> Result<Self> {
        if self.k < 3 || a.len() != self.k - 1 {
            return Err(Error::Invalid("a_2..a_k needs k >= 3 and k - 1 entries".into()));
        }
        if a.iter().any(|x| !x.is_zero()) {
            check_normalized_diagonal(&a)?;
            self.case = MasaCase::NonsplitC;
        } else {
            self.case = MasaCase::C;
        }
        self.a = a;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        match self.q {
            0 => self.l + self.m,
            _ => match self.k {
                0 | 1 => 1 + self.l + self.m,
                k => k + self.l + self.m,
            },
        }
    }

    /// Case tag, block parameters and named generators, e.g.
    /// `C k=3 l=0 m=1 a=(1,-1)`.
    pub fn label(&self) -> String {
        let mut s = format!("{:?} k={} l={} m={}", self.case, self.k, self.l, self.m);
        if let Some(k) = self.kappa {
            s.push_str(&format!(" kappa={k}"));
        }
        if !self.a.is_empty() {
            let a: Vec<String> = self.a.iter().map(short).collect();
            s.push_str(&format!(" a=({})", a.join(",")));
        }
        s
    }

    /// Build the subalgebra in the canonical frame with named generators.
    pub fn materialize(&self) -> Result<Subalgebra> {
        match self.q {
            0 => masa_euclidean(self.p, self.l),
            1 => self.materialize_ep1(),
            q => Err(Error::OutOfScope(format!("e(p,{q}) with q >= 2"))),
        }
    }

    fn materialize_ep1(&self) -> Result<Subalgebra> {
        let (p, k, l, m) = (self.p, self.k, self.l, self.m);
        if k + 2 * l + m != p {
            return Err(Error::Invalid("k + 2l + m != p".into()));
        }
        let e = build_epq(p, 1)?;
        let one = ExactScalar::one();
        let comb = |terms: &[(ExactScalar, String)]| {
            let refs: Vec<(ExactScalar, &str)> = terms.iter().map(|(c, n)| (c.clone(), n.as_str())).collect();
            e.combination(&refs)
        };
        let mut elems = Vec::new();
        match k {
            0 => elems.push(e.p(0)),
            1 => elems.push(e.l(0, 1)),
            _ => {
                elems.push(comb(&[(one.clone(), "P0".into()), (int(-1), "P1".into())])?);
                for j in 2..=k {
                    let mut t = vec![(one.clone(), format!("L(0,{j})")), (int(-1), format!("L(1,{j})"))];
                    if k == 2 {
                        let kappa = int(self.kappa.unwrap_or(0));
                        t.push((kappa.clone(), "P0".into()));
                        t.push((kappa, "P1".into()));
                    } else {
                        t.push((self.a[j - 2].clone(), format!("P{j}")));
                    }
                    elems.push(comb(&t)?);
                }
            }
        }
        for i in 0..l {
            elems.push(e.l(k + 2 * i + 1, k + 2 * i + 2));
        }
        for j in k + 2 * l + 1..=p {
            elems.push(e.p(j));
        }
        Subalgebra::from_elements(elems)
    }
}

fn short(x: &ExactScalar) -> String {
    if x.denom() == &num_bigint::BigInt::from(1) {
        x.numer().to_string()
    } else {
        x.to_string()
    }
}

/// All decomposition patterns of M(p,1) with the discrete parameter choices:
/// κ ∈ {0, 1, −1} for k = 2, and for k ≥ 3 the splitting choice a = 0 plus
/// one normalized representative `(1, −1, 0, …)` of the continuous family.
pub fn enumerate_ep1(p: usize) -> Vec<MasaDescriptor> {
    let mut out = Vec::new();
    for k in (0..=p).rev() {
        for l in 0..=(p - k) / 2 {
            let m = p - k - 2 * l;
            let d = MasaDescriptor::ep1(p, k, l, m).expect("pattern adds up");
            match k {
                2 => {
                    for kappa in [0, 1, -1] {
                        out.push(d.clone().with_kappa(kappa).expect("valid kappa"));
                    }
                }
                k if k >= 3 => {
                    out.push(d.clone());
                    let mut a = vec![ExactScalar::zero(); k - 1];
                    a[0] = int(1);
                    a[1] = int(-1);
                    let mut s = d.with_a(a).expect("normalized sample");
                    s.family_stub = true;
                    out.push(s);
                }
                _ => out.push(d),
            }
        }
    }
    out
}

/// Distinct `(k, l, m)` patterns among descriptors.
pub fn patterns(ds: &[MasaDescriptor]) -> Vec<(usize, usize, usize)> {
    let mut v: Vec<(usize, usize, usize)> = ds.iter().map(|d| (d.k, d.l, d.m)).collect();
    v.sort();
    v.dedup();
    v
}

// ---------------------------------------------------------------- Kravchuk

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KravchukSignature {
    pub lambda: usize,
    pub mu: usize,
}

impl KravchukSignature {
    pub fn new(lambda: usize, mu: usize, p: usize, q: usize) -> Result<Self> {
        if 2 * lambda + mu != p + q || lambda < 1 || lambda > q || q > p {
            return Err(Error::Invalid(format!("({lambda} {mu} {lambda}) is not a Kravchuk signature of o({p},{q})")));
        }
        Ok(KravchukSignature { lambda, mu })
    }
}

/// One generator of a Kravchuk normal form.
#[derive(Clone, Debug)]
pub struct KravchukPayload {
    pub a: ExactMatrix,
    pub s: ExactMatrix,
    pub y: ExactMatrix,
}

/// `K = [[0,0,I_λ],[0,K0,0],[I_λ,0,0]]`.
pub fn kravchuk_metric(lambda: usize, k0: &ExactMatrix) -> ExactMatrix {
    let mu = k0.rows();
    let n = 2 * lambda + mu;
    let mut k = ExactMatrix::zeros(n, n);
    k.put(0, lambda + mu, &ExactMatrix::identity(lambda));
    k.put(lambda + mu, 0, &ExactMatrix::identity(lambda));
    k.put(lambda, lambda, k0);
    k
}

/// `X = [[0, A, Y], [0, S, −K0·Aᵀ], [0, 0, 0]]`.
pub fn kravchuk_matrix(lambda: usize, k0: &ExactMatrix, pl: &KravchukPayload) -> ExactMatrix {
    let mu = k0.rows();
    let n = 2 * lambda + mu;
    let mut x = ExactMatrix::zeros(n, n);
    x.put(0, lambda, &pl.a);
    x.put(0, lambda + mu, &pl.y);
    x.put(lambda, lambda, &pl.s);
    let kat = k0.try_mul(&pl.a.transpose()).expect("shapes").scale(&int(-1));
    x.put(lambda, lambda + mu, &kat);
    x
}

pub fn kravchuk_mans(lambda: usize, k0: &ExactMatrix, payloads: &[KravchukPayload]) -> Result<Subalgebra> {
    let mu = k0.rows();
    for pl in payloads {
        if (pl.a.rows(), pl.a.cols()) != (lambda, mu)
            || (pl.s.rows(), pl.s.cols()) != (mu, mu)
            || (pl.y.rows(), pl.y.cols()) != (lambda, lambda)
        {
            return Err(Error::Dimension("Kravchuk payload shapes".into()));
        }
        if pl.y.transpose() != pl.y.scale(&int(-1)) {
            return Err(Error::Invalid("Y must be antisymmetric".into()));
        }
        let sk = pl.s.try_mul(k0)?.try_add(&k0.try_mul(&pl.s.transpose())?)?;
        if !sk.is_zero() {
            return Err(Error::Invalid("S must satisfy S K0 + K0 S^T = 0".into()));
        }
        if !is_nilpotent_matrix(&pl.s) {
            return Err(Error::Invalid("S must be nilpotent".into()));
        }
    }
    for (i, x) in payloads.iter().enumerate() {
        for y in &payloads[i + 1..] {
            let l = x.a.try_mul(k0)?.try_mul(&y.a.transpose())?;
            let r = y.a.try_mul(k0)?.try_mul(&x.a.transpose())?;
            if l != r {
                return Err(Error::Invalid("commutativity relation A K0 A'^T = A' K0 A^T fails".into()));
            }
            if x.a.try_mul(&y.s)? != y.a.try_mul(&x.s)? {
                return Err(Error::Invalid("commutativity relation A S' = A' S fails".into()));
            }
            if !x.s.commutator(&y.s)?.is_zero() {
                return Err(Error::Invalid("commutativity relation [S, S'] = 0 fails".into()));
            }
        }
    }
    let amb = orthogonal(&kravchuk_metric(lambda, k0))?;
    let mats = payloads.iter().map(|pl| kravchuk_matrix(lambda, k0, pl)).collect();
    Subalgebra::from_independent(&amb, mats)
}

// ------------------------------------------------------------------ o(r,2)

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Or2Kind {
    /// `(s,2) ⊕ l(2,0)` (boost = false) or `(s,1) ⊕ (1,1) ⊕ l(2,0)`
    /// (boost = true). The `(s,2)` block carries a compact rotation for
    /// s = 0 and the free-rowed MANS otherwise.
    Od { s: usize, l: usize, boost: bool },
    /// Free-rowed MANS, signature (1 r 1).
    FreeRowed,
    /// Non-free-rowed MANS, signature (1 r 1).
    NonFreeRowed,
    /// Free-rowed MANS, signature (2 r−2 2), with `Q = diag(q)`.
    TwoBlock { q: Vec<ExactScalar> },
    /// Orthogonally indecomposable, decomposable after complexification (r even).
    Naoid,
    /// o(2,2): decomposable but not orthogonally, nilpotent part.
    O22Jordan,
    /// o(2,2): decomposable but not orthogonally, rotation part.
    O22Rotation,
}

impl Or2Kind {
    pub fn tag(&self) -> &'static str {
        match self {
            Or2Kind::Od { .. } => "OD",
            Or2Kind::FreeRowed => "MANS-free-rowed",
            Or2Kind::NonFreeRowed => "MANS-non-free-rowed",
            Or2Kind::TwoBlock { .. } => "MANS-two-block",
            Or2Kind::Naoid => "NAOID",
            Or2Kind::O22Jordan => "o22-jordan",
            Or2Kind::O22Rotation => "o22-rotation",
        }
    }
}

/// Identification of the o(r,2) block frame with conformal coordinates of
/// M(r−1,1). The isotropic pair may be swapped (x1 → −x1) and the spatial
/// coordinates permuted and reflected.
#[derive(Clone, Debug)]
struct Or2Frame {
    mid_perm: Option<Vec<usize>>,
    flip: bool,
    reflect: Vec<usize>,
}

impl Default for Or2Frame {
    fn default() -> Self {
        Or2Frame { mid_perm: None, flip: false, reflect: Vec::new() }
    }
}

/// Conformal ambient whose extended metric is
/// `antidiag(1, antidiag(1, I_{r−2}, 1), 1)`.
fn or2_frame(r: usize, f: &Or2Frame) -> Result<Arc<AmbientAlgebra>> {
    let p = r - 1;
    let n = p + 1;
    let mut s = lightcone_frame(p);
    if let Some(perm) = &f.mid_perm {
        let orig = s.clone();
        for (dst, &src) in perm.iter().enumerate() {
            for c in 0..n {
                s.set(1 + dst, c, orig.get(1 + src, c).clone());
            }
        }
    }
    if f.flip {
        for row in [0, n - 1] {
            let v = s.get(row, 0).clone();
            s.set(row, 0, -v);
        }
    }
    for &row in &f.reflect {
        for c in 0..n {
            let v = -s.get(row, c);
            s.set(row, c, v);
        }
    }
    AmbientAlgebra::with_frame(AlgebraKind::Conformal, MetricSignature::new(p, 1)?, s)
}

/// The non-free-rowed family at r = 3 has an empty α block.
pub fn or2_degenerate(r: usize, kind: &Or2Kind) -> bool {
    r == 3 && *kind == Or2Kind::NonFreeRowed
}

/// Kinds available for a given r, as listed by the o(r,2) classification.
pub fn or2_kinds(r: usize) -> Vec<Or2Kind> {
    let mut v = Vec::new();
    if r == 2 {
        v.push(Or2Kind::Od { s: 0, l: 1, boost: false });
        v.push(Or2Kind::Od { s: 1, l: 0, boost: true });
        v.push(Or2Kind::FreeRowed);
        v.push(Or2Kind::Naoid);
        v.push(Or2Kind::O22Jordan);
        v.push(Or2Kind::O22Rotation);
        return v;
    }
    for l in 1..=r / 2 {
        v.push(Or2Kind::Od { s: r - 2 * l, l, boost: false });
    }
    for l in 0..=(r - 1) / 2 {
        v.push(Or2Kind::Od { s: r - 1 - 2 * l, l, boost: true });
    }
    v.push(Or2Kind::FreeRowed);
    v.push(Or2Kind::NonFreeRowed);
    if r >= 4 {
        let mut q = vec![ExactScalar::zero(); r - 2];
        q[0] = int(1);
        q[1] = int(-1);
        v.push(Or2Kind::TwoBlock { q });
    }
    if r % 2 == 0 {
        v.push(Or2Kind::Naoid);
    }
    v
}

pub fn masa_or2(r: usize, kind: &Or2Kind) -> Result<Subalgebra> {
    if r < 2 {
        return Err(Error::Invalid("o(r,2) needs r >= 2".into()));
    }
    let size = r + 2;
    let unavailable = |why: &str| Err(Error::Invalid(format!("{} is unavailable for r = {r}: {why}", kind.tag())));
    match kind {
        Or2Kind::FreeRowed => {
            let amb = or2_frame(r, &Or2Frame::default())?;
            let k0 = lightcone_metric(r - 2);
            let mats = (0..r)
                .map(|i| {
                    let mut a = ExactMatrix::zeros(1, r);
                    a.set_int(0, i, 1);
                    let pl = KravchukPayload { a, s: ExactMatrix::zeros(r, r), y: ExactMatrix::zeros(1, 1) };
                    kravchuk_matrix(1, &k0, &pl)
                })
                .collect();
            Subalgebra::from_independent(&amb, mats)
        }
        Or2Kind::NonFreeRowed => {
            if r < 3 {
                return unavailable("needs r >= 3");
            }
            // the special middle coordinate becomes x2
            let mut perm: Vec<usize> = (1..r - 2).collect();
            perm.push(0);
            let f = Or2Frame { mid_perm: Some(perm), reflect: vec![r - 2], ..Default::default() };
            let amb = or2_frame(r, &f)?;
            let (u, v, last) = (1, r, r + 1);
            let sp = r - 1;
            let mut xa = ExactMatrix::zeros(size, size);
            xa.set_int(0, u, 1);
            xa.set_int(u, sp, 1);
            xa.set_int(sp, v, -1);
            xa.set_int(v, last, -1);
            let mut xb = ExactMatrix::zeros(size, size);
            xb.set_int(0, v, 1);
            xb.set_int(u, last, -1);
            let mut mats = vec![xa, xb];
            for i in 0..r - 3 {
                let mut m = ExactMatrix::zeros(size, size);
                m.set_int(0, 2 + i, 1);
                m.set_int(2 + i, last, -1);
                mats.push(m);
            }
            Subalgebra::from_independent(&amb, mats)
        }
        Or2Kind::TwoBlock { q } => {
            if r < 4 {
                return unavailable("Q = diag(q) must be nonzero with trace 0 and q_1 = 1, which needs r >= 4");
            }
            if q.len() != r - 2 {
                return Err(Error::Invalid(format!("Q needs {} entries", r - 2)));
            }
            check_normalized_diagonal(q)?;
            let amb = or2_frame(r, &Or2Frame::default())?;
            let (v, last) = (r, r + 1);
            let mut x = ExactMatrix::zeros(size, size);
            x.set_int(0, v, 1);
            x.set_int(1, last, -1);
            let mut mats = vec![x];
            for (i, qi) in q.iter().enumerate() {
                let c = 2 + i;
                let mut m = ExactMatrix::zeros(size, size);
                m.set_int(0, c, 1);
                m.set(1, c, qi.clone());
                m.set(c, v, -qi);
                m.set_int(c, last, -1);
                mats.push(m);
            }
            Subalgebra::from_independent(&amb, mats)
        }
        Or2Kind::Naoid => {
            if r % 2 != 0 {
                return unavailable("needs r even");
            }
            let k = r / 2;
            let amb = orthogonal(&naoid_metric(k))?;
            Subalgebra::from_independent(&amb, naoid_generators(k))
        }
        Or2Kind::O22Jordan | Or2Kind::O22Rotation => {
            if r != 2 {
                return unavailable("exists only for o(2,2)");
            }
            let amb = or2_frame(2, &Or2Frame { flip: true, ..Default::default() })?;
            let a = ExactMatrix::diag_ints(&[1, 1, -1, -1]);
            let b = if *kind == Or2Kind::O22Jordan {
                ExactMatrix::from_ints(&[&[0, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 0, 0]])
            } else {
                ExactMatrix::from_ints(&[&[0, 1, 0, 0], &[-1, 0, 0, 0], &[0, 0, 0, -1], &[0, 0, 1, 0]])
            };
            Subalgebra::from_independent(&amb, vec![a, b])
        }
        Or2Kind::Od { s, l, boost } => {
            if s + 2 * l + usize::from(*boost) != r {
                return Err(Error::Invalid("decomposition pattern must add up to r".into()));
            }
            if !boost && *l == 0 {
                return unavailable("a decomposable pattern needs at least one block");
            }
            od_or2(*s, *l, *boost)
        }
    }
}

/// `(s,2) ⊕ l(2,0)` or `(s,1) ⊕ (1,1) ⊕ l(2,0)` in block form.
fn od_or2(s: usize, l: usize, boost: bool) -> Result<Subalgebra> {
    // first block: OID MASA of o(s,2) (rotation for s = 0, free-rowed MANS
    // otherwise) or of o(s,1) (nothing, boost, or MANS)
    let (kb, inner): (ExactMatrix, Vec<ExactMatrix>) = match (boost, s) {
        (false, 0) => (ExactMatrix::diag_ints(&[-1, -1]), vec![rotation_block()]),
        (false, _) => {
            let k0 = if s == 1 { ExactMatrix::diag_ints(&[-1]) } else { lightcone_metric(s - 2) };
            let mats = (0..s)
                .map(|i| {
                    let mut a = ExactMatrix::zeros(1, s);
                    a.set_int(0, i, 1);
                    let pl = KravchukPayload { a, s: ExactMatrix::zeros(s, s), y: ExactMatrix::zeros(1, 1) };
                    kravchuk_matrix(1, &k0, &pl)
                })
                .collect();
            (kravchuk_metric(1, &k0), mats)
        }
        (true, 0) => (ExactMatrix::diag_ints(&[-1]), Vec::new()),
        (true, 1) => (lightcone_metric(0), vec![ExactMatrix::diag_ints(&[1, -1])]),
        (true, _) => (lightcone_metric(s - 1), (0..s - 1).map(|i| null_rotation(s + 1, 0, s - 1, i)).collect()),
    };
    let mut blocks = vec![kb.clone()];
    if boost {
        blocks.push(lightcone_metric(0));
    }
    blocks.push(ExactMatrix::identity(2 * l));
    let metric = ExactMatrix::block_diag(&blocks);
    let amb = orthogonal(&metric)?;
    let size = metric.rows();
    let mut mats: Vec<ExactMatrix> = inner
        .into_iter()
        .map(|x| {
            let mut m = ExactMatrix::zeros(size, size);
            m.put(0, 0, &x);
            m
        })
        .collect();
    let mut off = kb.rows();
    if boost {
        let mut b = ExactMatrix::zeros(size, size);
        b.set_int(off, off, 1);
        b.set_int(off + 1, off + 1, -1);
        mats.push(b);
        off += 2;
    }
    mats.extend(rotations(size, off, l));
    Subalgebra::from_independent(&amb, mats)
}

/// Metric pairing coordinates `(0, r)` and `(1, r+1)` around `I_{2k−2}`.
pub fn naoid_metric(k: usize) -> ExactMatrix {
    let n = 2 * k + 2;
    let mut m = ExactMatrix::zeros(n, n);
    m.set_int(0, n - 2, 1);
    m.set_int(n - 2, 0, 1);
    m.set_int(1, n - 1, 1);
    m.set_int(n - 1, 1, 1);
    for i in 2..n - 2 {
        m.set_int(i, i, 1);
    }
    m
}

/// Generators `a, b_1..b_{k−1}, c` of the NAOID family.
pub fn naoid_generators(k: usize) -> Vec<ExactMatrix> {
    let n = 2 * k + 2;
    let mut out = Vec::new();
    // middle pairs rotate in the opposite sense; with a uniform sense the
    // b-blocks anticommute with a
    let mut a = ExactMatrix::zeros(n, n);
    for i in 0..=k {
        let j = if i == 0 || i == k { rotation_block() } else { rotation_block().scale(&int(-1)) };
        a.put(2 * i, 2 * i, &j);
    }
    out.push(a);
    for i in 1..k {
        let (c0, c1) = (2 * i, 2 * i + 1);
        let mut b = ExactMatrix::zeros(n, n);
        b.set_int(0, c0, 1);
        b.set_int(0, c1, 1);
        b.set_int(1, c0, 1);
        b.set_int(1, c1, -1);
        b.set_int(c0, n - 2, -1);
        b.set_int(c0, n - 1, -1);
        b.set_int(c1, n - 2, -1);
        b.set_int(c1, n - 1, 1);
        out.push(b);
    }
    let mut c = ExactMatrix::zeros(n, n);
    c.set_int(0, n - 1, 1);
    c.set_int(1, n - 2, -1);
    out.push(c);
    out
}

/// Rational stand-in for complexification: the rotation generator `J` is a
/// direct sum of companion matrices of x² + 1 (so `J² = −I` and `J` is a
/// complex structure), every element commutes with it, and `J` is
/// skew for the metric. The algebra is then complex-linear and splits into
/// the ±i eigenspaces of `J` over the Gaussian rationals.
pub fn naoid_complex_structure(s: &Subalgebra) -> bool {
    let n = s.ambient.size();
    let minus_i = ExactMatrix::identity(n).scale(&int(-1));
    let Some(j) = s.basis.iter().find(|b| b.matrix.try_mul(&b.matrix).ok() == Some(minus_i.clone())) else {
        return false;
    };
    let skew = j
        .matrix
        .try_mul(&s.ambient.ext)
        .and_then(|x| x.try_add(&s.ambient.ext.try_mul(&j.matrix.transpose())?))
        .map(|x| x.is_zero())
        .unwrap_or(false);
    skew && s.basis.iter().all(|b| b.matrix.commutator(&j.matrix).map(|c| c.is_zero()).unwrap_or(false))
}

// ----------------------------------------------------------- physical basis

/// Conformal frame matching the NAOID metric: swap the last two coordinates.
fn naoid_to_conformal(k: usize) -> Result<(ExactMatrix, Arc<AmbientAlgebra>)> {
    let n = 2 * k + 2;
    let mut perm = ExactMatrix::identity(n);
    perm.set_int(n - 2, n - 2, 0);
    perm.set_int(n - 1, n - 1, 0);
    perm.set_int(n - 2, n - 1, 1);
    perm.set_int(n - 1, n - 2, 1);
    Ok((perm, or2_frame(2 * k, &Or2Frame { flip: true, ..Default::default() })?))
}

/// Expand each basis element in named generators P, L, D, C of the
/// canonical (or conformal) frame.
pub fn physical_basis(masa: &Subalgebra) -> Result<Vec<Vec<(ExactScalar, String)>>> {
    let sub = match masa.ambient.kind {
        AlgebraKind::Euclidean | AlgebraKind::Conformal => masa.clone(),
        AlgebraKind::Orthogonal => to_conformal_frame(masa)?,
    };
    sub.basis
        .iter()
        .map(|b| b.terms().ok_or_else(|| Error::Invalid("element outside the named-generator span".into())))
        .collect()
}

/// Move an o(r,2) subalgebra given in some orthogonal frame into a conformal
/// frame of M(r−1,1).
pub fn to_conformal_frame(masa: &Subalgebra) -> Result<Subalgebra> {
    let amb = &masa.ambient;
    if amb.kind == AlgebraKind::Conformal {
        return Ok(masa.clone());
    }
    let sig = amb.signature();
    if amb.kind != AlgebraKind::Orthogonal || sig.q != 2 {
        return Err(Error::Invalid("only o(r,2) subalgebras have a conformal frame here".into()));
    }
    let r = sig.p;
    let k = r / 2;
    let (t, target) = if r % 2 == 0 && amb.metric.matrix == naoid_metric(k) {
        naoid_to_conformal(k)?
    } else {
        let target = or2_frame(r, &Or2Frame::default())?;
        let (s1, _) = crate::liecore::congruence_frame(&amb.metric.matrix)?;
        let (s2, _) = crate::liecore::congruence_frame(&target.ext)?;
        (s2.try_mul(&s1.inverse().ok_or(Error::Singular)?)?, target)
    };
    crate::liecore::conjugate_into(masa, &t, &target)
}

/// Human-readable physical basis.
pub fn physical_basis_strings(masa: &Subalgebra) -> Result<Vec<String>> {
    Ok(physical_basis(masa)?.iter().map(|t| format_terms(t)).collect())
}

/// Materialize a physical-basis expansion back into its ambient.
pub fn materialize_terms(amb: &Arc<AmbientAlgebra>, terms: &[Vec<(ExactScalar, String)>]) -> Result<Subalgebra> {
    let elems = terms
        .iter()
        .map(|t| {
            let refs: Vec<(ExactScalar, &str)> = t.iter().map(|(c, n)| (c.clone(), n.as_str())).collect();
            amb.combination(&refs)
        })
        .collect::<Result<Vec<_>>>()?;
    Subalgebra::from_elements(elems)
}
