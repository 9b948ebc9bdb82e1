//! Matrix Lie algebras e(p,q), o(p,q) and o(p+1,q+1): brackets, spans,
//! centralizers, maximality and conjugation.
//!
//! Every ambient algebra carries a frame matrix `S` relating its metric to the
//! canonical diagonal one, `K = S·g·Sᵀ`, and a named basis obtained by
//! transporting the canonical generators through that frame.

use std::fmt;
use std::sync::Arc;

use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{nullspace, rref_pivots, ExactMatrix, ExactScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraKind {
    /// Inhomogeneous e(p,q) in the affine `(n+1)×(n+1)` realization.
    Euclidean,
    /// Homogeneous o(p,q), `n×n`.
    Orthogonal,
    /// Conformal o(p+1,q+1), `(n+2)×(n+2)`.
    Conformal,
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraKind::Euclidean => "e",
            AlgebraKind::Orthogonal => "o",
            AlgebraKind::Conformal => "conf",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MetricSignature {
    pub p: usize,
    pub q: usize,
}

impl MetricSignature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p < q {
            return Err(Error::Invalid(format!("signature ({p},{q}) needs p >= q")));
        }
        if p + q == 0 {
            return Err(Error::Invalid("empty signature".into()));
        }
        Ok(MetricSignature { p, q })
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// `g = diag(+1 × p, −1 × q)`.
    pub fn canonical_matrix(&self) -> ExactMatrix {
        let d: Vec<i64> = (0..self.n()).map(|i| if i < self.p { 1 } else { -1 }).collect();
        ExactMatrix::diag_ints(&d)
    }

    pub fn g(&self, i: usize) -> i64 {
        if i < self.p {
            1
        } else {
            -1
        }
    }
}

/// Symmetric invertible matrix with known signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    pub matrix: ExactMatrix,
    pub signature: MetricSignature,
}

impl Metric {
    pub fn canonical(p: usize, q: usize) -> Result<Self> {
        let signature = MetricSignature::new(p, q)?;
        Ok(Metric { matrix: signature.canonical_matrix(), signature })
    }

    /// Validate `k` and read off its signature.
    pub fn new(k: ExactMatrix) -> Result<Self> {
        let (_, signature) = congruence_frame(&k)?;
        Ok(Metric { matrix: k, signature })
    }
}

fn rational_sqrt(x: &ExactScalar) -> Option<ExactScalar> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(ExactScalar::from_big(num_rational::BigRational::new(rn, rd)))
    } else {
        None
    }
}

/// Find `S` with `S·g·Sᵀ = k`, `g` the canonical diagonal metric of the
/// signature of `k`. Works over the rationals whenever the congruence
/// diagonalization only meets squares, which covers every metric used here.
pub fn congruence_frame(k: &ExactMatrix) -> Result<(ExactMatrix, MetricSignature)> {
    if !k.is_symmetric() {
        return Err(Error::Invalid("metric must be symmetric".into()));
    }
    let n = k.rows();
    if k.rank() != n {
        return Err(Error::Invalid("metric must be invertible".into()));
    }
    // Row operations on `l` track W with W·k·Wᵀ = current `a`.
    let mut a = k.clone();
    let mut w = ExactMatrix::identity(n);
    let congr = |a: &mut ExactMatrix, w: &mut ExactMatrix, e: &ExactMatrix| {
        *a = e.try_mul(a).unwrap().try_mul(&e.transpose()).unwrap();
        *w = e.try_mul(w).unwrap();
    };
    for i in 0..n {
        let usable = |x: &ExactScalar| !x.is_zero() && rational_sqrt(&x.abs()).is_some();
        if !usable(a.get(i, i)) {
            if let Some(j) = (i + 1..n).find(|&j| usable(a.get(j, j))) {
                let mut e = ExactMatrix::identity(n);
                e.set_int(i, i, 0);
                e.set_int(j, j, 0);
                e.set_int(i, j, 1);
                e.set_int(j, i, 1);
                congr(&mut a, &mut w, &e);
            } else {
                // Mix in a partner direction to produce a square norm.
                let mut done = false;
                for j in i + 1..n {
                    let c = a.get(i, j).clone();
                    if c.is_zero() {
                        continue;
                    }
                    let mut cands = vec![(&ExactScalar::from_int(2) * &c).recip()];
                    for t in [1i64, -1, 2, -2] {
                        cands.push(ExactScalar::from_int(t));
                        cands.push(ExactScalar::ratio(1, t));
                    }
                    for t in cands {
                        let v = a.get(i, i)
                            + &(&ExactScalar::from_int(2) * &(&t * &c))
                            + (&t * &t) * a.get(j, j);
                        if usable(&v) {
                            let mut e = ExactMatrix::identity(n);
                            e.set(i, j, t);
                            congr(&mut a, &mut w, &e);
                            done = true;
                            break;
                        }
                    }
                    if done {
                        break;
                    }
                }
                if !done {
                    return Err(Error::Invalid(
                        "metric is not rationally congruent to a signed identity".into(),
                    ));
                }
            }
        }
        let piv = a.get(i, i).clone();
        let mut e = ExactMatrix::identity(n);
        for j in i + 1..n {
            let f = a.get(j, i) / &piv;
            e.set(j, i, -f);
        }
        congr(&mut a, &mut w, &e);
        let s = rational_sqrt(&piv.abs()).expect("usable pivot").recip();
        let mut e = ExactMatrix::identity(n);
        e.set(i, i, s);
        congr(&mut a, &mut w, &e);
    }
    // a is now diagonal ±1; sort positives first.
    let pos: Vec<usize> = (0..n).filter(|&i| !a.get(i, i).is_negative()).collect();
    let neg: Vec<usize> = (0..n).filter(|&i| a.get(i, i).is_negative()).collect();
    let mut perm = ExactMatrix::zeros(n, n);
    for (r, &i) in pos.iter().chain(neg.iter()).enumerate() {
        perm.set_int(r, i, 1);
    }
    let w = perm.try_mul(&w)?;
    let signature = MetricSignature { p: pos.len(), q: neg.len() };
    let s = w.inverse().ok_or(Error::Singular)?;
    Ok((s, signature))
}

/// An ambient matrix Lie algebra in a fixed metric frame.
#[derive(Debug, PartialEq, Eq)]
pub struct AmbientAlgebra {
    pub kind: AlgebraKind,
    /// Metric of the underlying space `R^{p,q}` in this frame.
    pub metric: Metric,
    /// `K_e`, `K` or `K_C` depending on the kind.
    pub ext: ExactMatrix,
    /// `S` with `metric = S·g·Sᵀ`.
    pub frame: ExactMatrix,
    pub basis: Vec<ExactMatrix>,
    pub names: Vec<String>,
}

/// Matrix size of the realization.
fn realization_size(kind: AlgebraKind, n: usize) -> usize {
    match kind {
        AlgebraKind::Euclidean => n + 1,
        AlgebraKind::Orthogonal => n,
        AlgebraKind::Conformal => n + 2,
    }
}

/// Display index of coordinate position `pos`: with one negative direction it
/// is called 0 (time), otherwise positions are numbered from 1.
fn display_index(sig: MetricSignature, pos: usize) -> usize {
    if sig.q == 1 && pos == sig.p {
        0
    } else {
        pos + 1
    }
}

fn position_of(sig: MetricSignature, idx: usize) -> Result<usize> {
    let n = sig.n();
    if sig.q == 1 && idx == 0 {
        return Ok(n - 1);
    }
    if idx == 0 || idx > n || (sig.q == 1 && idx == n) {
        return Err(Error::Invalid(format!("no coordinate with index {idx}")));
    }
    Ok(idx - 1)
}

fn l_name(sig: MetricSignature, i: usize, j: usize) -> String {
    format!("L({},{})", display_index(sig, i), display_index(sig, j))
}

/// Canonical-frame generators: `(names, matrices)`.
fn canonical_generators(kind: AlgebraKind, sig: MetricSignature) -> (Vec<String>, Vec<ExactMatrix>) {
    let n = sig.n();
    let size = realization_size(kind, n);
    let off = usize::from(kind == AlgebraKind::Conformal);
    let g = |i: usize| ExactScalar::from_int(sig.g(i));
    let mut names = Vec::new();
    let mut mats = Vec::new();
    let rot = |i: usize, j: usize| {
        // L_ij = g_jj E_ij − g_ii E_ji
        let mut m = ExactMatrix::zeros(size, size);
        m.set(i + off, j + off, g(j));
        m.set(j + off, i + off, -g(i));
        m
    };
    if kind != AlgebraKind::Orthogonal {
        for i in 0..n {
            names.push(format!("P{}", display_index(sig, i)));
            mats.push(translation_matrix(kind, sig, i));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            // with a single time direction, name its rotations L(0,i)
            let (a, b) = if sig.q == 1 && j == sig.p { (j, i) } else { (i, j) };
            names.push(l_name(sig, a, b));
            mats.push(rot(a, b));
        }
    }
    if kind == AlgebraKind::Conformal {
        let mut d = ExactMatrix::zeros(size, size);
        d.set_int(0, 0, -1);
        d.set_int(size - 1, size - 1, 1);
        names.push("D".into());
        mats.push(d);
        for a in 0..n {
            // C_a = −2·(β = e_a)
            let mut c = ExactMatrix::zeros(size, size);
            c.set_int(a + 1, 0, -2);
            c.set(size - 1, a + 1, &ExactScalar::from_int(2) * &g(a));
            names.push(format!("C{}", display_index(sig, a)));
            mats.push(c);
        }
    }
    (names, mats)
}

fn translation_matrix(kind: AlgebraKind, sig: MetricSignature, i: usize) -> ExactMatrix {
    let n = sig.n();
    let size = realization_size(kind, n);
    let mut m = ExactMatrix::zeros(size, size);
    match kind {
        AlgebraKind::Euclidean => m.set_int(i, n, 1),
        AlgebraKind::Conformal => {
            // α = (g·e_i)ᵀ, last column −e_i
            m.set_int(0, i + 1, sig.g(i));
            m.set_int(i + 1, size - 1, -1);
        }
        AlgebraKind::Orthogonal => unreachable!("no translations in o(p,q)"),
    }
    m
}

/// Lift of a space frame `S` to the matrix realization.
fn lift_frame(kind: AlgebraKind, s: &ExactMatrix) -> ExactMatrix {
    let one = ExactMatrix::identity(1);
    match kind {
        AlgebraKind::Euclidean => ExactMatrix::block_diag(&[s.clone(), one]),
        AlgebraKind::Orthogonal => s.clone(),
        AlgebraKind::Conformal => ExactMatrix::block_diag(&[one.clone(), s.clone(), one]),
    }
}

/// Extended metric of the realization for a space metric `k`.
pub fn extended_metric(kind: AlgebraKind, k: &ExactMatrix) -> ExactMatrix {
    let n = k.rows();
    match kind {
        AlgebraKind::Euclidean => ExactMatrix::block_diag(&[k.clone(), ExactMatrix::zeros(1, 1)]),
        AlgebraKind::Orthogonal => k.clone(),
        AlgebraKind::Conformal => {
            let mut kc = ExactMatrix::zeros(n + 2, n + 2);
            kc.set_int(0, n + 1, 1);
            kc.set_int(n + 1, 0, 1);
            kc.put(1, 1, k);
            kc
        }
    }
}

impl AmbientAlgebra {
    /// Canonical diagonal frame.
    pub fn canonical(kind: AlgebraKind, p: usize, q: usize) -> Result<Arc<Self>> {
        let sig = MetricSignature::new(p, q)?;
        Self::with_frame(kind, sig, ExactMatrix::identity(sig.n()))
    }

    /// Frame given explicitly: the space metric becomes `S·g·Sᵀ`.
    pub fn with_frame(kind: AlgebraKind, sig: MetricSignature, s: ExactMatrix) -> Result<Arc<Self>> {
        let sig = MetricSignature::new(sig.p, sig.q)?;
        let n = sig.n();
        if s.rows() != n || !s.is_square() {
            return Err(Error::Dimension(format!("frame must be {n}x{n}")));
        }
        let lift = lift_frame(kind, &s);
        let lift_inv = lift.inverse().ok_or(Error::Singular)?;
        let g = sig.canonical_matrix();
        let k = s.try_mul(&g)?.try_mul(&s.transpose())?;
        let (names, mats) = canonical_generators(kind, sig);
        let basis = mats
            .iter()
            .map(|m| lift.try_mul(m).and_then(|x| x.try_mul(&lift_inv)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Arc::new(AmbientAlgebra {
            kind,
            ext: extended_metric(kind, &k),
            metric: Metric { matrix: k, signature: sig },
            frame: s,
            basis,
            names,
        }))
    }

    /// Frame determined by an arbitrary metric `k` (signature read off).
    pub fn with_metric(kind: AlgebraKind, k: &ExactMatrix) -> Result<Arc<Self>> {
        let (s, sig) = congruence_frame(k)?;
        let amb = Self::with_frame(kind, sig, s)?;
        debug_assert_eq!(&amb.metric.matrix, k);
        Ok(amb)
    }

    pub fn signature(&self) -> MetricSignature {
        self.metric.signature
    }

    pub fn n(&self) -> usize {
        self.metric.signature.n()
    }

    pub fn size(&self) -> usize {
        realization_size(self.kind, self.n())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_canonical(&self) -> bool {
        self.frame == ExactMatrix::identity(self.n())
    }

    pub fn same_as(&self, other: &AmbientAlgebra) -> bool {
        std::ptr::eq(self, other) || (self.kind == other.kind && self.ext == other.ext)
    }

    /// Whether `m` satisfies the shape and metric conditions of this algebra.
    pub fn contains_matrix(&self, m: &ExactMatrix) -> bool {
        let size = self.size();
        if m.rows() != size || m.cols() != size {
            return false;
        }
        if self.kind == AlgebraKind::Euclidean && !m.row(size - 1).iter().all(|x| x.is_zero()) {
            return false;
        }
        let lhs = m.try_mul(&self.ext).unwrap();
        let rhs = self.ext.try_mul(&m.transpose()).unwrap();
        lhs.try_add(&rhs).unwrap().is_zero()
    }

    pub fn lift_frame(&self) -> ExactMatrix {
        lift_frame(self.kind, &self.frame)
    }

    /// Whole algebra as a subalgebra.
    pub fn full(self: &Arc<Self>) -> Subalgebra {
        Subalgebra {
            basis: self.basis.iter().map(|m| LieElement { matrix: m.clone(), ambient: self.clone() }).collect(),
            ambient: self.clone(),
        }
    }

    /// Named generator, e.g. `"P0"`, `"L(1,2)"`, `"D"`, `"C3"`.
    pub fn generator(self: &Arc<Self>, name: &str) -> Result<LieElement> {
        let canon = canonical_name(name);
        let i = self
            .names
            .iter()
            .position(|x| *x == canon)
            .or_else(|| self.flipped_rotation(&canon).map(|(i, _)| i))
            .ok_or_else(|| Error::Invalid(format!("no generator named {name}")))?;
        let mut m = self.basis[i].clone();
        if self.names[i] != canon {
            m = m.scale(&ExactScalar::from_int(-1));
        }
        Ok(LieElement { matrix: m, ambient: self.clone() })
    }

    fn flipped_rotation(&self, name: &str) -> Option<(usize, ())> {
        let inner = name.strip_prefix("L(")?.strip_suffix(')')?;
        let (a, b) = inner.split_once(',')?;
        let flipped = format!("L({b},{a})");
        self.names.iter().position(|x| *x == flipped).map(|i| (i, ()))
    }

    /// `P_i` with the display index convention (0 = time when q = 1).
    pub fn p(self: &Arc<Self>, i: usize) -> LieElement {
        self.generator(&format!("P{i}")).expect("translation index in range")
    }

    pub fn l(self: &Arc<Self>, i: usize, j: usize) -> LieElement {
        self.generator(&format!("L({i},{j})")).expect("rotation index in range")
    }

    /// Linear combination of named generators.
    pub fn combination(self: &Arc<Self>, terms: &[(ExactScalar, &str)]) -> Result<LieElement> {
        let size = self.size();
        let mut m = ExactMatrix::zeros(size, size);
        for (c, name) in terms {
            m = m.try_add(&self.generator(name)?.matrix.scale(c))?;
        }
        LieElement::new(m, self.clone())
    }

    /// Parse `"P0 - P1 + 2 L(0,2) - 1/2 D"` into a combination.
    pub fn parse_combination(self: &Arc<Self>, expr: &str) -> Result<LieElement> {
        let terms = parse_terms(expr)?;
        let refs: Vec<(ExactScalar, &str)> = terms.iter().map(|(c, n)| (c.clone(), n.as_str())).collect();
        self.combination(&refs)
    }

    /// Coordinates of `m` in the named basis.
    pub fn express(&self, m: &ExactMatrix) -> Option<Vec<(ExactScalar, String)>> {
        let c = crate::exactla::coordinates(&self.basis, m)?;
        let mut t: Vec<(ExactScalar, String)> = c
            .into_iter()
            .zip(self.names.iter())
            .filter(|(x, _)| !x.is_zero())
            .map(|(x, n)| (x, n.clone()))
            .collect();
        t.sort_by_key(|(_, n)| name_key(n));
        Some(t)
    }

    /// Position of display index `idx` among the space coordinates.
    pub fn position(&self, idx: usize) -> Result<usize> {
        position_of(self.signature(), idx)
    }
}

fn canonical_name(name: &str) -> String {
    name.chars().filter(|c| !c.is_whitespace() && *c != '_').collect()
}

/// Split a signed sum of `coefficient name` terms.
/// Reading order: P, L, D, C, then by indices.
fn name_key(name: &str) -> (u8, Vec<usize>) {
    let kind = match name.chars().next() {
        Some('P') => 0,
        Some('L') => 1,
        Some('D') => 2,
        _ => 3,
    };
    let idx = name
        .split(|c: char| !c.is_ascii_digit())
        .filter(|x| !x.is_empty())
        .filter_map(|x| x.parse().ok())
        .collect();
    (kind, idx)
}

pub fn parse_terms(expr: &str) -> Result<Vec<(ExactScalar, String)>> {
    let bad = || Error::Parse(format!("cannot parse combination {expr:?}"));
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut coef: Option<ExactScalar> = None;
    let mut chars = expr.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() || c == '*' {
            chars.next();
        } else if c == '+' || c == '-' {
            if c == '-' {
                sign = -sign;
            }
            chars.next();
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() || d == '/' {
                    s.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            coef = Some(s.parse().map_err(|_| bad())?);
        } else if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                } else if d == '(' {
                    for d in chars.by_ref() {
                        s.push(d);
                        if d == ')' {
                            break;
                        }
                    }
                    break;
                } else {
                    break;
                }
            }
            let c = coef.take().unwrap_or_else(ExactScalar::one);
            out.push((c * ExactScalar::from_int(sign), s));
            sign = 1;
        } else {
            return Err(bad());
        }
    }
    if coef.is_some() {
        return Err(bad());
    }
    Ok(out)
}

/// Convenience constructors.
pub fn build_epq(p: usize, q: usize) -> Result<Arc<AmbientAlgebra>> {
    AmbientAlgebra::canonical(AlgebraKind::Euclidean, p, q)
}

pub fn build_opq(p: usize, q: usize) -> Result<Arc<AmbientAlgebra>> {
    AmbientAlgebra::canonical(AlgebraKind::Orthogonal, p, q)
}

pub fn build_conformal(p: usize, q: usize) -> Result<Arc<AmbientAlgebra>> {
    AmbientAlgebra::canonical(AlgebraKind::Conformal, p, q)
}

/// Element of an ambient algebra.
#[derive(Clone)]
pub struct LieElement {
    pub matrix: ExactMatrix,
    pub ambient: Arc<AmbientAlgebra>,
}

impl fmt::Debug for LieElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ambient.express(&self.matrix) {
            Some(t) => write!(f, "{}", format_terms(&t)),
            None => write!(f, "{:?}", self.matrix),
        }
    }
}

impl PartialEq for LieElement {
    fn eq(&self, o: &Self) -> bool {
        self.ambient.same_as(&o.ambient) && self.matrix == o.matrix
    }
}

/// `"P0 - P1 + 1/2 L(0,2)"`.
pub fn format_terms(terms: &[(ExactScalar, String)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (c, n)) in terms.iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !a.is_one() {
            if a.denom().is_one() {
                s.push_str(&format!("{} ", a.numer()));
            } else {
                s.push_str(&format!("{} ", a));
            }
        }
        s.push_str(n);
    }
    s
}

impl LieElement {
    pub fn new(matrix: ExactMatrix, ambient: Arc<AmbientAlgebra>) -> Result<Self> {
        if !ambient.contains_matrix(&matrix) {
            return Err(Error::Invalid("matrix is not an element of the ambient algebra".into()));
        }
        Ok(LieElement { matrix, ambient })
    }

    pub fn zero(ambient: &Arc<AmbientAlgebra>) -> Self {
        let s = ambient.size();
        LieElement { matrix: ExactMatrix::zeros(s, s), ambient: ambient.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        LieElement { matrix: self.matrix.scale(c), ambient: self.ambient.clone() }
    }

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale(&ExactScalar::from_int(c))
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_ambient(o)?;
        Ok(LieElement { matrix: self.matrix.try_add(&o.matrix)?, ambient: self.ambient.clone() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_ambient(o)?;
        Ok(LieElement { matrix: self.matrix.try_sub(&o.matrix)?, ambient: self.ambient.clone() })
    }

    fn check_ambient(&self, o: &Self) -> Result<()> {
        if self.ambient.same_as(&o.ambient) {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    /// Named-basis expansion.
    pub fn terms(&self) -> Option<Vec<(ExactScalar, String)>> {
        self.ambient.express(&self.matrix)
    }
}

/// `x·y − y·x`.
pub fn bracket(x: &LieElement, y: &LieElement) -> Result<LieElement> {
    x.check_ambient(y)?;
    Ok(LieElement { matrix: x.matrix.commutator(&y.matrix)?, ambient: x.ambient.clone() })
}

/// Reduced echelon form of a span, for fast membership tests.
#[derive(Clone, Debug)]
pub struct SpanIndex {
    rows: Vec<Vec<ExactScalar>>,
    pivots: Vec<usize>,
}

impl SpanIndex {
    pub fn new(vectors: &[Vec<ExactScalar>]) -> Self {
        if vectors.is_empty() {
            return SpanIndex { rows: Vec::new(), pivots: Vec::new() };
        }
        let m = ExactMatrix::from_rows(vectors.to_vec()).expect("equal lengths");
        let (r, pivots) = rref_pivots(&m);
        let rows = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        SpanIndex { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn contains(&self, v: &[ExactScalar]) -> bool {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let f = v[c].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        v.iter().all(|x| x.is_zero())
    }
}

/// Span of linearly independent elements of one ambient algebra.
#[derive(Clone)]
pub struct Subalgebra {
    pub basis: Vec<LieElement>,
    pub ambient: Arc<AmbientAlgebra>,
}

impl fmt::Debug for Subalgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.basis.iter()).finish()
    }
}

impl Subalgebra {
    /// Checked constructor: elements must be independent, lie in the ambient
    /// algebra and close under the bracket.
    pub fn new(ambient: &Arc<AmbientAlgebra>, mats: Vec<ExactMatrix>) -> Result<Self> {
        let s = Self::from_independent(ambient, mats)?;
        if !s.is_closed() {
            return Err(Error::Invalid("span is not closed under the bracket".into()));
        }
        Ok(s)
    }

    /// Independent elements without the closure check.
    pub fn from_independent(ambient: &Arc<AmbientAlgebra>, mats: Vec<ExactMatrix>) -> Result<Self> {
        let basis = mats
            .into_iter()
            .map(|m| LieElement::new(m, ambient.clone()))
            .collect::<Result<Vec<_>>>()?;
        let s = Subalgebra { basis, ambient: ambient.clone() };
        if s.rank() != s.basis.len() {
            return Err(Error::Invalid("basis is linearly dependent".into()));
        }
        Ok(s)
    }

    /// Keep a maximal independent subset of the given elements.
    pub fn spanned_by(ambient: &Arc<AmbientAlgebra>, elems: Vec<LieElement>) -> Result<Self> {
        let mut basis: Vec<LieElement> = Vec::new();
        for e in elems {
            if !e.ambient.same_as(ambient) {
                return Err(Error::AmbientMismatch);
            }
            let mut trial: Vec<Vec<ExactScalar>> = basis.iter().map(|b| b.matrix.flatten()).collect();
            trial.push(e.matrix.flatten());
            if SpanIndex::new(&trial).rank() == trial.len() {
                basis.push(e);
            }
        }
        Ok(Subalgebra { basis, ambient: ambient.clone() })
    }

    pub fn from_elements(elems: Vec<LieElement>) -> Result<Self> {
        let ambient = elems.first().ok_or_else(|| Error::Invalid("no elements".into()))?.ambient.clone();
        let mats = elems
            .into_iter()
            .map(|e| if e.ambient.same_as(&ambient) { Ok(e.matrix) } else { Err(Error::AmbientMismatch) })
            .collect::<Result<Vec<_>>>()?;
        Self::from_independent(&ambient, mats)
    }

    pub fn empty(ambient: &Arc<AmbientAlgebra>) -> Self {
        Subalgebra { basis: Vec::new(), ambient: ambient.clone() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrices(&self) -> Vec<ExactMatrix> {
        self.basis.iter().map(|b| b.matrix.clone()).collect()
    }

    pub fn index(&self) -> SpanIndex {
        let v: Vec<Vec<ExactScalar>> = self.basis.iter().map(|b| b.matrix.flatten()).collect();
        SpanIndex::new(&v)
    }

    fn rank(&self) -> usize {
        self.index().rank()
    }

    pub fn is_closed(&self) -> bool {
        let idx = self.index();
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                let c = a.matrix.commutator(&b.matrix).unwrap();
                if !idx.contains(&c.flatten()) {
                    return false;
                }
            }
        }
        true
    }

    /// Same ambient and same span.
    pub fn same_span(&self, o: &Subalgebra) -> bool {
        if !self.ambient.same_as(&o.ambient) || self.dim() != o.dim() {
            return false;
        }
        let idx = self.index();
        o.basis.iter().all(|b| idx.contains(&b.matrix.flatten()))
    }

    pub fn contains_span(&self, o: &Subalgebra) -> bool {
        let idx = self.index();
        self.ambient.same_as(&o.ambient) && o.basis.iter().all(|b| idx.contains(&b.matrix.flatten()))
    }

    /// Direct sum with another subalgebra of the same ambient.
    pub fn join(&self, o: &Subalgebra) -> Result<Subalgebra> {
        let mut elems = self.basis.clone();
        elems.extend(o.basis.iter().cloned());
        Subalgebra::spanned_by(&self.ambient, elems)
    }

    /// Transport to the canonical frame of the same kind and signature.
    pub fn to_canonical(&self) -> Result<Subalgebra> {
        let sig = self.ambient.signature();
        let target = AmbientAlgebra::canonical(self.ambient.kind, sig.p, sig.q)?;
        let lift = self.ambient.lift_frame();
        let inv = lift.inverse().ok_or(Error::Singular)?;
        let mats = self
            .basis
            .iter()
            .map(|b| inv.try_mul(&b.matrix).and_then(|x| x.try_mul(&lift)))
            .collect::<Result<Vec<_>>>()?;
        Subalgebra::from_independent(&target, mats)
    }

    /// Named-basis expansion of each basis element.
    pub fn describe(&self) -> Vec<String> {
        self.basis
            .iter()
            .map(|b| b.terms().map(|t| format_terms(&t)).unwrap_or_else(|| "?".into()))
            .collect()
    }
}

pub fn span_contains(s: &Subalgebra, x: &LieElement) -> Result<bool> {
    if !s.ambient.same_as(&x.ambient) {
        return Err(Error::AmbientMismatch);
    }
    Ok(s.index().contains(&x.matrix.flatten()))
}

/// `{x ∈ span(within) : [x, b] = 0 for all b ∈ s}`.
pub fn centralizer(s: &Subalgebra, within: &Subalgebra) -> Result<Subalgebra> {
    if !s.ambient.same_as(&within.ambient) {
        return Err(Error::AmbientMismatch);
    }
    let m = within.dim();
    if m == 0 {
        return Ok(Subalgebra::empty(&within.ambient));
    }
    // Column j holds the stacked brackets [w_j, b_i].
    let mut rows: Vec<Vec<ExactScalar>> = Vec::new();
    for b in &s.basis {
        let cols: Vec<Vec<ExactScalar>> =
            within.basis.iter().map(|w| w.matrix.commutator(&b.matrix).unwrap().flatten()).collect();
        let len = cols[0].len();
        for r in 0..len {
            if cols.iter().any(|c| !c[r].is_zero()) {
                rows.push(cols.iter().map(|c| c[r].clone()).collect());
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..m)
            .map(|j| {
                let mut v = vec![ExactScalar::zero(); m];
                v[j] = ExactScalar::one();
                ExactMatrix::column(v)
            })
            .collect()
    } else {
        nullspace(&ExactMatrix::from_rows(rows)?)
    };
    let size = within.ambient.size();
    let mut mats = Vec::with_capacity(kernel.len());
    for v in kernel {
        let mut acc = ExactMatrix::zeros(size, size);
        for (j, w) in within.basis.iter().enumerate() {
            let c = v.get(j, 0);
            if !c.is_zero() {
                acc = acc.try_add(&w.matrix.scale(c))?;
            }
        }
        mats.push(acc);
    }
    Subalgebra::from_independent(&within.ambient, mats)
}

pub fn is_abelian(s: &Subalgebra) -> bool {
    s.basis
        .iter()
        .enumerate()
        .all(|(i, a)| s.basis[i + 1..].iter().all(|b| a.matrix.commutator(&b.matrix).unwrap().is_zero()))
}

/// Abelian and equal to its own centralizer in `ambient_span`.
pub fn is_masa(s: &Subalgebra, ambient_span: &Subalgebra) -> Result<bool> {
    if !is_abelian(s) {
        return Err(Error::NotAbelian);
    }
    let c = centralizer(s, ambient_span)?;
    Ok(c.dim() == s.dim() && c.contains_span(s))
}

pub fn is_nilpotent(x: &LieElement) -> bool {
    is_nilpotent_matrix(&x.matrix)
}

pub fn is_nilpotent_matrix(m: &ExactMatrix) -> bool {
    let n = m.rows();
    let mut p = m.clone();
    for _ in 1..n.max(1) {
        if p.is_zero() {
            return true;
        }
        p = p.try_mul(m).unwrap();
    }
    p.is_zero()
}

/// Fixed-seed random small rational in [-5, 5] with denominators up to 4.
pub fn sample_rational(rng: &mut ChaCha8Rng) -> ExactScalar {
    let num = rng.gen_range(-5i64..=5);
    let den = rng.gen_range(1i64..=4);
    ExactScalar::ratio(num, den)
}

/// Nilpotency of a span: basis, pairwise sums and three random combinations.
pub fn span_is_nilpotent(s: &Subalgebra) -> bool {
    if !s.basis.iter().all(is_nilpotent) {
        return false;
    }
    for (i, a) in s.basis.iter().enumerate() {
        for b in &s.basis[i + 1..] {
            if !is_nilpotent_matrix(&a.matrix.try_add(&b.matrix).unwrap()) {
                return false;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d61_7361);
    let size = s.ambient.size();
    for _ in 0..3 {
        let mut acc = ExactMatrix::zeros(size, size);
        for b in &s.basis {
            acc = acc.try_add(&b.matrix.scale(&sample_rational(&mut rng))).unwrap();
        }
        if !is_nilpotent_matrix(&acc) {
            return false;
        }
    }
    true
}

pub fn is_mans(s: &Subalgebra, ambient_span: &Subalgebra) -> Result<bool> {
    Ok(is_masa(s, ambient_span)? && span_is_nilpotent(s))
}

/// `g·X·g⁻¹` elementwise; `g` must preserve the extended metric (and, in the
/// affine realization, the affine shape).
pub fn conjugate(s: &Subalgebra, g: &ExactMatrix) -> Result<Subalgebra> {
    let amb = &s.ambient;
    if g.inverse().is_none() {
        return Err(Error::Singular);
    }
    let preserved = g.try_mul(&amb.ext)?.try_mul(&g.transpose())? == amb.ext;
    let affine_ok = amb.kind != AlgebraKind::Euclidean || {
        let last = g.rows() - 1;
        (0..g.cols()).all(|j| *g.get(last, j) == if j == last { ExactScalar::one() } else { ExactScalar::zero() })
    };
    if !preserved || !affine_ok {
        return Err(Error::MetricViolation);
    }
    conjugate_into(s, g, amb)
}

/// Unchecked conjugation landing in `target` (a change of metric frame). The
/// images must be elements of `target`.
pub fn conjugate_into(s: &Subalgebra, g: &ExactMatrix, target: &Arc<AmbientAlgebra>) -> Result<Subalgebra> {
    let ginv = g.inverse().ok_or(Error::Singular)?;
    let mats = s
        .basis
        .iter()
        .map(|b| g.try_mul(&b.matrix).and_then(|x| x.try_mul(&ginv)))
        .collect::<Result<Vec<_>>>()?;
    Subalgebra::from_independent(target, mats)
}

/// Group element `exp(θ L)` for a rotation with `cos θ = c`, `sin θ = s`
/// (rational points of the circle keep conjugation exact).
pub fn rational_rotation(size: usize, i: usize, j: usize, c: ExactScalar, s: ExactScalar) -> ExactMatrix {
    let mut g = ExactMatrix::identity(size);
    g.set(i, i, c.clone());
    g.set(j, j, c);
    g.set(i, j, s.clone());
    g.set(j, i, -s);
    g
}

/// Dimension of the span of arbitrary elements.
pub fn span_dim(elems: &[ExactMatrix]) -> usize {
    crate::exactla::span_rank(elems)
}
