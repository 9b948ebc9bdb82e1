//! 1-cocycles of splitting MASAs of e(p,q): commutativity equations for
//! translation tails, coboundaries, and the normal form of the symmetric
//! block in the isotropic case.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{masa_ep1_splitting, SplitCase};
use crate::error::{Error, Result};
use crate::exactla::{coordinates, nullspace, span_rank, ExactMatrix, ExactScalar};
use crate::liecore::{is_abelian, AlgebraKind, AmbientAlgebra, LieElement, Subalgebra};

#[derive(Clone, Debug)]
pub struct CocycleProblem {
    pub ambient: Arc<AmbientAlgebra>,
    /// Homogeneous generators `B_1..B_J`.
    pub b: Vec<LieElement>,
    /// Translations inside the MASA.
    pub x: Vec<LieElement>,
    /// Complement translations.
    pub y: Vec<LieElement>,
    /// Rows (indices into `b`) and columns (indices into `y`) of the
    /// symmetric block, when the problem has one.
    pub sym_block: Option<(Vec<usize>, Vec<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleSolution {
    /// `J × N` tail coefficients: `B̃_a = B_a + Σ_j α_aj Y_j`.
    pub alpha: ExactMatrix,
    pub coboundary: bool,
    pub canonical: Option<NormalForm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormalForm {
    /// The class of δI: splitting.
    Zero,
    /// Trace-zero diagonal, `a_1 = 1 ≥ |a_2| ≥ …`, positive first on ties.
    Diagonal(Vec<ExactScalar>),
    /// Not diagonal: trace-shifted matrix and its characteristic polynomial
    /// (coefficients from the constant term up).
    Uncanonical { matrix: ExactMatrix, charpoly: Vec<ExactScalar> },
}

fn translation(amb: &Arc<AmbientAlgebra>, i: usize) -> LieElement {
    let s = amb.size();
    LieElement { matrix: ExactMatrix::unit(s, s, i, s - 1), ambient: amb.clone() }
}

fn translation_vector(m: &ExactMatrix) -> Option<Vec<ExactScalar>> {
    let s = m.rows();
    let pure = (0..s).all(|i| (0..s - 1).all(|j| m.get(i, j).is_zero())) && m.get(s - 1, s - 1).is_zero();
    pure.then(|| (0..s - 1).map(|i| m.get(i, s - 1).clone()).collect())
}

fn has_translation_part(m: &ExactMatrix) -> bool {
    let s = m.rows();
    (0..s - 1).any(|i| !m.get(i, s - 1).is_zero())
}

impl CocycleProblem {
    pub fn new(b: Vec<LieElement>, x: Vec<LieElement>, y: Vec<LieElement>) -> Result<Self> {
        let ambient = b
            .first()
            .or(x.first())
            .map(|e| e.ambient.clone())
            .ok_or_else(|| Error::Invalid("empty problem".into()))?;
        if ambient.kind != AlgebraKind::Euclidean {
            return Err(Error::Invalid("cocycles are defined for e(p,q) ambients".into()));
        }
        if b.iter().chain(&x).chain(&y).any(|e| !e.ambient.same_as(&ambient)) {
            return Err(Error::AmbientMismatch);
        }
        let n = ambient.n();
        if x.len() + y.len() != n {
            return Err(Error::Dimension(format!("L + N must equal n = {n}")));
        }
        let ts: Vec<ExactMatrix> = x.iter().chain(&y).map(|e| e.matrix.clone()).collect();
        if ts.iter().any(|m| translation_vector(m).is_none()) || span_rank(&ts) != n {
            return Err(Error::Invalid("X and Y must form a basis of the translations".into()));
        }
        Ok(CocycleProblem { ambient, b, x, y, sym_block: None })
    }

    /// Split a splitting MASA into homogeneous generators and translations;
    /// the complement is taken from unit translations.
    pub fn from_splitting(s: &Subalgebra) -> Result<Self> {
        let amb = &s.ambient;
        let mut b = Vec::new();
        let mut x = Vec::new();
        for e in &s.basis {
            if translation_vector(&e.matrix).is_some() {
                x.push(e.clone());
            } else if has_translation_part(&e.matrix) {
                return Err(Error::Invalid("basis is not in split form".into()));
            } else {
                b.push(e.clone());
            }
        }
        let mut span: Vec<ExactMatrix> = x.iter().map(|e| e.matrix.clone()).collect();
        let mut y = Vec::new();
        for i in 0..amb.n() {
            let t = translation(amb, i);
            span.push(t.matrix.clone());
            if span_rank(&span) == span.len() {
                y.push(t);
            } else {
                span.pop();
            }
        }
        CocycleProblem::new(b, x, y)
    }

    /// Isotropic splitting MASA with its symmetric block marked: rows are the
    /// null rotations, columns the middle translations.
    pub fn case_c(p: usize, k_plus: usize, l: usize) -> Result<Self> {
        let s = masa_ep1_splitting(p, SplitCase::C, k_plus, l, None)?;
        let mu = crate::catalog::case_c_mu(p, k_plus, l).expect("constructor checked");
        let mut prob = CocycleProblem::from_splitting(&s)?;
        prob.sym_block = Some(((0..mu).collect(), (0..mu).collect()));
        Ok(prob)
    }

    pub fn j(&self) -> usize {
        self.b.len()
    }

    pub fn n_complement(&self) -> usize {
        self.y.len()
    }

    /// Modified generators `B_a + Σ α_aj Y_j` together with X.
    pub fn substitute(&self, alpha: &ExactMatrix) -> Result<Subalgebra> {
        if (alpha.rows(), alpha.cols()) != (self.j(), self.n_complement()) {
            return Err(Error::Dimension("alpha must be J x N".into()));
        }
        let mut mats = Vec::new();
        for (a, ba) in self.b.iter().enumerate() {
            let mut m = ba.matrix.clone();
            for (j, yj) in self.y.iter().enumerate() {
                m = m.try_add(&yj.matrix.scale(alpha.get(a, j)))?;
            }
            mats.push(m);
        }
        mats.extend(self.x.iter().map(|e| e.matrix.clone()));
        Subalgebra::from_independent(&self.ambient, mats)
    }

    /// Y-coordinates of a translation (X-components dropped).
    fn y_coords(&self, m: &ExactMatrix) -> Result<Vec<ExactScalar>> {
        let basis: Vec<ExactMatrix> = self.y.iter().chain(&self.x).map(|e| e.matrix.clone()).collect();
        let c = coordinates(&basis, m).ok_or_else(|| Error::Other("bracket left the translations".into()))?;
        Ok(c[..self.y.len()].to_vec())
    }
}

fn reshape(v: &ExactMatrix, j: usize, n: usize) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(j, n);
    for a in 0..j {
        for k in 0..n {
            m.set(a, k, v.get(a * n + k, 0).clone());
        }
    }
    m
}

/// Basis of the solution space of the commutativity equations.
pub fn solve_cocycles(prob: &CocycleProblem) -> Result<Vec<CocycleSolution>> {
    let (j, n) = (prob.j(), prob.n_complement());
    let vars = j * n;
    if vars == 0 {
        return Ok(Vec::new());
    }
    // [B_a, Y_k] as Y-coordinates (X-components must vanish too)
    let nt = prob.ambient.n();
    let all: Vec<ExactMatrix> = prob.y.iter().chain(&prob.x).map(|e| e.matrix.clone()).collect();
    let mut brk = vec![vec![Vec::new(); n]; j];
    for a in 0..j {
        for k in 0..n {
            let c = prob.b[a].matrix.commutator(&prob.y[k].matrix)?;
            brk[a][k] = coordinates(&all, &c).ok_or_else(|| Error::Other("bracket left the translations".into()))?;
        }
    }
    let mut rows: Vec<Vec<ExactScalar>> = Vec::new();
    for a in 0..j {
        for b in a + 1..j {
            // Σ_k α_bk [B_a, Y_k] − Σ_k α_ak [B_b, Y_k] = 0, one row per translation coordinate
            for comp in 0..nt {
                let mut row = vec![ExactScalar::zero(); vars];
                for k in 0..n {
                    row[b * n + k] = &row[b * n + k] + &brk[a][k][comp];
                    row[a * n + k] = &row[a * n + k] - &brk[b][k][comp];
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..vars).map(|i| ExactMatrix::unit(vars, 1, i, 0)).collect()
    } else {
        let m = ExactMatrix::from_rows(rows)?;
        nullspace(&m)
    };
    let cob = coboundary_matrices(prob)?;
    let cob_rank = span_rank(&cob);
    basis
        .iter()
        .map(|v| {
            let alpha = reshape(v, j, n);
            let mut with = cob.clone();
            with.push(alpha.clone());
            let coboundary = span_rank(&with) == cob_rank;
            Ok(CocycleSolution { alpha, coboundary, canonical: None })
        })
        .collect()
}

fn coboundary_matrices(prob: &CocycleProblem) -> Result<Vec<ExactMatrix>> {
    let (j, n) = (prob.j(), prob.n_complement());
    let mut out = Vec::new();
    for i in 0..prob.ambient.n() {
        let t = translation(&prob.ambient, i);
        let mut alpha = ExactMatrix::zeros(j, n);
        for (a, ba) in prob.b.iter().enumerate() {
            // exp(T) B exp(−T) = B + [T, B]
            let c = t.matrix.commutator(&ba.matrix)?;
            for (k, x) in prob.y_coords(&c)?.into_iter().enumerate() {
                alpha.set(a, k, x);
            }
        }
        if !alpha.is_zero() {
            out.push(alpha);
        }
    }
    Ok(out)
}

/// Trivial cocycles generated by conjugation with translations.
pub fn coboundaries(prob: &CocycleProblem) -> Result<Vec<CocycleSolution>> {
    let mats = coboundary_matrices(prob)?;
    // keep an independent subset
    let mut kept: Vec<ExactMatrix> = Vec::new();
    for m in mats {
        kept.push(m);
        if span_rank(&kept) < kept.len() {
            kept.pop();
        }
    }
    Ok(kept.into_iter().map(|alpha| CocycleSolution { alpha, coboundary: true, canonical: None }).collect())
}

/// `dim(solutions) − dim(coboundaries)`.
pub fn quotient_dimension(prob: &CocycleProblem) -> Result<usize> {
    let sols: Vec<ExactMatrix> = solve_cocycles(prob)?.into_iter().map(|s| s.alpha).collect();
    let cobs = coboundary_matrices(prob)?;
    Ok(span_rank(&sols) - span_rank(&cobs))
}

/// Rank-based inclusion test: every coboundary lies in the solution span.
pub fn coboundaries_in_solutions(prob: &CocycleProblem) -> Result<bool> {
    let sols: Vec<ExactMatrix> = solve_cocycles(prob)?.into_iter().map(|s| s.alpha).collect();
    let r = span_rank(&sols);
    let mut all = sols;
    all.extend(coboundary_matrices(prob)?);
    Ok(span_rank(&all) == r)
}

/// Is every `B̃_a` of this solution commuting with the rest?
pub fn verify_solution(prob: &CocycleProblem, sol: &CocycleSolution) -> Result<bool> {
    Ok(is_abelian(&prob.substitute(&sol.alpha)?))
}

fn cmp_canonical(x: &ExactScalar, y: &ExactScalar) -> Ordering {
    y.abs().cmp(&x.abs()).then_with(|| x.is_negative().cmp(&y.is_negative()))
}

/// Characteristic polynomial `det(tI − A)` by Faddeev–LeVerrier; coefficients
/// from the constant term up, leading 1 last.
pub fn charpoly(a: &ExactMatrix) -> Vec<ExactScalar> {
    let n = a.rows();
    let mut c = vec![ExactScalar::zero(); n + 1];
    c[n] = ExactScalar::one();
    let mut m = ExactMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.try_mul(&m).expect("square");
        for i in 0..n {
            let v = next.get(i, i) + &c[n - k + 1];
            next.set(i, i, v);
        }
        let am = a.try_mul(&next).expect("square");
        c[n - k] = -(am.trace() * ExactScalar::from_int(k as i64).recip());
        m = next;
    }
    c
}

/// Normal form of a symmetric block under `A → (1/g) G0 A G0ᵀ + δI`.
pub fn normalize_matrix(a: &ExactMatrix) -> Result<NormalForm> {
    if !a.is_square() || !a.is_symmetric() {
        return Err(Error::Invalid("A must be symmetric".into()));
    }
    let mu = a.rows();
    if mu == 0 {
        return Ok(NormalForm::Zero);
    }
    let shift = a.trace() * ExactScalar::from_int(mu as i64).recip();
    let mut shifted = a.clone();
    for i in 0..mu {
        let v = shifted.get(i, i) - &shift;
        shifted.set(i, i, v);
    }
    if shifted.is_zero() {
        return Ok(NormalForm::Zero);
    }
    if !shifted.is_diagonal() {
        let charpoly = charpoly(&shifted);
        return Ok(NormalForm::Uncanonical { matrix: shifted, charpoly });
    }
    let mut d = shifted.diagonal();
    d.sort_by(cmp_canonical);
    let g = d[0].clone();
    let mut d: Vec<ExactScalar> = d.iter().map(|x| x * &g.recip()).collect();
    d.sort_by(cmp_canonical);
    Ok(NormalForm::Diagonal(d))
}

/// Canonical representative of a solution's class. The returned tails carry
/// the canonical diagonal in the symmetric block and nothing else.
pub fn normalize(sol: &CocycleSolution, prob: &CocycleProblem) -> Result<CocycleSolution> {
    let (rows, cols) = prob
        .sym_block
        .as_ref()
        .ok_or_else(|| Error::Invalid("problem has no symmetric block to normalize".into()))?;
    let mut a = ExactMatrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (k, &c) in cols.iter().enumerate() {
            a.set(i, k, sol.alpha.get(r, c).clone());
        }
    }
    let form = normalize_matrix(&a)?;
    let mut alpha = ExactMatrix::zeros(prob.j(), prob.n_complement());
    match &form {
        NormalForm::Diagonal(d) => {
            for (i, x) in d.iter().enumerate() {
                alpha.set(rows[i], cols[i], x.clone());
            }
        }
        NormalForm::Uncanonical { matrix, .. } => {
            for (i, &r) in rows.iter().enumerate() {
                for (k, &c) in cols.iter().enumerate() {
                    alpha.set(r, c, matrix.get(i, k).clone());
                }
            }
        }
        NormalForm::Zero => {}
    }
    let coboundary = form == NormalForm::Zero;
    Ok(CocycleSolution { alpha, coboundary, canonical: Some(form) })
}
