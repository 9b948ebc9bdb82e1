//! Exact rational scalars and dense matrices with row reduction.
//!
//! Everything algebraic in the crate runs on top of this module, so there is
//! no floating point here at all.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always reduced with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        ExactScalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Self {
        ExactScalar(r)
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        ExactScalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        ExactScalar(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Always `num/den`, even for integers, so the text form is uniform.
impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(ExactScalar(BigRational::new(n, d)))
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &'a ExactScalar) -> ExactScalar {
                ExactScalar(&self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &'a ExactScalar) -> ExactScalar {
                ExactScalar(self.0 $op &rhs.0)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&ExactScalar> for ExactScalar {
    fn mul_assign(&mut self, rhs: &ExactScalar) {
        self.0 *= &rhs.0;
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-&self.0)
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<ExactScalar>>", into = "Vec<Vec<ExactScalar>>")]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl TryFrom<Vec<Vec<ExactScalar>>> for ExactMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<ExactScalar>>) -> Result<Self> {
        ExactMatrix::from_rows(rows)
    }
}

impl From<ExactMatrix> for Vec<Vec<ExactScalar>> {
    fn from(m: ExactMatrix) -> Self {
        m.to_rows()
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(short).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

fn short(x: &ExactScalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        x.to_string()
    }
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ExactMatrix { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ExactScalar::one());
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<ExactScalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(ExactMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(ExactMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Integer literal helper, mostly for tests.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let v = rows
            .iter()
            .map(|r| r.iter().map(|&x| ExactScalar::from_int(x)).collect())
            .collect();
        Self::from_rows(v).expect("ragged integer literal")
    }

    pub fn column(v: Vec<ExactScalar>) -> Self {
        let n = v.len();
        ExactMatrix { rows: n, cols: 1, data: v }
    }

    pub fn diag(d: &[ExactScalar]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn diag_ints(d: &[i64]) -> Self {
        let v: Vec<ExactScalar> = d.iter().map(|&x| x.into()).collect();
        Self::diag(&v)
    }

    /// Single entry `E_ij` of the given size.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m.set(i, j, ExactScalar::one());
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: ExactScalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn set_int(&mut self, i: usize, j: usize, x: i64) {
        self.set(i, j, ExactScalar::from_int(x));
    }

    pub fn row(&self, i: usize) -> &[ExactScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect();
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.same_shape(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        Ok(ExactMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        out.data[i * o.cols + j] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    fn same_shape(&self, o: &Self) -> Result<()> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(())
    }

    /// `self·o − o·self`.
    pub fn commutator(&self, o: &Self) -> Result<Self> {
        self.try_mul(o)?.try_sub(&o.try_mul(self)?)
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.try_mul(self).expect("square");
        }
        out
    }

    pub fn trace(&self) -> ExactScalar {
        let mut t = ExactScalar::zero();
        for i in 0..self.rows.min(self.cols) {
            t += self.get(i, i);
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<ExactScalar> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    /// Copy `b` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put(&mut self, r0: usize, c0: usize, b: &ExactMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ExactMatrix {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        m
    }

    pub fn block_diag(blocks: &[ExactMatrix]) -> ExactMatrix {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(r, c);
        let (mut i, mut j) = (0, 0);
        for b in blocks {
            m.put(i, j, b);
            i += b.rows;
            j += b.cols;
        }
        m
    }

    /// Flatten to a column vector (row-major order).
    pub fn flatten(&self) -> Vec<ExactScalar> {
        self.data.clone()
    }

    /// Matrix whose columns are the given equally sized vectors.
    pub fn from_columns(cols: &[Vec<ExactScalar>]) -> Result<Self> {
        let n = cols.first().map_or(0, |c| c.len());
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        let mut m = Self::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn col_vec(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }

    pub fn inverse(&self) -> Option<ExactMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        aug.put(0, 0, self);
        aug.put(0, n, &Self::identity(n));
        let (r, _) = rref(&aug);
        if r.block(0, 0, n, n) != Self::identity(n) {
            return None;
        }
        Some(r.block(0, n, n, n))
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_f64()).collect()).collect()
    }
}

/// Reduced row echelon form and rank.
pub fn rref(m: &ExactMatrix) -> (ExactMatrix, usize) {
    let (r, pivots) = rref_pivots(m);
    (r, pivots.len())
}

/// Reduced row echelon form together with the pivot columns.
pub fn rref_pivots(m: &ExactMatrix) -> (ExactMatrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.get(i, c).is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a.get(r, c).recip();
        for j in c..cols {
            let v = a.get(r, j) * &inv;
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i == r || a.get(i, c).is_zero() {
                continue;
            }
            let f = a.get(i, c).clone();
            for j in c..cols {
                if a.get(r, j).is_zero() {
                    continue;
                }
                let v = a.get(i, j) - &(&f * a.get(r, j));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Basis of the right kernel, one column vector per free variable.
pub fn nullspace(m: &ExactMatrix) -> Vec<ExactMatrix> {
    let (r, pivots) = rref_pivots(m);
    let cols = m.cols;
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![ExactScalar::zero(); cols];
        v[free] = ExactScalar::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -r.get(row, free);
        }
        out.push(ExactMatrix::column(v));
    }
    out
}

/// Particular solution and kernel basis of `a·x = b`, or `None` when the
/// system is inconsistent. `b` may have several columns.
pub fn solve_linear(
    a: &ExactMatrix,
    b: &ExactMatrix,
) -> Result<Option<(ExactMatrix, Vec<ExactMatrix>)>> {
    if a.rows != b.rows {
        return Err(Error::Dimension(format!(
            "system has {} rows but right-hand side has {}",
            a.rows, b.rows
        )));
    }
    let n = a.cols;
    let mut aug = ExactMatrix::zeros(a.rows, n + b.cols);
    aug.put(0, 0, a);
    aug.put(0, n, b);
    let (r, pivots) = rref_pivots(&aug);
    if pivots.iter().any(|&p| p >= n) {
        return Ok(None);
    }
    let mut x = ExactMatrix::zeros(n, b.cols);
    for (row, &pc) in pivots.iter().enumerate() {
        for j in 0..b.cols {
            x.set(pc, j, r.get(row, n + j).clone());
        }
    }
    Ok(Some((x, nullspace(a))))
}

/// Rank of a family of equally sized matrices viewed as flat vectors.
pub fn span_rank(ms: &[ExactMatrix]) -> usize {
    if ms.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<ExactScalar>> = ms.iter().map(|m| m.flatten()).collect();
    ExactMatrix::from_rows(rows).map(|m| m.rank()).unwrap_or(0)
}

/// Coordinates of `target` in the span of `basis`, if it lies there.
pub fn coordinates(basis: &[ExactMatrix], target: &ExactMatrix) -> Option<Vec<ExactScalar>> {
    if basis.is_empty() {
        return target.is_zero().then(Vec::new);
    }
    let cols: Vec<Vec<ExactScalar>> = basis.iter().map(|m| m.flatten()).collect();
    let a = ExactMatrix::from_columns(&cols).ok()?;
    let b = ExactMatrix::column(target.flatten());
    let (x, _) = solve_linear(&a, &b).ok()??;
    Some(x.col_vec(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::ratio(n, d)
    }

    #[test]
    fn scalar_is_reduced() {
        let x = q(6, -4);
        assert_eq!(x.numer(), &BigInt::from(-3));
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(ExactScalar::zero().to_string(), "0/1");
        assert_eq!("-10/4".parse::<ExactScalar>().unwrap(), q(-5, 2));
        assert_eq!("7".parse::<ExactScalar>().unwrap(), ExactScalar::from_int(7));
        assert!("1/0".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn rref_examples() {
        let (r, k) = rref(&ExactMatrix::identity(3));
        assert_eq!((r, k), (ExactMatrix::identity(3), 3));
        let (r, k) = rref(&ExactMatrix::zeros(2, 4));
        assert_eq!((r, k), (ExactMatrix::zeros(2, 4), 0));
        let (r, k) = rref(&ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]));
        assert_eq!(r, ExactMatrix::from_ints(&[&[1, 2], &[0, 0]]));
        assert_eq!(k, 1);
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace(&ExactMatrix::identity(2)).is_empty());
        assert_eq!(nullspace(&ExactMatrix::zeros(1, 3)).len(), 3);
        let ns = nullspace(&ExactMatrix::from_ints(&[&[1, 1]]));
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        assert_eq!(v.get(0, 0), &-v.get(1, 0));
        assert!(!v.is_zero());
    }

    #[test]
    fn solve_examples() {
        let v = ExactMatrix::from_ints(&[&[3], &[-1]]);
        let (x, h) = solve_linear(&ExactMatrix::identity(2), &v).unwrap().unwrap();
        assert_eq!(x, v);
        assert!(h.is_empty());

        let (x, h) = solve_linear(&ExactMatrix::from_ints(&[&[1, 1]]), &ExactMatrix::from_ints(&[&[2]]))
            .unwrap()
            .unwrap();
        assert_eq!(x, ExactMatrix::from_ints(&[&[2], &[0]]));
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].get(0, 0), &-h[0].get(1, 0));

        let none = solve_linear(&ExactMatrix::from_ints(&[&[0]]), &ExactMatrix::from_ints(&[&[1]])).unwrap();
        assert!(none.is_none());

        assert!(solve_linear(&ExactMatrix::identity(2), &ExactMatrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = ExactMatrix::from_ints(&[&[2, 1], &[7, 4]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.try_mul(&inv).unwrap(), ExactMatrix::identity(2));
        assert!(ExactMatrix::from_ints(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn serde_matrix_strings() {
        let m = ExactMatrix::from_rows(vec![vec![q(1, 2), q(-3, 1)]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"[["1/2","-3/1"]]"#);
        let back: ExactMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
