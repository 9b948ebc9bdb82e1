//! Coordinate charts with ignorable variables, obtained by letting the group
//! of a MASA act on a slice: `(x; 1) = exp(Σ α_i X_i) (s; 1)`. Everything
//! here is floating point.
//!
//! Cartesian coordinates are ordered `(x_1, .., x_p, x_0)` with the flat
//! metric `diag(+, .., +, -)` (no trailing `-` when q = 0).

use nalgebra::{DMatrix, DVector};
use num_dual::{hessian, jacobian, Dual2DVec64, DualDVec64, DualNum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactla::{ExactMatrix, ExactScalar};
use crate::liecore::{is_nilpotent_matrix, LieElement, Subalgebra};

pub const DEFAULT_TOLERANCE: f64 = 1e-7;
const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Radial samples keep this distance from 0 and from every pole `q_i`.
const POLE_MARGIN: f64 = 0.05;
const SINGULAR_RADIUS: f64 = 1e-3;

pub fn to_dmatrix(m: &ExactMatrix) -> DMatrix<f64> {
    let rows = m.to_f64();
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| rows[i][j])
}

fn matrix_exp(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    // terminating series when nilpotent; structural zeros stay exact
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=n {
        term = &term * m / k as f64;
        if term.iter().all(|x| *x == 0.0) {
            return sum;
        }
        sum += &term;
    }
    if (&term * m).iter().all(|x| *x == 0.0) {
        return sum;
    }
    m.clone().exp()
}

/// `exp(t x)`: polynomial for nilpotent x, closed trig/hyperbolic form when
/// `x^3 = c x`, Padé scaling-and-squaring otherwise.
pub fn exp_element(x: &LieElement, t: f64) -> DMatrix<f64> {
    let m = &x.matrix;
    let mf = to_dmatrix(m);
    let n = mf.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    if is_nilpotent_matrix(m) {
        return matrix_exp(&(&mf * t));
    }
    let m2 = m.try_mul(m).expect("square");
    let m3 = m2.try_mul(m).expect("square");
    if let Some(c) = cubic_ratio(m, &m3) {
        let w = c.to_f64().abs().sqrt();
        let m2f = to_dmatrix(&m2);
        let (s, k) = if c.is_negative() {
            ((w * t).sin() / w, (1.0 - (w * t).cos()) / (w * w))
        } else {
            ((w * t).sinh() / w, ((w * t).cosh() - 1.0) / (w * w))
        };
        return id + mf * s + m2f * k;
    }
    (mf * t).exp()
}

/// `c` with `m3 = c m`, if any (c != 0).
fn cubic_ratio(m: &ExactMatrix, m3: &ExactMatrix) -> Option<ExactScalar> {
    let (i, j) = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !m.get(i, j).is_zero())?;
    let c = m3.get(i, j) * &m.get(i, j).recip();
    (!c.is_zero() && *m3 == m.scale(&c)).then_some(c)
}

/// 30-term Taylor series, for cross-checks.
pub fn exp_series(m: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    let n = m.nrows();
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..terms {
        term = &term * m / k as f64;
        sum += &term;
    }
    sum
}

#[derive(Clone, Debug)]
pub struct MetricSample {
    pub point: Vec<f64>,
    pub g: DMatrix<f64>,
    pub g_inverse: DMatrix<f64>,
    pub sqrt_abs_det: f64,
}

/// `Δ = Σ g^{ij} ∂_i ∂_j + Σ b^j ∂_j`.
#[derive(Clone, Debug)]
pub struct OperatorCoefficients {
    pub point: Vec<f64>,
    pub second: DMatrix<f64>,
    pub first: DVector<f64>,
}

#[derive(Clone, Debug)]
enum ChartMap {
    /// `x = T · [exp(Σ α_i M_i) (base + Σ s_j v_j; 1)]`
    Group { generators: Vec<DMatrix<f64>>, base: DVector<f64>, directions: Vec<DVector<f64>>, to_cartesian: DMatrix<f64> },
    /// `x(y)` of the conformal inversion, y = (y_0, .., y_k)
    Inversion { k: usize },
}

#[derive(Clone, Debug)]
pub struct Chart {
    pub name: String,
    pub variables: Vec<String>,
    /// Indices into `variables` of the group parameters.
    pub ignorable: Vec<usize>,
    pub cartesian: Vec<String>,
    pub eta: Vec<f64>,
    pub tolerance: f64,
    map: ChartMap,
    radial: Option<usize>,
    poles: Vec<f64>,
}

fn cartesian_labels(p: usize, q: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=p).map(|i| format!("x{i}")).collect();
    if q == 1 {
        v.push("x0".into());
    }
    v
}

fn flat_eta(p: usize, q: usize) -> Vec<f64> {
    let mut v = vec![1.0; p];
    v.extend(std::iter::repeat(-1.0).take(q));
    v
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

fn e(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

impl Chart {
    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    fn n_group(&self) -> usize {
        match &self.map {
            ChartMap::Group { generators, .. } => generators.len(),
            ChartMap::Inversion { .. } => 0,
        }
    }

    pub fn map(&self, u: &[f64]) -> DVector<f64> {
        match &self.map {
            ChartMap::Group { generators, base, directions, to_cartesian } => {
                let homog = self.homogeneous(u, generators, base, directions);
                to_cartesian * homog.rows(0, base.len()).into_owned()
            }
            ChartMap::Inversion { k } => {
                let y: Vec<f64> = u.to_vec();
                DVector::from_vec(inversion_x_of_y(&y, *k))
            }
        }
    }

    fn homogeneous(
        &self,
        u: &[f64],
        generators: &[DMatrix<f64>],
        base: &DVector<f64>,
        directions: &[DVector<f64>],
    ) -> DVector<f64> {
        let n = base.len();
        let l = generators.len();
        let mut x = DMatrix::<f64>::zeros(n + 1, n + 1);
        for (a, g) in u[..l].iter().zip(generators) {
            x += g * *a;
        }
        let mut s = base.clone();
        for (sj, v) in u[l..].iter().zip(directions) {
            s += v * *sj;
        }
        let mut h = DVector::zeros(n + 1);
        h.rows_mut(0, n).copy_from(&s);
        h[n] = 1.0;
        matrix_exp(&x) * h
    }

    /// Columns are `∂x/∂u_i`.
    pub fn jacobian(&self, u: &[f64]) -> DMatrix<f64> {
        match &self.map {
            ChartMap::Group { generators, base, directions, to_cartesian } => {
                let n = base.len();
                let l = generators.len();
                let mut x = DMatrix::<f64>::zeros(n + 1, n + 1);
                for (a, g) in u[..l].iter().zip(generators) {
                    x += g * *a;
                }
                let ex = matrix_exp(&x);
                let h = self.homogeneous(u, generators, base, directions);
                let mut jac = DMatrix::zeros(n, self.dim());
                // commuting generators: ∂/∂α_i = M_i acting on the point
                for (i, g) in generators.iter().enumerate() {
                    let col = g * &h;
                    jac.set_column(i, &(to_cartesian * col.rows(0, n)));
                }
                for (j, v) in directions.iter().enumerate() {
                    let mut hv = DVector::zeros(n + 1);
                    hv.rows_mut(0, n).copy_from(v);
                    let col = &ex * hv;
                    jac.set_column(l + j, &(to_cartesian * col.rows(0, n)));
                }
                jac
            }
            ChartMap::Inversion { k } => {
                let k = *k;
                let y = DVector::from_column_slice(u);
                let (_, j) = jacobian(
                    |y: DVector<DualDVec64>| {
                        let v: Vec<DualDVec64> = y.iter().cloned().collect();
                        DVector::from_vec(inversion_x_of_y(&v, k))
                    },
                    &y,
                );
                j
            }
        }
    }

    pub fn metric(&self, u: &[f64]) -> DMatrix<f64> {
        let j = self.jacobian(u);
        let eta = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eta));
        let g = j.transpose() * eta * &j;
        (&g + g.transpose()) * 0.5
    }

    fn singular_reason(&self, u: &[f64]) -> Option<String> {
        let r = u[self.radial?];
        if r.abs() < SINGULAR_RADIUS {
            return Some(format!("{} = {r} is at the pole r = 0", self.variables[self.radial?]));
        }
        self.poles
            .iter()
            .find(|q| (r - **q).abs() < SINGULAR_RADIUS)
            .map(|q| format!("{} = {r} is at the pole r = {q}", self.variables[self.radial.unwrap()]))
    }

    pub fn pullback_metric(&self, u: &[f64]) -> Result<MetricSample> {
        if u.len() != self.dim() {
            return Err(Error::Dimension(format!("chart has {} variables", self.dim())));
        }
        if let Some(msg) = self.singular_reason(u) {
            return Err(Error::SingularPoint(msg));
        }
        let g = self.metric(u);
        let det = g.determinant();
        let scale = g.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0).powi(g.nrows() as i32);
        let inv = g.clone().try_inverse();
        match inv {
            Some(gi) if det.abs() > 1e-12 * scale => {
                Ok(MetricSample { point: u.to_vec(), g, g_inverse: gi, sqrt_abs_det: det.abs().sqrt() })
            }
            _ => Err(Error::SingularPoint(format!("degenerate metric at {u:?}"))),
        }
    }

    fn step(&self, x: f64) -> f64 {
        1e-4 * x.abs().max(1.0)
    }

    /// Fourth-order central difference of a matrix-valued function.
    fn derivative<F: Fn(&[f64]) -> DMatrix<f64>>(&self, u: &[f64], var: usize, f: F) -> DMatrix<f64> {
        let h = self.step(u[var]);
        let at = |d: f64| {
            let mut v = u.to_vec();
            v[var] += d;
            f(&v)
        };
        (at(-2.0 * h) - at(-h) * 8.0 + at(h) * 8.0 - at(2.0 * h)) / (12.0 * h)
    }

    pub fn metric_derivative(&self, u: &[f64], var: usize) -> DMatrix<f64> {
        self.derivative(u, var, |v| self.metric(v))
    }

    /// Deterministic sample of nonsingular points.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let mut u: Vec<f64> = (0..self.dim()).map(|_| rng.gen_range(-1.5..1.5)).collect();
            if let Some(r) = self.radial {
                u[r] = rng.gen_range(0.2..2.0);
                if self.poles.iter().any(|q| (u[r] - q).abs() < POLE_MARGIN) {
                    continue;
                }
            }
            if self.pullback_metric(&u).is_ok() {
                out.push(u);
            }
        }
        out
    }

    /// `max ‖∂g/∂var‖` over 20 sampled points is below tolerance.
    pub fn check_ignorable(&self, var: usize) -> bool {
        self.sample_points(20, 7).iter().all(|u| {
            let scale = self.metric(u).iter().fold(1.0f64, |m, x| m.max(x.abs()));
            self.metric_derivative(u, var).amax() < self.tolerance * scale
        })
    }

    pub fn lb_coefficients(&self, u: &[f64]) -> Result<OperatorCoefficients> {
        let sample = self.pullback_metric(u)?;
        let n = self.dim();
        let weighted = |v: &[f64]| {
            let g = self.metric(v);
            let s = g.determinant().abs().sqrt();
            g.try_inverse().unwrap_or_else(|| DMatrix::zeros(n, n)) * s
        };
        let mut first = DVector::zeros(n);
        for i in 0..n {
            let d = self.derivative(u, i, &weighted);
            for j in 0..n {
                first[j] += d[(i, j)];
            }
        }
        first /= sample.sqrt_abs_det;
        Ok(OperatorCoefficients { point: u.to_vec(), second: sample.g_inverse, first })
    }

    /// Largest deviation between `∂x/∂α_i` and the flow field of `X_i`,
    /// computed independently by differencing the map.
    pub fn straightening_residual(&self, u: &[f64]) -> f64 {
        let l = self.n_group();
        let mut worst = 0.0f64;
        for i in 0..l {
            let h = 1e-5;
            let mut a = u.to_vec();
            let mut b = u.to_vec();
            a[i] += h;
            b[i] -= h;
            let fd = (self.map(&a) - self.map(&b)) / (2.0 * h);
            let jc = self.jacobian(u).column(i).into_owned();
            worst = worst.max((fd - jc).amax());
        }
        worst
    }
}

/// Chart from a subalgebra of e(p,q) and a slice in Cartesian coordinates.
#[derive(Clone, Debug)]
pub struct Slice {
    pub names: Vec<String>,
    pub base: Vec<f64>,
    pub directions: Vec<Vec<f64>>,
}

pub fn build_chart(masa: &Subalgebra, slice: &Slice) -> Result<Chart> {
    let canon = masa.to_canonical()?;
    let sig = canon.ambient.signature();
    let n = sig.p + sig.q;
    if canon.dim() + slice.directions.len() != n || slice.base.len() != n {
        return Err(Error::Dimension(format!(
            "{} group parameters and {} slice directions do not fill dimension {n}",
            canon.dim(),
            slice.directions.len()
        )));
    }
    let generators: Vec<DMatrix<f64>> = canon.matrices().iter().map(to_dmatrix).collect();
    let l = generators.len();
    let mut variables: Vec<String> = (1..=l).map(|i| format!("a{i}")).collect();
    variables.extend(slice.names.iter().cloned());
    let chart = Chart {
        name: "group".into(),
        variables,
        ignorable: (0..l).collect(),
        cartesian: cartesian_labels(sig.p, sig.q),
        eta: flat_eta(sig.p, sig.q),
        tolerance: DEFAULT_TOLERANCE,
        map: ChartMap::Group {
            generators,
            base: DVector::from_vec(slice.base.clone()),
            directions: slice.directions.iter().map(|d| DVector::from_vec(d.clone())).collect(),
            to_cartesian: DMatrix::identity(n, n),
        },
        radial: None,
        poles: Vec::new(),
    };
    let pts = chart.sample_points_raw(3, 11);
    if pts.iter().all(|u| chart.jacobian(u).rank(1e-9) < n) {
        return Err(Error::Invalid("MASA not pointwise independent on this slice".into()));
    }
    Ok(chart)
}

impl Chart {
    fn sample_points_raw(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| (0..self.dim()).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect()
    }
}

/// Slice through a random point spanned by coordinate axes completing the
/// orbit directions there.
pub fn generic_slice(masa: &Subalgebra, seed: u64) -> Result<Slice> {
    let canon = masa.to_canonical()?;
    let sig = canon.ambient.signature();
    let n = sig.p + sig.q;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut h = DVector::from_element(n + 1, 1.0);
    h.rows_mut(0, n).copy_from(&DVector::from_vec(base.clone()));
    let mut cols: Vec<DVector<f64>> =
        canon.matrices().iter().map(|m| (to_dmatrix(m) * &h).rows(0, n).into_owned()).collect();
    if DMatrix::from_columns(&cols).rank(1e-9) < cols.len() {
        return Err(Error::Invalid("MASA not pointwise independent on this slice".into()));
    }
    let labels = cartesian_labels(sig.p, sig.q);
    let mut names = Vec::new();
    let mut directions = Vec::new();
    for i in 0..n {
        if cols.len() == n {
            break;
        }
        cols.push(unit(n, i));
        if DMatrix::from_columns(&cols).rank(1e-9) == cols.len() {
            names.push(format!("s_{}", labels[i]));
            directions.push(unit(n, i).iter().cloned().collect());
        } else {
            cols.pop();
        }
    }
    Ok(Slice { names, base, directions })
}

// ------------------------------------------------------------ named charts

pub fn cartesian(p: usize, q: usize) -> Chart {
    let n = p + q;
    let generators = (0..n).map(|i| e(n + 1, i, n)).collect();
    Chart {
        name: "cartesian".into(),
        variables: cartesian_labels(p, q),
        ignorable: (0..n).collect(),
        cartesian: cartesian_labels(p, q),
        eta: flat_eta(p, q),
        tolerance: DEFAULT_TOLERANCE,
        map: ChartMap::Group { generators, base: DVector::zeros(n), directions: Vec::new(), to_cartesian: DMatrix::identity(n, n) },
        radial: None,
        poles: Vec::new(),
    }
}

/// `x_1 = s cos a`, `x_2 = s sin a`.
pub fn polar() -> Chart {
    Chart {
        name: "polar".into(),
        variables: vec!["a1".into(), "s1".into()],
        ignorable: vec![0],
        cartesian: cartesian_labels(2, 0),
        eta: flat_eta(2, 0),
        tolerance: DEFAULT_TOLERANCE,
        map: ChartMap::Group {
            generators: vec![e(3, 1, 0) - e(3, 0, 1)],
            base: DVector::zeros(2),
            directions: vec![unit(2, 0)],
            to_cartesian: DMatrix::identity(2, 2),
        },
        radial: Some(1),
        poles: Vec::new(),
    }
}

/// Lightcone frame `(y_a, y_1..y_{k-1}, y_b)` with `x_k - x_0 = √2 y_a`,
/// `x_k + x_0 = √2 y_b`, `x_i = y_i`. Sign `flip` reverses `x_k - x_0`.
fn lightcone_to_cartesian(k: usize, flip: f64) -> DMatrix<f64> {
    let n = k + 1;
    let mut t = DMatrix::zeros(n, n);
    for i in 1..k {
        t[(i - 1, i)] = 1.0;
    }
    // x_k row, x_0 row
    t[(k - 1, 0)] = flip / SQRT2;
    t[(k - 1, k)] = 1.0 / SQRT2;
    t[(k, 0)] = -flip / SQRT2;
    t[(k, k)] = 1.0 / SQRT2;
    t
}

/// The M(2,1) chart with ignorable `z`, `a` on the slice `(0, 0, r)`.
pub fn chart_m21() -> Chart {
    // y = (y_a, y_1, y_b); x0 + x1 = √2 y_b, x0 - x1 = -√2 y_a, x2 = y_1
    let n = 3;
    let z = e(n + 1, 0, 3) * SQRT2;
    let a = (e(n + 1, 0, 1) - e(n + 1, 1, 2) + e(n + 1, 2, 3)) * SQRT2;
    let mut t = DMatrix::zeros(n, n);
    t[(0, 0)] = 1.0 / SQRT2;
    t[(0, 2)] = 1.0 / SQRT2;
    t[(1, 1)] = 1.0;
    t[(2, 0)] = -1.0 / SQRT2;
    t[(2, 2)] = 1.0 / SQRT2;
    Chart {
        name: "m21".into(),
        variables: vec!["z".into(), "a".into(), "r".into()],
        ignorable: vec![0, 1],
        cartesian: cartesian_labels(2, 1),
        eta: flat_eta(2, 1),
        tolerance: DEFAULT_TOLERANCE,
        map: ChartMap::Group { generators: vec![z, a], base: DVector::zeros(n), directions: vec![unit(n, 2)], to_cartesian: t },
        radial: Some(2),
        poles: Vec::new(),
    }
}

fn null_block_chart(name: &str, q: &[f64]) -> Chart {
    let k = q.len() + 1;
    let n = k + 1;
    let (a, b, h) = (0, k, n);
    let mut generators = vec![e(n + 1, a, h)];
    for (i, qi) in (1..k).zip(q) {
        generators.push(e(n + 1, a, i) - e(n + 1, i, b) + e(n + 1, i, h) * *qi);
    }
    let mut variables = vec!["z".to_string()];
    variables.extend((1..k).map(|i| format!("a{i}")));
    variables.push("r".into());
    Chart {
        name: name.into(),
        variables,
        ignorable: (0..k).collect(),
        cartesian: cartesian_labels(k, 1),
        eta: flat_eta(k, 1),
        tolerance: DEFAULT_TOLERANCE,
        map: ChartMap::Group {
            generators,
            base: DVector::zeros(n),
            directions: vec![unit(n, b)],
            to_cartesian: lightcone_to_cartesian(k, 1.0),
        },
        radial: Some(k),
        poles: q.iter().cloned().filter(|x| *x != 0.0).collect(),
    }
}

/// Splitting null-rotation MASA of M(k,1): `x_k + x_0 = r√2`,
/// `x_k - x_0 = -r α·α/√2 + z√2`, `x_i = -r α_i`.
pub fn chart_null_split(k: usize) -> Result<Chart> {
    if k < 2 {
        return Err(Error::Invalid("needs k >= 2".into()));
    }
    Ok(null_block_chart("null-split", &vec![0.0; k - 1]))
}

/// Nonsplitting version: `x_i = (q_i - r) α_i`,
/// `x_k - x_0 = (2z - r α·α + α Q α)/√2`.
pub fn chart_null_nonsplit(q: &[f64]) -> Result<Chart> {
    if q.is_empty() {
        return Err(Error::Invalid("needs at least one q".into()));
    }
    Ok(null_block_chart("null-nonsplit", q))
}

/// Closed-form operator of the null-rotation charts in variables `(z, α, r)`:
/// `2 ∂z∂r - Σ 1/(q_i - r) ∂z + Σ 1/(q_i - r)^2 ∂α_i^2`.
pub fn reference_null_block_operator(q: &[f64], r: f64) -> (DMatrix<f64>, DVector<f64>) {
    let k = q.len() + 1;
    let n = k + 1;
    let mut second = DMatrix::zeros(n, n);
    second[(0, k)] = 1.0;
    second[(k, 0)] = 1.0;
    for (i, qi) in q.iter().enumerate() {
        second[(i + 1, i + 1)] = 1.0 / ((qi - r) * (qi - r));
    }
    let mut first = DVector::zeros(n);
    first[0] = -q.iter().map(|qi| 1.0 / (qi - r)).sum::<f64>();
    (second, first)
}

/// Largest relative deviation between two operators, scaled per entry by
/// `max(1, |expected|)`.
pub fn operator_deviation(c: &OperatorCoefficients, second: &DMatrix<f64>, first: &DVector<f64>) -> f64 {
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let s = c.second.iter().zip(second.iter()).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    let f = c.first.iter().zip(first.iter()).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
    s.max(f)
}

// ----------------------------------------------------- separated solutions

type PsiFn = dyn Fn(&[Dual2DVec64]) -> Dual2DVec64 + Send + Sync;

/// Trial function with exact derivatives (second-order dual numbers).
pub struct Ansatz {
    pub name: String,
    psi: Box<PsiFn>,
    defined: Box<dyn Fn(&[f64]) -> bool + Send + Sync>,
}

impl Ansatz {
    pub fn new(
        name: &str,
        psi: impl Fn(&[Dual2DVec64]) -> Dual2DVec64 + Send + Sync + 'static,
        defined: impl Fn(&[f64]) -> bool + Send + Sync + 'static,
    ) -> Self {
        Ansatz { name: name.into(), psi: Box::new(psi), defined: Box::new(defined) }
    }

    pub fn is_defined(&self, u: &[f64]) -> bool {
        (self.defined)(u)
    }

    /// `(Ψ, ∇Ψ, ∇²Ψ)` at `u`.
    pub fn jet(&self, u: &[f64]) -> (f64, DVector<f64>, DMatrix<f64>) {
        let x = DVector::from_column_slice(u);
        hessian(|v: DVector<Dual2DVec64>| (self.psi)(v.as_slice()), &x)
    }
}

/// `e^{Σ k_i x_i}`, eigenvalue `Σ η_ii k_i^2`.
pub fn plane_wave(k: Vec<f64>) -> Ansatz {
    Ansatz::new(
        "plane wave",
        move |x| x.iter().zip(&k).map(|(xi, ki)| xi.clone() * *ki).sum::<Dual2DVec64>().exp(),
        |_| true,
    )
}

/// `R(r) e^{mz} Π e^{b_i α_i}` with the split radial factor
/// `r^{-e} exp(Σ b^2 / (2 m r)) exp(E r / 2m)`; reference `e = k/2`.
pub fn null_block_ansatz_split(k: usize, m: f64, b: Vec<f64>, energy: f64, exponent: f64) -> Ansatz {
    let bb: f64 = b.iter().map(|x| x * x).sum();
    Ansatz::new(
        "null-split separated",
        move |u| {
            let r = u[k].clone();
            let radial = r.powf(-exponent) * (r.recip() * (bb / (2.0 * m))).exp() * (r * (energy / (2.0 * m))).exp();
            let phase = u[0].clone() * m + b.iter().enumerate().map(|(i, bi)| u[i + 1].clone() * *bi).sum::<Dual2DVec64>();
            radial * phase.exp()
        },
        move |u| u[k] > 0.0,
    )
}

/// `R(r) = Π (q_i - r)^{-1/2} exp(-(1/2m) Σ b_i^2/(q_i - r)) exp(E r/2m)`.
pub fn null_block_ansatz_nonsplit(q: Vec<f64>, m: f64, b: Vec<f64>, energy: f64) -> Ansatz {
    let k = q.len() + 1;
    let qd = q.clone();
    Ansatz::new(
        "null-nonsplit separated",
        move |u| {
            let r = u[k].clone();
            let mut radial = (r.clone() * (energy / (2.0 * m))).exp();
            for (qi, bi) in q.iter().zip(&b) {
                let d = -r.clone() + *qi;
                radial = radial * d.powf(-0.5) * (d.recip() * (-bi * bi / (2.0 * m))).exp();
            }
            let phase = u[0].clone() * m + b.iter().enumerate().map(|(i, bi)| u[i + 1].clone() * *bi).sum::<Dual2DVec64>();
            radial * phase.exp()
        },
        move |u| qd.iter().all(|qi| qi - u[k] > 0.0),
    )
}

/// `max |ΔΨ - EΨ| / |Ψ|` over sampled points.
pub fn verify_separated_solution(c: &Chart, ansatz: &Ansatz, energy: f64, points: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut done = 0;
    let mut misses = 0;
    while done < points {
        let u = c.sample_points(1, rng.gen()).remove(0);
        if !(ansatz.defined)(&u) {
            misses += 1;
            if misses >= 10 {
                return Err(Error::SingularPoint(format!("{} undefined at {u:?}", ansatz.name)));
            }
            continue;
        }
        misses = 0;
        worst = worst.max(residual_at(c, ansatz, energy, &u)?);
        done += 1;
    }
    Ok(worst)
}

/// `|ΔΨ - EΨ| / |Ψ|` at a single point.
pub fn residual_at(c: &Chart, ansatz: &Ansatz, energy: f64, u: &[f64]) -> Result<f64> {
    if !ansatz.is_defined(u) {
        return Err(Error::SingularPoint(format!("{} undefined at {u:?}", ansatz.name)));
    }
    let coeffs = c.lb_coefficients(u)?;
    let (v, grad, hess) = ansatz.jet(u);
    let lap = coeffs.second.component_mul(&hess).sum() + coeffs.first.dot(&grad);
    Ok((lap - energy * v).abs() / v.abs())
}

// ------------------------------------------------------ conformal inversion

/// `x_k + x_0 = -√2 / w`, `x_k - x_0 = -(y_0^2 - Σ y_i^2) / (√2 w)`,
/// `x_j = y_j / w`, with `w = y_0 + y_k`; returns `(x_1..x_k, x_0)`.
pub fn inversion_x_of_y<D: DualNum<f64>>(y: &[D], k: usize) -> Vec<D> {
    let w = y[0].clone() + y[k].clone();
    let quad = y[1..=k].iter().fold(y[0].clone() * y[0].clone(), |acc, yi| acc - yi.clone() * yi.clone());
    let plus = -(w.recip() * SQRT2);
    let minus = -(quad / (w.clone() * SQRT2));
    let mut x: Vec<D> = (1..k).map(|j| y[j].clone() / w.clone()).collect();
    x.push((plus.clone() + minus.clone()) * 0.5);
    x.push((plus - minus) * 0.5);
    x
}

pub fn inversion_y_of_x(x: &[f64], k: usize) -> Vec<f64> {
    let (xk, x0) = (x[k - 1], x[k]);
    let w = -SQRT2 / (xk + x0);
    let sq: f64 = x[..k - 1].iter().map(|v| v * v).sum();
    let diff = -SQRT2 * (xk - x0) + w * sq;
    let mut y = vec![(w + diff) / 2.0];
    y.extend(x[..k - 1].iter().map(|v| v * w));
    y.push((w - diff) / 2.0);
    y
}

/// Change of variables to Cartesian `y` tied to a split null-rotation chart.
pub struct ConformalLink {
    pub k: usize,
}

pub fn conformal_cartesian_link(c: &Chart) -> Result<ConformalLink> {
    if c.name != "null-split" {
        return Err(Error::Invalid("the link is defined for the split null-rotation chart only".into()));
    }
    Ok(ConformalLink { k: c.dim() - 1 })
}

impl ConformalLink {
    /// The y coordinates as a chart of M(k,1).
    pub fn y_chart(&self) -> Chart {
        let k = self.k;
        let mut variables = vec!["y0".to_string()];
        variables.extend((1..=k).map(|i| format!("y{i}")));
        Chart {
            name: "inversion".into(),
            variables,
            ignorable: Vec::new(),
            cartesian: cartesian_labels(k, 1),
            eta: flat_eta(k, 1),
            tolerance: DEFAULT_TOLERANCE,
            map: ChartMap::Inversion { k },
            radial: None,
            poles: Vec::new(),
        }
    }

    pub fn round_trip_error(&self, y: &[f64]) -> f64 {
        let x = inversion_x_of_y(y, self.k);
        let back = inversion_y_of_x(&x, self.k);
        back.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Relative deviation at `y` (with `y_0 + y_k > 0`) between `□_x Φ` and
    /// `sign · w^{(k-1)/2} w^2 [∂_{y0}^2 - Σ ∂_{yi}^2] (w^{-(k-1)/2} Φ)`;
    /// `sign = 1` is the reference form.
    pub fn similarity_deviation<F>(&self, phi: F, y: &[f64], sign: f64) -> f64
    where
        F: Fn(&[Dual2DVec64]) -> Dual2DVec64,
    {
        let k = self.k;
        let x = DVector::from_vec(inversion_x_of_y(y, k));
        let (_, _, hx) = hessian(|v: DVector<Dual2DVec64>| phi(v.as_slice()), &x);
        let lhs: f64 = (0..k).map(|i| hx[(i, i)]).sum::<f64>() - hx[(k, k)];
        let half = (k as f64 - 1.0) / 2.0;
        let yv = DVector::from_column_slice(y);
        let (_, _, hy) = hessian(
            |v: DVector<Dual2DVec64>| {
                let w = v[0].clone() + v[k].clone();
                let xs = inversion_x_of_y(v.as_slice(), k);
                w.powf(-half) * phi(&xs)
            },
            &yv,
        );
        let w = y[0] + y[k];
        let box_y = hy[(0, 0)] - (1..=k).map(|i| hy[(i, i)]).sum::<f64>();
        let rhs = sign * w.powf(half) * w * w * box_y;
        (lhs - rhs).abs() / lhs.abs().max(1e-300)
    }
}
