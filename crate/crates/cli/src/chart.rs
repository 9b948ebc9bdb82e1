use clap::ValueEnum;
use masakit_core::charts::*;
use masakit_core::{Error, Result};
use serde_json::json;

use crate::format::{self, float, num};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Family {
    Polar,
    M21,
    NullSplit,
    NullNonsplit,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Emit {
    Json,
    Table,
}

pub struct ChartRequest {
    pub family: Family,
    pub k: usize,
    pub q: Vec<f64>,
    pub point: Vec<(String, f64)>,
    pub seed: u64,
    pub tolerance: f64,
    pub solution: Option<SolutionParams>,
}

pub struct SolutionParams {
    pub m: f64,
    pub energy: f64,
    pub b: Option<Vec<f64>>,
}

fn build(req: &ChartRequest) -> Result<Chart> {
    let mut c = match req.family {
        Family::Polar => polar(),
        Family::M21 => chart_m21(),
        Family::NullSplit => chart_null_split(req.k)?,
        Family::NullNonsplit => chart_null_nonsplit(&req.q)?,
    };
    c.tolerance = req.tolerance;
    Ok(c)
}

/// Named overrides on top of a seeded nonsingular sample.
fn resolve_point(c: &Chart, req: &ChartRequest) -> Result<Vec<f64>> {
    let mut u = c.sample_points(1, req.seed).remove(0);
    for (name, value) in &req.point {
        let i = c
            .variables
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Invalid(format!("unknown variable {name:?}; chart has {:?}", c.variables)))?;
        u[i] = *value;
    }
    Ok(u)
}

fn ansatz(c: &Chart, req: &ChartRequest, s: &SolutionParams) -> Result<Ansatz> {
    let l = c.dim() - 2;
    let b = s.b.clone().unwrap_or_else(|| vec![0.5; l]);
    if b.len() != l {
        return Err(Error::Invalid(format!("--b needs {l} values")));
    }
    match req.family {
        Family::NullSplit => Ok(null_block_ansatz_split(req.k, s.m, b, s.energy, (req.k as f64 - 1.0) / 2.0)),
        Family::NullNonsplit => Ok(null_block_ansatz_nonsplit(req.q.clone(), s.m, b, s.energy)),
        _ => Err(Error::OutOfScope("separated solutions are only provided for the null-rotation charts".into())),
    }
}

pub fn run(req: &ChartRequest, emit: Emit) -> Result<String> {
    let c = build(req)?;
    let u = resolve_point(&c, req)?;
    let sample = c.pullback_metric(&u)?;
    let op = c.lb_coefficients(&u)?;
    let ignorable: Vec<(String, bool)> = c.ignorable.iter().map(|&i| (c.variables[i].clone(), c.check_ignorable(i))).collect();
    let residual = match &req.solution {
        Some(s) => Some(residual_at(&c, &ansatz(&c, req, s)?, s.energy, &u)?),
        None => None,
    };
    let n = c.dim();
    Ok(match emit {
        Emit::Json => {
            let mut doc = json!({
                "chart": c.name,
                "variables": c.variables,
                "cartesian": c.cartesian,
                "point": format::vector(&u),
                "image": format::vector(c.map(&u).iter()),
                "ignorable": ignorable.iter().map(|(v, ok)| json!({"variable": v, "verified": ok})).collect::<Vec<_>>(),
                "metric": format::rows(n, n, |i, j| sample.g[(i, j)]),
                "sqrt_abs_det": num(sample.sqrt_abs_det),
                "operator": {
                    "second": format::rows(n, n, |i, j| op.second[(i, j)]),
                    "first": format::vector(op.first.iter()),
                },
                "tolerance": num(req.tolerance),
            });
            if let Some(r) = residual {
                doc["solution_residual"] = num(r);
            }
            let mut s = serde_json::to_string(&doc).expect("plain data");
            s.push('\n');
            s
        }
        Emit::Table => {
            let mut out = format!("chart {}  variables ({})\n", c.name, c.variables.join(", "));
            let point: Vec<String> = c.variables.iter().zip(&u).map(|(v, x)| format!("{v}={}", float(*x))).collect();
            out.push_str(&format!("point {}\n", point.join(" ")));
            for (v, ok) in &ignorable {
                out.push_str(&format!("ignorable {v}: {}\n", if *ok { "verified" } else { "NOT verified" }));
            }
            out.push_str("\nmetric g_ij\n");
            let headers: Vec<String> = std::iter::once(String::new()).chain(c.variables.iter().cloned()).collect();
            let grid = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<String>> {
                (0..n).map(|i| std::iter::once(c.variables[i].clone()).chain((0..n).map(|j| float(f(i, j)))).collect()).collect()
            };
            out.push_str(&format::table(&headers, &grid(&|i, j| sample.g[(i, j)])));
            out.push_str("\noperator: sum g^ij d_i d_j + sum b^j d_j\n");
            let mut body = Vec::new();
            for i in 0..n {
                for j in i..n {
                    let v = op.second[(i, j)];
                    let coeff = if i == j { v } else { 2.0 * v };
                    if coeff.abs() > req.tolerance {
                        let term = if i == j { format!("d{0} d{0}", c.variables[i]) } else { format!("d{} d{}", c.variables[i], c.variables[j]) };
                        body.push(vec![term, float(coeff)]);
                    }
                }
            }
            for j in 0..n {
                if op.first[j].abs() > req.tolerance {
                    body.push(vec![format!("d{}", c.variables[j]), float(op.first[j])]);
                }
            }
            out.push_str(&format::table(&["term".into(), "coefficient".into()], &body));
            if let Some(r) = residual {
                out.push_str(&format!("\nseparated solution residual {}\n", float(r)));
            }
            out
        }
    })
}

pub fn parse_point(t: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = t.split_once('=').ok_or_else(|| format!("expected name=value, got {t:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{t:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}
