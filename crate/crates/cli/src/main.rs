mod chart;
mod format;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use masakit_core::catalog::{enumerate_ep1, enumerate_euclidean};
use masakit_core::liecore::{is_abelian, is_masa};
use masakit_core::{AlgebraDocument, Error};

const EXIT_FAIL: u8 = 1;
const EXIT_OUT_OF_SCOPE: u8 = 2;
const EXIT_SINGULAR: u8 = 3;

#[derive(Parser)]
#[command(name = "masakit", version, about = "Maximal abelian subalgebras of e(p,0), e(p,1) and their conformal extensions")]
struct Cli {
    /// Numerical tolerance for float checks.
    #[arg(long, global = true, env = "MASAKIT_TOLERANCE", default_value_t = 1e-7)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream the MASA catalog of e(p,q) as JSON lines.
    Enumerate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        q: usize,
    },
    /// Run a verification suite; exits 1 if any claim fails.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 5)]
        max_p: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = chart::Emit::Table)]
        emit: chart::Emit,
    },
    /// Chart metric, ignorable variables and Laplace-Beltrami coefficients.
    Chart {
        #[arg(long, value_enum)]
        family: chart::Family,
        /// Block size of the null-split chart.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Block parameters of the null-nonsplit chart.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1,-1")]
        q: Vec<f64>,
        /// Fixed coordinates, e.g. `r=0.5,z=1`; the rest are sampled.
        #[arg(long, value_parser = chart::parse_point, value_delimiter = ',', allow_negative_numbers = true)]
        point: Vec<(String, f64)>,
        #[arg(long, value_enum, default_value_t = chart::Emit::Table)]
        emit: chart::Emit,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also report the residual of the separated solution at the point.
        #[arg(long)]
        solution: bool,
        #[arg(long, default_value_t = 0.7)]
        m: f64,
        #[arg(long, default_value_t = 1.3)]
        energy: f64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        b: Option<Vec<f64>>,
    },
}

fn exit_for(e: &Error) -> ExitCode {
    eprintln!("masakit: {e}");
    ExitCode::from(match e {
        Error::OutOfScope(_) => EXIT_OUT_OF_SCOPE,
        Error::SingularPoint(_) | Error::Singular => EXIT_SINGULAR,
        _ => EXIT_FAIL,
    })
}

fn enumerate(p: usize, q: usize) -> Result<ExitCode, Error> {
    let ds = match q {
        0 => enumerate_euclidean(p),
        1 => enumerate_ep1(p),
        _ => return Err(Error::OutOfScope(format!("e({p},{q}) with q >= 2 is not covered"))),
    };
    if p == 0 {
        return Err(Error::Invalid("p must be at least 1".into()));
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for d in ds {
        let s = d.materialize()?;
        if !(is_abelian(&s) && is_masa(&s, &s.ambient.full())?) {
            eprintln!("masakit: {} failed the MASA check", d.label());
            return Ok(ExitCode::from(EXIT_FAIL));
        }
        let doc = AlgebraDocument::from_subalgebra(&s, &d.label());
        writeln!(out, "{}", doc.to_json()).map_err(|e| Error::Other(e.to_string()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn report(claims: &[verify::Claim], emit: chart::Emit) -> String {
    match emit {
        chart::Emit::Json => claims
            .iter()
            .map(|c| serde_json::json!({"suite": c.suite, "claim": c.name, "pass": c.ok, "detail": c.detail}).to_string() + "\n")
            .collect(),
        chart::Emit::Table => {
            let mut s = String::new();
            for c in claims {
                let tag = if c.ok { "PASS" } else { "FAIL" };
                if c.detail.is_empty() {
                    s.push_str(&format!("{tag}  [{}] {}\n", c.suite, c.name));
                } else {
                    s.push_str(&format!("{tag}  [{}] {} ({})\n", c.suite, c.name, c.detail));
                }
            }
            let failed = claims.iter().filter(|c| !c.ok).count();
            s.push_str(&format!("{} claims, {} failed\n", claims.len(), failed));
            s
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Enumerate { p, q } => enumerate(p, q),
        Command::Verify { suite, max_p, seed, emit } => {
            let claims = verify::run(suite, &verify::Settings { max_p, seed, tolerance: cli.tolerance });
            print!("{}", report(&claims, emit));
            Ok(if claims.iter().all(|c| c.ok) { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) })
        }
        Command::Chart { family, k, q, point, emit, seed, solution, m, energy, b } => {
            let req = chart::ChartRequest {
                family,
                k,
                q,
                point,
                seed,
                tolerance: cli.tolerance,
                solution: solution.then_some(chart::SolutionParams { m, energy, b }),
            };
            chart::run(&req, emit).map(|s| {
                print!("{s}");
                ExitCode::SUCCESS
            })
        }
    };
    result.unwrap_or_else(|e| exit_for(&e))
}
