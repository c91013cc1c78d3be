//! Dispatch of a validated [`RunConfig`] and artifact writing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mixlap_core::barrier::{build_barrier, BarrierParams};
use mixlap_core::fields::{Constant, PiecewiseLinear, Polynomial};
use mixlap_core::solve::{load_norms, SOLVER_TOLERANCE};
use mixlap_core::verify::{
    check_weak_mp, counterexample_boundary_only, counterexample_ces, counterexample_general,
    digest, run_suite, SuiteConfig, VerificationReport,
};
use mixlap_core::{
    build_mesh, mixed_apply, solve_dirichlet, OperatorParams, ScalarField, StiffnessSystem,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::config::{Command, Example, LoadSpec, RunConfig};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] mixlap_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("load samples {path}: {message}")]
    Samples { path: PathBuf, message: String },
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// Whether every check passed.
    pub passed: bool,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Relative mismatch allowed in the energy identity `B(u,u) = F·u`.
const ENERGY_IDENTITY_TOLERANCE: f64 = 1e-8;

pub fn run(config: &RunConfig) -> Result<RunOutcome, RunError> {
    let (header, checks, document, csv) = match config.command {
        Command::Solve => solve(config)?,
        Command::Barrier => barrier(config)?,
        Command::Verify => verify(config)?,
        Command::Counterexample => counterexample(config)?,
    };
    let summary = summary_text(config, &header, &checks);
    let report = json!({ "config": config, "result": document, "checks": checks });

    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut files = Vec::new();
    if let Some((name, text)) = csv {
        files.push(write(dir, name, &text)?);
    }
    let json = serde_json::to_string_pretty(&report).expect("reports serialize to JSON");
    files.push(write(dir, "report.json", &(json + "\n"))?);
    files.push(write(dir, "summary.txt", &summary)?);
    Ok(RunOutcome {
        passed: checks.iter().all(|c| c.passed),
        files,
        summary,
    })
}

type Artifacts = (
    Vec<(String, String)>,
    Vec<VerificationReport>,
    serde_json::Value,
    Option<(&'static str, String)>,
);

fn io(path: &Path, source: std::io::Error) -> RunError {
    RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, RunError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| io(&path, e))?;
    Ok(path)
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize to JSON")
}

fn order(config: &RunConfig) -> f64 {
    config
        .s
        .expect("validated configs carry s for this command")
}

/// Human-readable text mirroring the report fields, one block per check.
fn summary_text(
    config: &RunConfig,
    header: &[(String, String)],
    checks: &[VerificationReport],
) -> String {
    let mut out = String::new();
    let command = serde_json::to_value(config.command).expect("command serializes");
    writeln!(out, "command: {}", command.as_str().unwrap_or_default()).unwrap();
    for (k, v) in header {
        writeln!(out, "{k}: {v}").unwrap();
    }
    for c in checks {
        writeln!(out, "\n[{}]", c.check_name).unwrap();
        writeln!(out, "passed: {}", c.passed).unwrap();
        writeln!(out, "measured: {:e}", c.measured).unwrap();
        writeln!(out, "threshold: {:e}", c.threshold).unwrap();
        writeln!(out, "digest: {}", c.inputs_digest).unwrap();
        writeln!(out, "notes: {}", c.notes).unwrap();
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    writeln!(out, "\n{passed}/{} checks passed", checks.len()).unwrap();
    out
}

fn load_field(spec: &LoadSpec) -> Result<Box<dyn ScalarField>, RunError> {
    Ok(match spec {
        LoadSpec::Constant(v) => Box::new(Constant::new(*v, 1)),
        LoadSpec::Polynomial(c) => Box::new(Polynomial { coeffs: c.clone() }),
        LoadSpec::Sampled(path) => Box::new(read_samples(path)?),
    })
}

/// Reads a two-column `x,f` CSV; a non-numeric first row is a header.
fn read_samples(path: &Path) -> Result<PiecewiseLinear, RunError> {
    let fail = |message: String| RunError::Samples {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        if record.len() != 2 {
            return Err(fail(format!(
                "row {} has {} columns, expected 2",
                row + 1,
                record.len()
            )));
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(v) => {
                xs.push(v[0]);
                ys.push(v[1]);
            }
            Err(_) if row == 0 => continue,
            Err(e) => return Err(fail(format!("row {}: {e}", row + 1))),
        }
    }
    PiecewiseLinear::new(xs, ys).map_err(|e| fail(e.to_string()))
}

fn solve(config: &RunConfig) -> Result<Artifacts, RunError> {
    let s = order(config);
    let spec = config
        .f
        .as_ref()
        .expect("validated solve configs carry a load");
    let f = load_field(spec)?;
    let params = OperatorParams::mixed_1d(s)?;
    let mesh = build_mesh(config.domain.0, config.domain.1, config.n)?;
    let sys = StiffnessSystem::assemble(&mesh, &params, &config.quad)?;
    let mut report = solve_dirichlet(&sys, &f)?;
    report.load_label = serde_json::to_string(spec).expect("load spec serializes");

    let input = digest(&(config, &report.solution.coeffs));
    let mut checks = vec![
        VerificationReport::new(
            "solver_residual",
            report.residual_norm <= 10.0 * SOLVER_TOLERANCE,
            report.residual_norm,
            10.0 * SOLVER_TOLERANCE,
            input.clone(),
            format!("{} iterations", report.iterations),
        ),
        VerificationReport::new(
            "energy_identity",
            report.energy_identity_error() <= ENERGY_IDENTITY_TOLERANCE,
            report.energy_identity_error(),
            ENERGY_IDENTITY_TOLERANCE,
            input,
            format!("B(u,u) = {:e}", report.energy),
        ),
    ];
    let nonnegative = mesh
        .quadrature_points()
        .iter()
        .all(|(_, x, _)| f.at(*x) >= 0.0);
    if nonnegative {
        checks.push(check_weak_mp(&report, 0.0));
    }

    let mut csv = String::from("x,u\n");
    for (x, u) in mesh.nodes().iter().zip(&report.solution.coeffs) {
        writeln!(csv, "{x:.16e},{u:.16e}").unwrap();
    }
    let (l2, linf) = load_norms(&f, &mesh);
    let header = vec![
        ("s".into(), s.to_string()),
        (
            "domain".into(),
            format!("[{}, {}]", config.domain.0, config.domain.1),
        ),
        ("n".into(), config.n.to_string()),
        ("min u".into(), format!("{:e}", report.solution.min())),
        ("max u".into(), format!("{:e}", report.solution.max())),
        ("energy ratio".into(), format!("{:e}", report.ratio_energy)),
        ("L2 norm of f".into(), format!("{l2:e}")),
        ("max |f|".into(), format!("{linf:e}")),
        (
            "weak maximum principle".into(),
            if nonnegative {
                "checked"
            } else {
                "skipped (load changes sign)"
            }
            .into(),
        ),
    ];
    Ok((
        header,
        checks,
        to_value(&report),
        Some(("solution.csv", csv)),
    ))
}

fn certificate_reports(p: &BarrierParams) -> Vec<VerificationReport> {
    let input = digest(&(p.s(), &p.cs, p.d, p.c2, p.ell, p.m));
    p.certificate
        .checks
        .iter()
        .map(|c| {
            VerificationReport::new(
                &format!("barrier: {}", c.name),
                c.passed,
                c.worst_margin,
                -c.allowance,
                input.clone(),
                format!("{} points", c.points),
            )
        })
        .collect()
}

fn barrier(config: &RunConfig) -> Result<Artifacts, RunError> {
    let s = order(config);
    let p = build_barrier(s, &config.quad)?;
    let params = OperatorParams::mixed_1d(s)?;
    let gamma = p.gamma_field();
    let (a, b) = config.domain;
    let xs: Vec<f64> = (1..=config.n)
        .map(|k| a + (b - a) * k as f64 / (config.n + 1) as f64)
        .collect();
    // ℒγ is undefined on the kinks of γ; those rows carry NaN
    let lg: Vec<f64> = xs
        .par_iter()
        .map(|x| mixed_apply(&gamma, &[*x], &params, &config.quad).unwrap_or(f64::NAN))
        .collect();
    let mut csv = String::from("x,beta,gamma,l_gamma\n");
    for (x, l) in xs.iter().zip(&lg) {
        writeln!(
            csv,
            "{x:.16e},{:.16e},{:.16e},{l:.16e}",
            p.beta(*x),
            p.gamma(*x)
        )
        .unwrap();
    }
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|c| format!("{c:e}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    let header = vec![
        ("s".into(), s.to_string()),
        (
            "case".into(),
            to_value(&p.ladder.case).as_str().unwrap_or_default().into(),
        ),
        ("alphas".into(), fmt(&p.ladder.alphas)),
        ("kappas".into(), fmt(&p.kappas)),
        ("coefficients".into(), fmt(&p.cs)),
        ("d".into(), format!("{:e}", p.d)),
        ("C_sharp".into(), format!("{:e}", p.c_sharp)),
        ("C0".into(), format!("{:e}", p.c0)),
        ("C1".into(), format!("{:e}", p.c1)),
        ("C2".into(), format!("{:e}", p.c2)),
        ("ell".into(), format!("{:e}", p.ell)),
        ("M".into(), format!("{:e}", p.m)),
        ("c_gamma".into(), format!("{:e}", p.c_gamma)),
        ("R".into(), format!("{:e}", p.r)),
        ("halvings".into(), p.certificate.halvings.to_string()),
    ];
    Ok((
        header,
        certificate_reports(&p),
        to_value(&p),
        Some(("barrier.csv", csv)),
    ))
}

fn verify(config: &RunConfig) -> Result<Artifacts, RunError> {
    let suite = SuiteConfig {
        seed: config.seed,
        random_loads: config.random_loads,
        orders: config.orders.clone(),
        nodes: config.n,
        quad: config.quad,
    };
    let result = run_suite(&suite);
    let header = vec![
        ("seed".into(), config.seed.to_string()),
        ("random loads".into(), config.random_loads.to_string()),
        ("orders".into(), format!("{:?}", config.orders)),
        ("nodes".into(), config.n.to_string()),
    ];
    Ok((header, result.reports.clone(), to_value(&result), None))
}

fn counterexample(config: &RunConfig) -> Result<Artifacts, RunError> {
    let s = order(config);
    let quad = &config.quad;
    let mut header = vec![("s".to_string(), s.to_string())];
    let (checks, document) = match config.example {
        Example::Ces => {
            let o = counterexample_ces(s, quad)?;
            header.push(("example".into(), "ces".into()));
            header.push(("eps0".into(), o.eps0.to_string()));
            header.push(("min L'f".into(), format!("{:e}", o.min_operator)));
            header.push(("max f".into(), format!("{:e}", o.max_value)));
            (
                vec![o.report.clone(), o.positive_side.clone()],
                to_value(&o),
            )
        }
        Example::General => {
            let o = counterexample_general(s, config.dim, quad)?;
            header.push(("example".into(), "general".into()));
            header.push(("dim".into(), config.dim.to_string()));
            header.push(("eps0".into(), o.eps0.to_string()));
            header.push(("sup estimate".into(), format!("{:e}", o.sup_estimate)));
            let mut checks = vec![o.report.clone()];
            checks.extend(o.positive_side.clone());
            (checks, to_value(&o))
        }
        Example::BoundaryOnly => {
            let o = counterexample_boundary_only(config.radius, s, config.n, quad)?;
            header.push(("example".into(), "boundary_only".into()));
            header.push(("radius".into(), config.radius.to_string()));
            header.push(("n".into(), config.n.to_string()));
            header.push(("m".into(), format!("{:e}", o.m)));
            header.push((
                "v(-1), v(1)".into(),
                format!("{:e}, {:e}", o.v_boundary[0], o.v_boundary[1]),
            ));
            header.push(("residual".into(), format!("{:e}", o.residual)));
            (
                vec![o.report.clone(), o.positive_side.clone()],
                to_value(&o),
            )
        }
    };
    Ok((header, checks, document, None))
}
