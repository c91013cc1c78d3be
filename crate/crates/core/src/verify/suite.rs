use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{check_boundary_lipschitz, check_energy_bound, check_linf_bound};
use super::counterexamples::{
    counterexample_boundary_only, counterexample_ces, counterexample_general,
};
use super::principles::{check_strong_mp_discrete, check_weak_mp};
use super::residual::{manufactured_bump, residual_check};
use super::{digest, VerificationReport};
use crate::assembly::{build_mesh, OperatorParts, StiffnessSystem};
use crate::barrier::build_barrier;
use crate::error::Result;
use crate::fields::{Constant, PiecewiseLinear, Polynomial};
use crate::kernel::{mixed_apply, OperatorParams, QuadratureSpec, ScalarField};
use crate::solve::{solve_dirichlet, solve_sampled, SolveReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    /// Seed of the random nonnegative loads.
    pub seed: u64,
    /// Number of random loads per order.
    pub random_loads: usize,
    /// Orders used by the maximum principle runs.
    pub orders: Vec<f64>,
    /// Interior nodes of the maximum principle runs.
    pub nodes: usize,
    pub quad: QuadratureSpec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            random_loads: 20,
            orders: vec![0.25, 0.5, 0.75],
            nodes: 255,
            quad: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub config: SuiteConfig,
    pub reports: Vec<VerificationReport>,
}

impl SuiteResult {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    /// One line per report, in a fixed order.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&r.summary_line());
            out.push('\n');
        }
        let passed = self.reports.iter().filter(|r| r.passed).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.reports.len()));
        out
    }
}

/// Nonnegative piecewise linear loads with 9 random knot values in `[0, 1)`
/// on `[-1, 1]`.
pub fn random_loads(seed: u64, count: usize) -> Vec<PiecewiseLinear> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..9).map(|k| -1.0 + 0.25 * k as f64).collect();
    (0..count)
        .map(|_| {
            let ys = (0..9).map(|_| rng.gen::<f64>()).collect();
            PiecewiseLinear::new(xs.clone(), ys).expect("knots are increasing")
        })
        .collect()
}

type Job<'a> = Box<dyn Fn() -> Result<Vec<VerificationReport>> + Send + Sync + 'a>;

fn solve_family<F: ScalarField>(
    s: f64,
    parts: OperatorParts,
    sizes: &[usize],
    f: &F,
    label: &str,
    quad: &QuadratureSpec,
) -> Result<Vec<SolveReport>> {
    let params = OperatorParams::mixed_1d(s)?;
    sizes
        .iter()
        .map(|&n| {
            let mesh = build_mesh(-1.0, 1.0, n)?;
            let sys = StiffnessSystem::assemble(&mesh, &params, quad)?.with_parts(parts);
            let mut r = solve_dirichlet(&sys, f)?;
            r.load_label = label.to_string();
            Ok(r)
        })
        .collect()
}

/// Runs the verification suite. Jobs run concurrently; reports are returned
/// in a fixed order, so equal configurations give identical results.
pub fn run_suite(config: &SuiteConfig) -> SuiteResult {
    let quad = config.quad;
    let loads = random_loads(config.seed, config.random_loads);
    let mut jobs: Vec<(String, Job)> = Vec::new();

    for &s in &config.orders {
        let loads = &loads;
        jobs.push((
            format!("weak_mp s={s}"),
            Box::new(move || {
                let params = OperatorParams::mixed_1d(s)?;
                let mesh = build_mesh(-1.0, 1.0, config.nodes)?;
                let sys = StiffnessSystem::assemble(&mesh, &params, &quad)?;
                let mut out = Vec::new();
                for (k, f) in loads.iter().enumerate() {
                    let mut r = solve_dirichlet(&sys, f)?;
                    r.load_label = format!("random load {k} (seed {}), s = {s}", config.seed);
                    out.push(check_weak_mp(&r, 0.0));
                    if k == 0 {
                        out.push(check_strong_mp_discrete(&r));
                    }
                }
                Ok(out)
            }),
        ));
    }
    jobs.push((
        "energy_bound".into(),
        Box::new(move || {
            let one = Constant::new(1.0, 1);
            let reports = solve_family(
                0.5,
                OperatorParts::Mixed,
                &[127, 255, 511],
                &one,
                "f = 1",
                &quad,
            )?;
            Ok(vec![check_energy_bound(&reports)])
        }),
    ));
    jobs.push((
        "linf_bound".into(),
        Box::new(move || {
            let sizes = [63, 127, 255];
            let mut reports = Vec::new();
            let one = Constant::new(1.0, 1);
            let quadratic = Polynomial {
                coeffs: vec![0.0, 0.0, 1.0],
            };
            let tent = PiecewiseLinear::new(vec![-0.5, 0.0, 0.5], vec![0.0, 1.0, 0.0])?;
            reports.extend(solve_family(
                0.5,
                OperatorParts::Mixed,
                &sizes,
                &one,
                "f = 1",
                &quad,
            )?);
            reports.extend(solve_family(
                0.5,
                OperatorParts::Mixed,
                &sizes,
                &quadratic,
                "f = x^2",
                &quad,
            )?);
            reports.extend(solve_family(
                0.5,
                OperatorParts::Mixed,
                &sizes,
                &tent,
                "tent",
                &quad,
            )?);
            Ok(vec![check_linf_bound(&reports, 2.0)?])
        }),
    ));
    jobs.push((
        "boundary_lipschitz".into(),
        Box::new(move || {
            let one = Constant::new(1.0, 1);
            let reports = solve_family(
                0.75,
                OperatorParts::Mixed,
                &[63, 127, 255, 511],
                &one,
                "f = 1",
                &quad,
            )?;
            Ok(vec![check_boundary_lipschitz(
                &reports,
                0.1,
                Some((1.0, 0.15)),
            )?])
        }),
    ));
    for s in [0.1, 0.25, 0.4] {
        jobs.push((
            format!("counterexample_ces s={s}"),
            Box::new(move || {
                let o = counterexample_ces(s, &quad)?;
                Ok(vec![o.report, o.positive_side])
            }),
        ));
    }
    jobs.push((
        "counterexample_general".into(),
        Box::new(move || {
            let o = counterexample_general(0.75, 1, &quad)?;
            let mut out = vec![o.report];
            out.extend(o.positive_side);
            Ok(out)
        }),
    ));
    jobs.push((
        "counterexample_boundary_only".into(),
        Box::new(move || {
            let o = counterexample_boundary_only(2.0, 0.5, 511, &quad)?;
            Ok(vec![o.report, o.positive_side])
        }),
    ));
    jobs.push((
        "residual_check".into(),
        Box::new(move || {
            let params = OperatorParams::mixed_1d(0.5)?;
            let u = manufactured_bump();
            let f = move |x: f64| mixed_apply(&u, &[x], &params, &quad);
            let mut reports = Vec::new();
            for n in [63, 127, 255] {
                let mesh = build_mesh(-1.0, 1.0, n)?;
                let sys = StiffnessSystem::assemble(&mesh, &params, &quad)?;
                let samples = super::quadrature_samples(&mesh, &f)?;
                reports.push(solve_sampled(&sys, &samples)?);
            }
            let field = crate::fields::FnField::new(
                1,
                std::sync::Arc::new(move |x: &[f64]| f(x[0]).unwrap_or(f64::NAN)),
                Vec::new(),
                crate::kernel::TailClass::Bounded { bound: 0.0 },
            );
            Ok(vec![residual_check(&reports, &field, &params, &quad)?])
        }),
    ));
    for s in [0.3, 0.5, 0.6, 0.75, 0.9] {
        jobs.push((
            format!("barrier s={s}"),
            Box::new(move || {
                let p = build_barrier(s, &quad)?;
                let lg = p
                    .certificate
                    .check("L gamma >= 1")
                    .expect("always recorded");
                Ok(vec![VerificationReport::new(
                    "barrier_certificate",
                    p.certificate.passed(),
                    lg.worst_margin,
                    -lg.allowance,
                    digest(&("barrier_certificate", s, &quad)),
                    format!(
                        "s = {s}; d = {:.4e}; ell = {:.4e}; M = {:.4e}; c = {:.4e}",
                        p.d, p.ell, p.m, p.c_gamma
                    ),
                )])
            }),
        ));
    }

    let reports = jobs
        .par_iter()
        .map(|(name, job)| match job() {
            Ok(r) => r,
            Err(e) => vec![VerificationReport::new(
                name,
                false,
                f64::NAN,
                f64::NAN,
                digest(&(name, config)),
                format!("error: {e}"),
            )],
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    SuiteResult {
        config: config.clone(),
        reports,
    }
}
