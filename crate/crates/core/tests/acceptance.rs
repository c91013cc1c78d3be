//! Acceptance criteria 1 to 10. Run with `--nocapture` to see one
//! PASS/FAIL line per criterion.

mod common;

use std::time::{Duration, Instant};

use mixlap_core::barrier::build_barrier;
use mixlap_core::fields::{Constant, FnField, PiecewiseLinear, Polynomial};
use mixlap_core::verify::*;
use mixlap_core::{
    build_mesh, mixed_apply, normalization_constant, solve_dirichlet, OperatorParams,
    OperatorParts, QuadratureSpec, ScalarField, SolveReport, StiffnessSystem, TailClass,
};
use rayon::prelude::*;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn quad() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn family<F: ScalarField>(
    s: f64,
    parts: OperatorParts,
    sizes: &[usize],
    f: &F,
    label: &str,
) -> Vec<SolveReport> {
    let params = OperatorParams::mixed_1d(s).unwrap();
    sizes
        .iter()
        .map(|&n| {
            let mesh = build_mesh(-1.0, 1.0, n).unwrap();
            let sys = StiffnessSystem::assemble(&mesh, &params, &quad())
                .unwrap()
                .with_parts(parts);
            let mut r = solve_dirichlet(&sys, f).unwrap();
            r.load_label = label.into();
            r
        })
        .collect()
}

fn failing(reports: &[VerificationReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.summary_line())
        .collect()
}

fn normalization() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = Duration::ZERO;
    for (n, want) in [
        (1, 1.0 / std::f64::consts::PI),
        (2, 0.5 / std::f64::consts::PI),
    ] {
        let t = Instant::now();
        let got = normalization_constant(n, 0.5).unwrap();
        slowest = slowest.max(t.elapsed());
        let oracle = common::closed_form_constant(n, 0.5);
        worst = worst
            .max((got - want).abs() / want)
            .max((got - oracle).abs() / oracle);
    }
    Outcome::new(
        worst <= 1e-8 && slowest < Duration::from_secs(5),
        format!("max rel err {worst:.2e}, slowest {slowest:?}"),
    )
}

fn stiffness_oracle() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [3, 9, 17] {
        let mesh = build_mesh(-1.0, 1.0, n).unwrap();
        for s in [0.25, 0.5, 0.75] {
            let params = OperatorParams::mixed_1d(s).unwrap();
            let sys = StiffnessSystem::assemble(&mesh, &params, &quad()).unwrap();
            let c = params.c_ns();
            let pairs: Vec<(usize, usize)> =
                (1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect();
            let errs: Vec<f64> = pairs
                .par_iter()
                .map(|&(i, j)| {
                    let want = common::brute_force_entry(-1.0, 1.0, n, i, j, s, c);
                    let got = sys.nonlocal.get(i - 1, j - 1);
                    (got - want).abs() / want.abs()
                })
                .collect();
            count += errs.len();
            worst = errs.into_iter().fold(worst, f64::max);
        }
    }
    let elapsed = t.elapsed();
    Outcome::new(
        worst <= 1e-6 && elapsed < Duration::from_secs(60),
        format!("{count} entries, max rel err {worst:.2e}, {elapsed:?}"),
    )
}

fn weak_maximum_principle() -> Outcome {
    let t = Instant::now();
    let loads = random_loads(42, 20);
    let mut reports = Vec::new();
    for s in [0.25, 0.5, 0.75] {
        let params = OperatorParams::mixed_1d(s).unwrap();
        let mesh = build_mesh(-1.0, 1.0, 255).unwrap();
        let sys = StiffnessSystem::assemble(&mesh, &params, &quad()).unwrap();
        for f in &loads {
            reports.push(check_weak_mp(&solve_dirichlet(&sys, f).unwrap(), 0.0));
        }
    }
    let elapsed = t.elapsed();
    let bad = failing(&reports);
    Outcome::new(
        bad.is_empty() && elapsed < Duration::from_secs(120),
        format!(
            "{} solves, {} failures, {elapsed:?}",
            reports.len(),
            bad.len()
        ),
    )
}

fn energy_bound() -> Outcome {
    let one = Constant::new(1.0, 1);
    let reports = family(0.5, OperatorParts::Mixed, &[127, 255, 511], &one, "f = 1");
    let rep = check_energy_bound(&reports);
    Outcome::new(rep.passed, rep.summary_line())
}

fn barrier_certificates() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for s in [0.3, 0.5, 0.6, 0.75, 0.9] {
        let t = Instant::now();
        let p = match build_barrier(s, &quad()) {
            Ok(p) => p,
            Err(e) => {
                ok = false;
                lines.push(format!("s={s}: {e}"));
                continue;
            }
        };
        let elapsed = t.elapsed();
        let lg = p.certificate.check("L gamma >= 1").unwrap();
        let sandwich = p.certificate.check("c x <= gamma <= x/c").unwrap();
        let mut recursion = 0.0f64;
        for j in 1..p.cs.len() {
            let a = p.ladder.alphas[j];
            let lhs = p.cs[j] * a * (a - 1.0);
            let rhs = -p.kappas[j - 1] * p.cs[j - 1];
            recursion = recursion.max((lhs - rhs).abs() / rhs.abs());
        }
        let signs = p.kappas.iter().all(|k| *k < 0.0) && p.cs.iter().all(|c| *c > 0.0);
        let pass = p.certificate.passed()
            && lg.points == 200
            && lg.worst_margin >= -1e-4
            && sandwich.passed
            && recursion <= 4.0 * f64::EPSILON
            && signs
            && elapsed < Duration::from_secs(180);
        ok &= pass;
        lines.push(format!(
            "s={s}: L gamma - 1 >= {:.2e}, recursion {recursion:.1e}, {elapsed:?}",
            lg.worst_margin
        ));
    }
    Outcome::new(ok, lines.join("; "))
}

fn boundary_contrast() -> Outcome {
    let one = Constant::new(1.0, 1);
    let sizes = [63, 127, 255, 511];
    let mixed = family(0.75, OperatorParts::Mixed, &sizes, &one, "f = 1");
    let rep = check_boundary_lipschitz(&mixed, 0.1, Some((1.0, 0.15))).unwrap();
    let nonlocal = family(
        0.75,
        OperatorParts::NonlocalOnly,
        &sizes[3..],
        &one,
        "f = 1",
    );
    let q = boundary_quotient(&nonlocal[0], 0.1).unwrap();
    let contrast = (q.exponent - 0.75).abs() <= 0.15;
    Outcome::new(
        rep.passed && contrast,
        format!(
            "mixed: {}; nonlocal exponent {:.4}",
            rep.summary_line(),
            q.exponent
        ),
    )
}

fn ces_counterexample() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for s in [0.1, 0.25, 0.4] {
        let o = counterexample_ces(s, &quad()).unwrap();
        ok &= o.report.passed && o.positive_side.passed;
        lines.push(format!(
            "s={s}: eps0={}, min L'f={:.3e}, max f={:.3e}, weak mp {}",
            o.eps0,
            o.min_operator,
            o.max_value,
            if o.positive_side.passed {
                "holds"
            } else {
                "fails"
            }
        ));
    }
    Outcome::new(ok, lines.join("; "))
}

fn boundary_only_counterexample() -> Outcome {
    let o = counterexample_boundary_only(2.0, 0.5, 511, &quad()).unwrap();
    let tol = mixlap_core::solve::SOLVER_TOLERANCE;
    let pass = o.v_boundary.iter().all(|v| *v > 0.0) && o.min_v < 0.0 && o.residual <= 10.0 * tol;
    Outcome::new(
        pass,
        format!(
            "v(+-1)={:.4e}, min v={:.4e}, residual {:.2e}",
            o.v_boundary[0], o.min_v, o.residual
        ),
    )
}

fn linf_bound() -> Outcome {
    let sizes = [63, 127, 255];
    let one = Constant::new(1.0, 1);
    let quadratic = Polynomial {
        coeffs: vec![0.0, 0.0, 1.0],
    };
    let tent = PiecewiseLinear::new(vec![-0.5, 0.0, 0.5], vec![0.0, 1.0, 0.0]).unwrap();
    let mut reports = family(0.5, OperatorParts::Mixed, &sizes, &one, "f = 1");
    reports.extend(family(
        0.5,
        OperatorParts::Mixed,
        &sizes,
        &quadratic,
        "f = x^2",
    ));
    reports.extend(family(0.5, OperatorParts::Mixed, &sizes, &tent, "tent"));
    let rep = check_linf_bound(&reports, 2.0).unwrap();
    Outcome::new(rep.passed, rep.summary_line())
}

fn manufactured_residual() -> Outcome {
    let params = OperatorParams::mixed_1d(0.5).unwrap();
    let u = manufactured_bump();
    let f = FnField::new(
        1,
        std::sync::Arc::new(move |x: &[f64]| mixed_apply(&u, x, &params, &quad()).unwrap()),
        vec![],
        TailClass::Bounded { bound: 0.0 },
    );
    let reports = family(
        0.5,
        OperatorParts::Mixed,
        &[63, 127, 255],
        &f,
        "manufactured",
    );
    let rep = residual_check(&reports, &f, &params, &quad()).unwrap();
    Outcome::new(rep.passed, rep.summary_line())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("normalization constant", normalization),
        ("stiffness oracle", stiffness_oracle),
        ("weak maximum principle", weak_maximum_principle),
        ("energy bound", energy_bound),
        ("barrier certificates", barrier_certificates),
        ("boundary growth contrast", boundary_contrast),
        ("wrong-sign counterexample", ces_counterexample),
        ("boundary-only counterexample", boundary_only_counterexample),
        ("L-infinity bound", linf_bound),
        ("manufactured residual", manufactured_residual),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run();
        println!(
            "criterion {:>2} {} {name} ({:.1?}): {}",
            k + 1,
            if o.passed { "PASS" } else { "FAIL" },
            t.elapsed(),
            o.detail
        );
        if !o.passed {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
