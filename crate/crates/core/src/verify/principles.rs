use super::{digest, VerificationReport, INCONCLUSIVE};
use crate::kernel::{mixed_apply, OperatorParams, QuadratureSpec, ScalarField};
use crate::solve::SolveReport;

/// Accepted undershoot of discrete solutions, relative to `1 + max |u|`.
pub const MP_TOLERANCE: f64 = 1e-8;

/// Weak maximum principle: nonnegative load and exterior data give a
/// nonnegative solution, up to `-1e-8 (1 + max |u|)`.
pub fn check_weak_mp(report: &SolveReport, exterior_min: f64) -> VerificationReport {
    let u = &report.solution;
    let inputs = digest(&("weak_mp", &u.coeffs, u.mesh.a(), u.mesh.b(), exterior_min));
    let measured = u.min().min(0.0);
    let threshold = -MP_TOLERANCE * (1.0 + u.max_abs());
    if exterior_min < 0.0 {
        return VerificationReport::new(
            "weak_mp",
            false,
            measured,
            threshold,
            inputs,
            format!("{INCONCLUSIVE}: exterior data has negative minimum {exterior_min:e}"),
        );
    }
    let nodes = u.mesh.n();
    VerificationReport::new(
        "weak_mp",
        measured >= threshold,
        measured,
        threshold,
        inputs,
        format!(
            "min over {nodes} interior nodes, load {}",
            report.load_label
        ),
    )
}

/// Strong maximum principle at a contact point: if `u >= 0`, `u(x0) = 0` and
/// `ℒu >= 0` near `x0`, then `u` vanishes identically.
///
/// The hypotheses are checked on sample grids (1D: `[-10, 10]` globally and
/// `x0 ± 1/2` for the operator); when one of them fails the report is
/// marked inconclusive.
pub fn check_strong_mp_contact<F: ScalarField + ?Sized>(
    u: &F,
    params: &OperatorParams,
    quad: &QuadratureSpec,
    x0: &[f64],
) -> VerificationReport {
    let n = params.dim();
    let inputs = digest(&("strong_mp_contact", params, quad, x0));
    let mut global = Vec::new();
    for axis in 0..n {
        for k in 0..=400 {
            let mut p = x0.to_vec();
            p[axis] = -10.0 + 20.0 * k as f64 / 400.0;
            global.push(p);
        }
    }
    let max_abs = global.iter().map(|p| u.value(p).abs()).fold(0.0, f64::max);
    let min = global
        .iter()
        .map(|p| u.value(p))
        .fold(f64::INFINITY, f64::min);
    let inconclusive = |why: String| {
        VerificationReport::new(
            "strong_mp_contact",
            false,
            max_abs,
            1e-8,
            inputs.clone(),
            format!("{INCONCLUSIVE}: {why}"),
        )
    };
    if min < -1e-12 {
        return inconclusive(format!("u takes the negative value {min:e}"));
    }
    let at = u.value(x0);
    if at > 1e-12 {
        return inconclusive(format!("u(x0) = {at:e} is not a contact point"));
    }
    let mut checked = 0;
    for axis in 0..n {
        for k in 0..=20 {
            let mut p = x0.to_vec();
            p[axis] += -0.5 + k as f64 / 20.0 + 1e-3;
            if !u.in_smooth_region(&p) || u.kink_distance(&p) < 1e-6 {
                continue;
            }
            match mixed_apply(u, &p, params, quad) {
                Ok(v) if v >= -10.0 * quad.tolerance => checked += 1,
                Ok(v) => {
                    return inconclusive(format!(
                        "supersolution property fails: operator value {v:e} at {p:?}"
                    ))
                }
                Err(e) => return inconclusive(format!("operator not evaluable: {e}")),
            }
        }
    }
    if checked == 0 {
        return inconclusive("no smooth points near x0".into());
    }
    VerificationReport::new(
        "strong_mp_contact",
        max_abs <= 1e-8,
        max_abs,
        1e-8,
        inputs,
        format!("hypotheses confirmed at {checked} points"),
    )
}

/// Contrapositive of the strong maximum principle for discrete solutions:
/// a nonnegative, nontrivial load yields a strictly positive interior minimum.
pub fn check_strong_mp_discrete(report: &SolveReport) -> VerificationReport {
    let u = &report.solution;
    let inputs = digest(&("strong_mp_discrete", &u.coeffs, u.mesh.a(), u.mesh.b()));
    let measured = u.min();
    VerificationReport::new(
        "strong_mp_discrete",
        measured > 0.0 && report.linf_f_norm > 0.0,
        measured,
        0.0,
        inputs,
        format!("load {}", report.load_label),
    )
}
