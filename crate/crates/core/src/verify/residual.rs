use rayon::prelude::*;

use super::{digest, VerificationReport};
use crate::error::{domain, Result};
use crate::fields::Radial;
use crate::kernel::{frac_apply, LocalSign, OperatorParams, QuadratureSpec, ScalarField};
use crate::solve::SolveReport;

/// Second derivative at an element midpoint of the quintic through the six
/// nearest nodes (offsets `-5/2, ..., 5/2` in units of `h`).
const QUINTIC_MIDPOINT: [f64; 6] = [
    -5.0 / 48.0,
    13.0 / 16.0,
    -17.0 / 24.0,
    -17.0 / 24.0,
    13.0 / 16.0,
    -5.0 / 48.0,
];
/// Most sample points used per mesh.
const MAX_SAMPLES: usize = 33;
/// Half-width of the interval where the residual is measured.
pub const RESIDUAL_WINDOW: f64 = 0.5;

/// The manufactured solution `(1 - (x/0.8)²)^4`.
pub fn manufactured_bump() -> Radial {
    Radial::bump(1, 0.8, 4.0)
}

/// `max |ℒu_h - f|` over element midpoints in `[-window, window]`.
///
/// The fractional part is applied to the piecewise linear `u_h` extended by
/// zero; the local part uses the quintic fit of the nodal values. Midpoints
/// whose stencil leaves the closed mesh are skipped.
pub fn interior_residual<F: ScalarField + ?Sized>(
    report: &SolveReport,
    f: &F,
    params: &OperatorParams,
    quad: &QuadratureSpec,
    window: f64,
) -> Result<f64> {
    let u = &report.solution;
    let mesh = &u.mesh;
    let h = mesh.h();
    let closed = u.closed_values();
    // element e spans closed nodes e and e + 1
    let candidates: Vec<usize> = (2..closed.len().saturating_sub(3))
        .filter(|e| (mesh.a() + (*e as f64 + 0.5) * h).abs() <= window)
        .collect();
    if candidates.is_empty() {
        return domain("no interior stencil fits inside the residual window");
    }
    let stride = candidates.len().div_ceil(MAX_SAMPLES);
    let picked: Vec<usize> = candidates.into_iter().step_by(stride).collect();
    let values = picked
        .par_iter()
        .map(|&e| {
            let x = mesh.a() + (e as f64 + 0.5) * h;
            let second: f64 = QUINTIC_MIDPOINT
                .iter()
                .zip(&closed[e - 2..e + 4])
                .map(|(w, v)| w * v)
                .sum::<f64>()
                / (h * h);
            let frac = frac_apply(u, &[x], params, quad)?;
            let local = match params.local_sign() {
                LocalSign::Minus => -second,
                LocalSign::Plus => second,
            };
            Ok((local + frac - f.at(x)).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// The interior residual decreases strictly along the refinement sequence
/// (or vanishes to rounding on every mesh).
pub fn residual_check<F: ScalarField + ?Sized>(
    reports: &[SolveReport],
    f: &F,
    params: &OperatorParams,
    quad: &QuadratureSpec,
) -> Result<VerificationReport> {
    if reports.len() < 2 {
        return domain("the residual check needs at least two meshes");
    }
    let residuals = reports
        .iter()
        .map(|r| interior_residual(r, f, params, quad, RESIDUAL_WINDOW))
        .collect::<Result<Vec<_>>>()?;
    let trivial = residuals.iter().all(|r| *r <= 1e-14);
    let decreasing = residuals.windows(2).all(|w| w[1] < w[0]);
    let last = residuals[residuals.len() - 1];
    let previous = residuals[residuals.len() - 2];
    let inputs: Vec<(usize, &Vec<f64>)> = reports
        .iter()
        .map(|r| (r.mesh().n(), &r.solution.coeffs))
        .collect();
    Ok(VerificationReport::new(
        "residual_check",
        trivial || decreasing,
        last,
        previous,
        digest(&("residual_check", inputs, params, quad)),
        format!(
            "residuals on |x| <= {RESIDUAL_WINDOW}: {}",
            residuals
                .iter()
                .map(|r| format!("{r:.6e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    ))
}
