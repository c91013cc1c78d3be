use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{digest, VerificationReport};
use crate::error::{domain, Result};
use crate::solve::SolveReport;

/// Largest relative spread accepted for the energy ratio across meshes.
pub const ENERGY_SPREAD: f64 = 0.1;
/// Largest relative spread accepted for the `L∞` ratio across meshes.
pub const LINF_SPREAD: f64 = 0.5;
/// Bound on the last boundary quotient relative to the median.
pub const QUOTIENT_GROWTH: f64 = 1.25;

fn groups(reports: &[SolveReport]) -> BTreeMap<&str, Vec<&SolveReport>> {
    let mut map: BTreeMap<&str, Vec<&SolveReport>> = BTreeMap::new();
    for r in reports {
        map.entry(r.load_label.as_str()).or_default().push(r);
    }
    map
}

/// `max / min - 1` of a list of positive numbers.
fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min - 1.0
}

fn solution_digest(name: &str, reports: &[SolveReport], extra: f64) -> String {
    let inputs: Vec<(&str, usize, &Vec<f64>)> = reports
        .iter()
        .map(|r| (r.load_label.as_str(), r.mesh().n(), &r.solution.coeffs))
        .collect();
    digest(&(name, inputs, extra))
}

/// Energy bound: the ratio `‖u_h‖_𝕏 / ‖f‖_{L²}` of each load family varies
/// by less than 10% across the given meshes.
pub fn check_energy_bound(reports: &[SolveReport]) -> VerificationReport {
    let inputs = solution_digest("energy_bound", reports, 0.0);
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (label, group) in groups(reports) {
        let ratios: Vec<f64> = group
            .iter()
            .filter(|r| r.l2_f_norm > 0.0)
            .map(|r| r.ratio_energy)
            .collect();
        if ratios.len() < 2 {
            notes.push(format!("{label}: skipped"));
            continue;
        }
        let sp = spread(&ratios);
        worst = worst.max(sp);
        notes.push(format!("{label}: ratios {ratios:.6?}"));
    }
    VerificationReport::new(
        "energy_bound",
        worst < ENERGY_SPREAD,
        worst,
        ENERGY_SPREAD,
        inputs,
        notes.join("; "),
    )
}

/// `L∞` bound: `‖u_h‖_∞ / ‖f‖_{L^p}` is stable (spread below 50%) across the
/// meshes of every load family. Supports `p = 2` and `p = ∞`; loads that
/// vanish identically are skipped.
pub fn check_linf_bound(reports: &[SolveReport], p: f64) -> Result<VerificationReport> {
    if p != 2.0 && p != f64::INFINITY {
        return domain(format!(
            "L^p norms are recorded for p = 2 and p = inf only, got {p}"
        ));
    }
    let inputs = solution_digest("linf_bound", reports, p);
    let mut worst = 0.0f64;
    let mut max_ratio = 0.0f64;
    let mut notes = Vec::new();
    for (label, group) in groups(reports) {
        let ratios: Vec<f64> = group
            .iter()
            .filter_map(|r| {
                let norm = if p == 2.0 { r.l2_f_norm } else { r.linf_f_norm };
                (norm > 0.0).then(|| r.solution.max_abs() / norm)
            })
            .collect();
        if ratios.len() < 2 {
            notes.push(format!("{label}: skipped"));
            continue;
        }
        worst = worst.max(spread(&ratios));
        max_ratio = ratios.iter().copied().fold(max_ratio, f64::max);
        notes.push(format!("{label}: ratios {ratios:.6?}"));
    }
    notes.push(format!("max ratio {max_ratio:.6e}"));
    Ok(VerificationReport::new(
        "linf_bound",
        worst < LINF_SPREAD,
        worst,
        LINF_SPREAD,
        inputs,
        notes.join("; "),
    ))
}

/// Near-boundary growth of a discrete solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryQuotient {
    /// `max |u(x)| / dist(x, ∂Ω)` over the nodes within the band.
    pub q: f64,
    /// Least-squares slope of `log |u|` against `log dist` in the band
    /// (`NaN` when fewer than two nonzero values are available).
    pub exponent: f64,
    pub nodes: usize,
}

pub fn boundary_quotient(report: &SolveReport, band: f64) -> Result<BoundaryQuotient> {
    let mesh = report.mesh();
    if !(band > 0.0 && band < 0.25 * (mesh.b() - mesh.a())) {
        return domain(format!("band {band} must lie in (0, (b-a)/4)"));
    }
    let mut q = 0.0f64;
    let mut nodes = 0;
    let mut pts = Vec::new();
    for (x, u) in mesh.nodes().iter().zip(&report.solution.coeffs) {
        let dist = mesh.boundary_distance(*x);
        if dist <= band {
            nodes += 1;
            q = q.max(u.abs() / dist);
            if u.abs() > 0.0 {
                pts.push((dist.ln(), u.abs().ln()));
            }
        }
    }
    if nodes == 0 {
        return domain(format!("no mesh nodes within {band} of the boundary"));
    }
    let exponent = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    Ok(BoundaryQuotient { q, exponent, nodes })
}

/// Boundary Lipschitz growth over a refinement sequence: the quotient of the
/// finest mesh is at most 1.25 times the median quotient, and, when
/// `target = Some((e, tol))`, the fitted exponent of the finest mesh lies
/// within `tol` of `e`.
pub fn check_boundary_lipschitz(
    reports: &[SolveReport],
    band: f64,
    target: Option<(f64, f64)>,
) -> Result<VerificationReport> {
    if reports.is_empty() {
        return domain("boundary check needs at least one solve");
    }
    let inputs = solution_digest("boundary_lipschitz", reports, band);
    let quotients = reports
        .iter()
        .map(|r| boundary_quotient(r, band))
        .collect::<Result<Vec<_>>>()?;
    let mut qs: Vec<f64> = quotients.iter().map(|b| b.q).collect();
    let last = *qs.last().expect("nonempty");
    qs.sort_by(f64::total_cmp);
    let median = qs[qs.len() / 2];
    let measured = if median > 0.0 { last / median } else { 0.0 };
    let exponent = quotients.last().expect("nonempty").exponent;
    let mut passed = measured <= QUOTIENT_GROWTH;
    let mut notes = format!(
        "quotients {:.6?}; fitted exponent {exponent:.4}",
        quotients.iter().map(|b| b.q).collect::<Vec<_>>()
    );
    if let Some((e, tol)) = target {
        let ok = (exponent - e).abs() <= tol;
        passed &= ok;
        notes.push_str(&format!(
            "; target {e} ± {tol}: {}",
            if ok { "met" } else { "missed" }
        ));
    }
    Ok(VerificationReport::new(
        "boundary_lipschitz",
        passed,
        measured,
        QUOTIENT_GROWTH,
        inputs,
        notes,
    ))
}
