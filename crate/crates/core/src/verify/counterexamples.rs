use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::principles::check_weak_mp;
use super::{digest, quadrature_samples, VerificationReport};
use crate::assembly::{build_mesh, StiffnessSystem};
use crate::error::{domain, Error, Result};
use crate::fields::{product, step_down, step_up, Profile, Radial};
use crate::kernel::{
    mixed_apply, LocalSign, OperatorParams, QuadratureSpec, ScalarField, TailClass,
};
use crate::solve::{lift_nonhomogeneous, solve_sampled, SolveReport, SOLVER_TOLERANCE};

/// Mesh size of the positive-side solves on `(-ε_0, ε_0)`.
const POSITIVE_SIDE_NODES: usize = 127;
/// Smallest power of 1/2 tried for `ε_0`.
const MAX_SCALE_EXPONENT: i32 = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CesOutcome {
    pub eps0: f64,
    /// Minimum of `ℒ'f_{ε_0}` over the interior grid.
    pub min_operator: f64,
    /// Maximum of `f_{ε_0}` over the interior grid.
    pub max_value: f64,
    pub report: VerificationReport,
    /// Weak maximum principle for `ℒ` with the load `ℒ'f_{ε_0}`.
    pub positive_side: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralOutcome {
    pub eps0: f64,
    /// Estimate of `‖(-Δ)^s u‖_∞` (grid maximum with a 25% margin).
    pub sup_estimate: f64,
    pub min_operator: f64,
    pub max_value: f64,
    pub report: VerificationReport,
    /// Weak maximum principle for `ℒ` on the same data (one dimension only).
    pub positive_side: Option<VerificationReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryOnlyOutcome {
    /// `m = min_{B_1} w`.
    pub m: f64,
    /// `v(-1)` and `v(1)`.
    pub v_boundary: [f64; 2],
    pub min_v: f64,
    /// Smallest sampled value of `v` on `B_r \ B_1`.
    pub exterior_inf: f64,
    /// Relative Galerkin residual of `ℒv` on the interior nodes.
    pub residual: f64,
    pub report: VerificationReport,
    /// Weak maximum principle for the problem with load `ℒφ >= 0`.
    pub positive_side: VerificationReport,
}

/// Largest `2^{-k}`, `k >= 1`, satisfying `ok`.
fn largest_scale(ok: impl Fn(f64) -> bool) -> Result<f64> {
    (1..=MAX_SCALE_EXPONENT)
        .map(|k| 0.5f64.powi(k))
        .find(|e| ok(*e))
        .ok_or_else(|| Error::Domain("no admissible scale".into()))
}

/// Interior grid of `count` points in `(-eps, eps)`, endpoints excluded.
fn interior_grid(eps: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| -eps + 2.0 * eps * k as f64 / (count + 1) as f64)
        .collect()
}

fn wrong_sign(dim: usize, s: f64) -> Result<OperatorParams> {
    OperatorParams::new(dim, s, LocalSign::Plus)
}

/// Example with `f(x) = x² - 1` on `[-1, 1]` (zero outside), rescaled to
/// `f_ε(x) = f(x/ε)`: for `s < 1/2` and small `ε_0`, `ℒ'f_{ε_0} > 0` in
/// `(-ε_0, ε_0)` although `f_{ε_0} < 0` there and vanishes outside.
pub fn counterexample_ces(s: f64, quad: &QuadratureSpec) -> Result<CesOutcome> {
    if !(s > 0.0 && s < 0.5) {
        return domain(format!(
            "the rescaled parabola needs s in (0, 1/2) for an integrable kernel, got {s}"
        ));
    }
    let params = wrong_sign(1, s)?;
    let c = params.c_ns();
    let k = 2f64.powf(1.0 - 2.0 * s) * c * (1.0 - s) / (s * (1.0 - 2.0 * s));
    let eps0 = largest_scale(|e| 1.0 - e.powf(2.0 - 2.0 * s) * k > 0.0)?;
    let f = Radial::parabola_cap(1, eps0);
    let grid = interior_grid(eps0, 101);
    let ops = grid
        .iter()
        .map(|x| mixed_apply(&f, &[*x], &params, quad))
        .collect::<Result<Vec<_>>>()?;
    let min_operator = ops.iter().copied().fold(f64::INFINITY, f64::min);
    let max_value = grid
        .iter()
        .map(|x| f.at(*x))
        .fold(f64::NEG_INFINITY, f64::max);
    let report = VerificationReport::new(
        "counterexample_ces",
        min_operator > 0.0 && max_value < 0.0,
        min_operator,
        0.0,
        digest(&("counterexample_ces", s, quad, eps0)),
        format!("eps0 = {eps0:e}; max f = {max_value:e} on 101 interior points"),
    );

    let mesh = build_mesh(-eps0, eps0, POSITIVE_SIDE_NODES)?;
    let sys = StiffnessSystem::assemble(&mesh, &params.with_sign(LocalSign::Minus), quad)?;
    let samples = quadrature_samples(&mesh, |x| mixed_apply(&f, &[x], &params, quad))?;
    let mut solve = solve_sampled(&sys, &samples)?;
    solve.load_label = "wrong-sign image of the rescaled parabola".into();
    let positive_side = check_weak_mp(&solve, 0.0);
    Ok(CesOutcome {
        eps0,
        min_operator,
        max_value,
        report,
        positive_side,
    })
}

/// `(r² - 1) φ(r)` with the cutoff `φ = 1` on `r <= 1`, `0` on `r >= 2`,
/// rescaled by `eps`.
fn cutoff_parabola(dim: usize, eps: f64, kinks: Vec<f64>) -> Radial {
    let profile: Profile = Arc::new(move |r: f64| {
        let t = r / eps;
        let [f, d1, d2] = product([t * t - 1.0, 2.0 * t, 2.0], step_down(t, 1.0, 2.0));
        [f, d1 / eps, d2 / (eps * eps)]
    });
    Radial::new(
        dim,
        profile,
        kinks,
        TailClass::CompactSupport { radius: 2.0 * eps },
    )
}

/// Example valid for every `s`: `u = (|x|² - 1) φ` has nonnegative exterior
/// values near `B_1` but is negative inside, and `ℒ'u_{ε_0} > 0` on
/// `B(0, ε_0)` once `2N > ε_0^{2-2s} ‖(-Δ)^s u‖_∞`.
pub fn counterexample_general(s: f64, n: usize, quad: &QuadratureSpec) -> Result<GeneralOutcome> {
    if !(1..=3).contains(&n) {
        return domain(format!("dimension must be 1, 2 or 3, got {n}"));
    }
    let params = wrong_sign(n, s)?;
    let u = cutoff_parabola(n, 1.0, vec![1.0, 2.0]);
    let points = if n == 1 { 71 } else { 15 };
    let radii: Vec<f64> = (0..points)
        .map(|k| 3.5 * k as f64 / (points - 1) as f64)
        .filter(|r| (r - 1.0).abs() > 1e-3 && (r - 2.0).abs() > 1e-3)
        .collect();
    let sup = radii
        .iter()
        .map(|r| {
            let mut x = vec![0.0; n];
            x[0] = *r;
            crate::kernel::frac_apply(&u, &x, &params, quad).map(f64::abs)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let sup_estimate = 1.25 * sup;
    let two_n = 2.0 * n as f64;
    let eps0 = largest_scale(|e| two_n - e.powf(2.0 - 2.0 * s) * sup_estimate > 0.0)?;

    let scaled = cutoff_parabola(n, eps0, vec![eps0, 2.0 * eps0]);
    let grid = interior_grid(eps0, 21);
    let mut min_operator = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;
    for t in &grid {
        let mut x = vec![0.0; n];
        x[0] = *t;
        min_operator = min_operator.min(mixed_apply(&scaled, &x, &params, quad)?);
        max_value = max_value.max(scaled.value(&x));
    }
    let report = VerificationReport::new(
        "counterexample_general",
        min_operator > 0.0 && max_value < 0.0,
        min_operator,
        0.0,
        digest(&("counterexample_general", s, n, quad, eps0)),
        format!("N = {n}; eps0 = {eps0:e}; sup estimate {sup_estimate:.6e}; max u = {max_value:e}"),
    );

    let positive_side = if n == 1 {
        let mesh = build_mesh(-eps0, eps0, POSITIVE_SIDE_NODES)?;
        let sys = StiffnessSystem::assemble(&mesh, &params.with_sign(LocalSign::Minus), quad)?;
        // the profile is smooth at r = eps0, so the exterior data only needs
        // its outer transition listed
        let exterior = cutoff_parabola(1, eps0, vec![2.0 * eps0]);
        let load = crate::fields::FnField::new(
            1,
            {
                let scaled = scaled.clone();
                let quad = *quad;
                Arc::new(move |x: &[f64]| {
                    mixed_apply(&scaled, x, &params, &quad).unwrap_or(f64::NAN)
                })
            },
            Vec::new(),
            TailClass::Bounded {
                bound: f64::INFINITY,
            },
        );
        let mut solve = lift_nonhomogeneous(&sys, &load, &exterior, quad)?;
        solve.load_label = "wrong-sign image of the cutoff parabola".into();
        Some(check_weak_mp(&solve, 0.0))
    } else {
        None
    };
    Ok(GeneralOutcome {
        eps0,
        sup_estimate,
        min_operator,
        max_value,
        report,
        positive_side,
    })
}

/// Smooth `φ` equal to `-1` on `r+2 <= |x| <= r+3` and vanishing outside
/// `r+1 < |x| < r+4`.
pub fn annular_dip(r: f64) -> Radial {
    let profile: Profile = Arc::new(move |rho: f64| {
        let [f, d1, d2] = product(
            step_up(rho, r + 1.0, r + 2.0),
            step_down(rho, r + 3.0, r + 4.0),
        );
        [-f, -d1, -d2]
    });
    Radial::new(
        1,
        profile,
        vec![r + 1.0, r + 2.0, r + 3.0, r + 4.0],
        TailClass::CompactSupport { radius: r + 4.0 },
    )
}

/// Sign conditions on `∂Ω` alone do not give a maximum principle: solves
/// `ℒ𝔲 = -ℒφ` in `B_1` with zero exterior data, sets `w = 𝔲 + φ`,
/// `m = min_{B_1} w` and `v = 2w - m`. Then `ℒv = 0` in `B_1`, `v = -m > 0`
/// on `B_r \ B_1` and on `∂B_1`, while `min_{B_1} v = m < 0`.
pub fn counterexample_boundary_only(
    r: f64,
    s: f64,
    n: usize,
    quad: &QuadratureSpec,
) -> Result<BoundaryOnlyOutcome> {
    if !(r > 1.0) {
        return domain(format!("the annulus radius must exceed 1, got {r}"));
    }
    let params = OperatorParams::mixed_1d(s)?;
    let phi = annular_dip(r);
    let mesh = build_mesh(-1.0, 1.0, n)?;
    let sys = StiffnessSystem::assemble(&mesh, &params, quad)?;
    let samples = quadrature_samples(&mesh, |x| Ok(-mixed_apply(&phi, &[x], &params, quad)?))?;
    let mut solve = solve_sampled(&sys, &samples)?;
    solve.load_label = "minus the operator applied to the annular dip".into();

    let w: Vec<f64> = mesh
        .nodes()
        .iter()
        .zip(&solve.solution.coeffs)
        .map(|(x, u)| u + phi.at(*x))
        .collect();
    let m = w.iter().copied().fold(f64::INFINITY, f64::min);
    if !(m < -1e-6) {
        return Err(Error::Resolution(format!(
            "min of w over the nodes is {m:e}; refine the mesh"
        )));
    }
    let v = |x: f64, inside: Option<f64>| 2.0 * inside.unwrap_or_else(|| phi.at(x)) - m;
    let min_v = w
        .iter()
        .map(|wi| v(0.0, Some(*wi)))
        .fold(f64::INFINITY, f64::min);
    let v_boundary = [v(-1.0, None), v(1.0, None)];
    let exterior_inf = (1..200)
        .flat_map(|k| {
            let x = 1.0 + (r - 1.0) * k as f64 / 200.0;
            [x, -x]
        })
        .map(|x| v(x, None))
        .fold(f64::INFINITY, f64::min);
    let residual = solve.residual_norm;
    let passed = v_boundary.iter().all(|b| *b > 0.0)
        && exterior_inf > 0.0
        && min_v < 0.0
        && residual <= 10.0 * SOLVER_TOLERANCE;
    let report = VerificationReport::new(
        "counterexample_boundary_only",
        passed,
        min_v,
        0.0,
        digest(&("counterexample_boundary_only", r, s, n, quad)),
        format!(
            "m = {m:.6e}; v(-1) = {:.6e}; v(1) = {:.6e}; inf on B_r minus B_1 = {exterior_inf:.6e}; \
             Galerkin residual {residual:.3e}",
            v_boundary[0], v_boundary[1]
        ),
    );

    let mut flipped: SolveReport = solve.clone();
    flipped.solution.coeffs.iter_mut().for_each(|u| *u = -*u);
    flipped.load_label = "the operator applied to the annular dip".into();
    let positive_side = check_weak_mp(&flipped, 0.0);
    Ok(BoundaryOnlyOutcome {
        m,
        v_boundary,
        min_v,
        exterior_inf,
        residual,
        report,
        positive_side,
    })
}
