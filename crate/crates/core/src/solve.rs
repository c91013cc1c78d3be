//! Discrete Dirichlet solves with zero or prescribed exterior data.

use serde::{Deserialize, Serialize};

use crate::assembly::{load_from_samples, load_vector, GridFunction, Mesh, StiffnessSystem};
use crate::error::{domain, Result};
use crate::kernel::{mixed_apply, tail_integral, QuadratureSpec, ScalarField};
use crate::linalg::{dot, solve_spd};

/// Relative residual targeted by the linear solver.
pub const SOLVER_TOLERANCE: f64 = 1e-10;

/// Exterior data used by [`lift_nonhomogeneous`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExteriorData {
    /// `g` at the interior nodes.
    pub g_nodes: Vec<f64>,
    /// `g(a)` and `g(b)`.
    pub g_endpoints: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Nodal values of the solution (for lifted problems, `v + g`).
    pub solution: GridFunction,
    /// Relative residual `‖A u - F‖ / ‖F‖` of the linear system.
    pub residual_norm: f64,
    /// `B(u, u)` (of the homogeneous part for lifted problems).
    pub energy: f64,
    /// `‖u'‖_{L²}`.
    pub x_norm: f64,
    pub l2_f_norm: f64,
    pub linf_f_norm: f64,
    /// `x_norm / l2_f_norm`, infinite when the load vanishes.
    pub ratio_energy: f64,
    pub iterations: usize,
    /// `load · u` (of the homogeneous part for lifted problems).
    pub load_dot_u: f64,
    pub exterior: Option<ExteriorData>,
    /// Free-form label of the load family, used to group reports.
    pub load_label: String,
}

impl SolveReport {
    /// Relative mismatch of the energy identity `B(u,u) = F·u`.
    pub fn energy_identity_error(&self) -> f64 {
        (self.energy - self.load_dot_u).abs() / self.energy.abs().max(f64::MIN_POSITIVE)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.solution.mesh
    }
}

/// Solves `B(u, φ) = ∫ f φ` for all hat functions `φ`.
pub fn solve_dirichlet<F: ScalarField + ?Sized>(
    sys: &StiffnessSystem,
    f: &F,
) -> Result<SolveReport> {
    let load = load_vector(f, &sys.mesh)?;
    let (l2, linf) = load_norms(f, &sys.mesh);
    solve_with_load(sys, &load, l2, linf)
}

fn solve_with_load(sys: &StiffnessSystem, load: &[f64], l2: f64, linf: f64) -> Result<SolveReport> {
    let a = sys.matrix();
    let sol = solve_spd(&a, load, SOLVER_TOLERANCE)?;
    let energy = a.form(&sol.x, &sol.x);
    let load_dot_u = dot(load, &sol.x);
    let solution = GridFunction::new(sys.mesh.clone(), sol.x)?;
    let x_norm = solution.gradient_norm();
    Ok(SolveReport {
        residual_norm: sol.relative_residual,
        energy,
        x_norm,
        l2_f_norm: l2,
        linf_f_norm: linf,
        ratio_energy: if l2 > 0.0 { x_norm / l2 } else { f64::INFINITY },
        iterations: sol.iterations,
        load_dot_u,
        solution,
        exterior: None,
        load_label: String::new(),
    })
}

/// Solves with a load given by its values at [`Mesh::quadrature_points`].
pub fn solve_sampled(sys: &StiffnessSystem, samples: &[f64]) -> Result<SolveReport> {
    let mesh = &sys.mesh;
    let points = mesh.quadrature_points();
    if samples.len() != points.len() {
        return domain(format!(
            "expected {} load samples, got {}",
            points.len(),
            samples.len()
        ));
    }
    let load = load_from_samples(mesh, samples)?;
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for ((_, _, w), v) in points.iter().zip(samples) {
        l2 += w * v * v;
        linf = linf.max(v.abs());
    }
    solve_with_load(sys, &load, l2.sqrt(), linf)
}

/// `(‖f‖_{L²(a,b)}, max |f|)` from the element Gauss rule.
pub fn load_norms<F: ScalarField + ?Sized>(f: &F, mesh: &Mesh) -> (f64, f64) {
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for (_, x, w) in mesh.quadrature_points() {
        let v = f.at(x);
        l2 += w * v * v;
        linf = linf.max(v.abs());
    }
    (l2.sqrt(), linf)
}

/// Solves `ℒu = f` in `(a, b)` with `u = g` outside by writing `u = v + g`
/// and solving `ℒv = f - ℒg` with zero exterior data.
///
/// `ℒg` is evaluated pointwise at the element Gauss points, so `g` must be
/// `C²` on a neighbourhood of `[a, b]` with a finite weighted tail integral.
pub fn lift_nonhomogeneous<F, G>(
    sys: &StiffnessSystem,
    f: &F,
    g: &G,
    quad: &QuadratureSpec,
) -> Result<SolveReport>
where
    F: ScalarField + ?Sized,
    G: ScalarField + ?Sized,
{
    let mesh = &sys.mesh;
    if !tail_integral(g, &sys.params).is_finite() {
        return domain("exterior data has an infinite weighted tail integral");
    }
    for k in g.kinks() {
        let inside = match k {
            crate::kernel::Kink::Point(c) => c >= mesh.a() && c <= mesh.b(),
            crate::kernel::Kink::Sphere(r) => {
                (r >= mesh.a() && r <= mesh.b()) || (-r >= mesh.a() && -r <= mesh.b())
            }
        };
        if inside {
            return domain("exterior data must be C² on a neighbourhood of the closed interval");
        }
    }
    let points = mesh.quadrature_points();
    let lg: Vec<f64> = {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|(_, x, _)| mixed_apply(g, &[*x], &sys.params, quad))
            .collect::<Result<Vec<f64>>>()?
    };
    let samples: Vec<f64> = points
        .iter()
        .zip(&lg)
        .map(|((_, x, _), l)| f.at(*x) - l)
        .collect();
    let load = load_from_samples(mesh, &samples)?;
    let (l2, linf) = load_norms(f, mesh);
    let mut report = solve_with_load(sys, &load, l2, linf)?;
    let g_nodes: Vec<f64> = mesh.nodes().iter().map(|x| g.at(*x)).collect();
    for (u, gv) in report.solution.coeffs.iter_mut().zip(&g_nodes) {
        *u += gv;
    }
    report.x_norm = report.solution.gradient_norm();
    report.ratio_energy = if l2 > 0.0 {
        report.x_norm / l2
    } else {
        f64::INFINITY
    };
    report.exterior = Some(ExteriorData {
        g_nodes,
        g_endpoints: [g.at(mesh.a()), g.at(mesh.b())],
    });
    Ok(report)
}
