//! Galerkin discretization of `B(u, v) = ∫ u'v' + (c_{1,s}/2) ∬ ...` with
//! piecewise linear elements on a uniform mesh of `(a, b)`, extended by zero
//! outside the interval.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fields::interpolate;
use crate::kernel::{Kink, OperatorParams, QuadratureSpec, ScalarField, TailClass};
use crate::linalg::{DenseMatrix, Tridiagonal};
use crate::quadrature::{gl20, gl4, Compensated};

/// Uniform partition of `(a, b)` into `n + 1` elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

/// Builds the uniform mesh with `n` interior nodes.
pub fn build_mesh(a: f64, b: f64, n: usize) -> Result<Mesh> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return domain(format!("mesh needs finite a < b, got ({a}, {b})"));
    }
    if n == 0 {
        return domain("mesh needs at least one interior node");
    }
    let h = (b - a) / (n + 1) as f64;
    let nodes = (1..=n).map(|i| a + i as f64 * h).collect();
    Ok(Mesh { a, b, n, h, nodes })
}

impl Mesh {
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Node abscissae including both end points.
    pub fn closed_nodes(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n + 2);
        v.push(self.a);
        v.extend_from_slice(&self.nodes);
        v.push(self.b);
        v
    }

    /// Distance to the boundary of `(a, b)`.
    pub fn boundary_distance(&self, x: f64) -> f64 {
        (x - self.a).min(self.b - x)
    }

    /// Gauss points and weights of the element rule on every element,
    /// together with the element index.
    pub fn quadrature_points(&self) -> Vec<(usize, f64, f64)> {
        let (gx, gw) = gl4();
        let mut out = Vec::with_capacity(4 * (self.n + 1));
        for e in 0..=self.n {
            let x0 = self.a + e as f64 * self.h;
            for (xi, wi) in gx.iter().zip(gw) {
                out.push((e, x0 + 0.5 * self.h * (xi + 1.0), 0.5 * self.h * wi));
            }
        }
        out
    }

    pub fn same_as(&self, other: &Mesh) -> bool {
        self.a == other.a && self.b == other.b && self.n == other.n
    }
}

/// Nodal coefficients of a continuous piecewise linear function that
/// vanishes at and beyond the end points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub mesh: Mesh,
    pub coeffs: Vec<f64>,
}

impl GridFunction {
    pub fn new(mesh: Mesh, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.n() {
            return domain(format!(
                "expected {} coefficients, got {}",
                mesh.n(),
                coeffs.len()
            ));
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn zeros(mesh: Mesh) -> Self {
        let n = mesh.n();
        Self {
            mesh,
            coeffs: vec![0.0; n],
        }
    }

    /// Nodal interpolant of `f` (end point values are dropped).
    pub fn interpolate<F: ScalarField + ?Sized>(mesh: &Mesh, f: &F) -> Self {
        let coeffs = mesh.nodes().iter().map(|x| f.at(*x)).collect();
        Self {
            mesh: mesh.clone(),
            coeffs,
        }
    }

    /// Values at `a, x_1, ..., x_n, b`.
    pub fn closed_values(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.coeffs.len() + 2);
        v.push(0.0);
        v.extend_from_slice(&self.coeffs);
        v.push(0.0);
        v
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.mesh.closed_nodes(), &self.closed_values(), x)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.coeffs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.coeffs
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `‖u'‖_{L²}`.
    pub fn gradient_norm(&self) -> f64 {
        let v = self.closed_values();
        let h = self.mesh.h();
        (v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h).sqrt()
    }

    /// `‖u‖_{L²}`, exact for piecewise linear functions.
    pub fn l2_norm(&self) -> f64 {
        let v = self.closed_values();
        let h = self.mesh.h();
        (v.windows(2)
            .map(|w| (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) * h / 3.0)
            .sum::<f64>())
        .sqrt()
    }
}

impl ScalarField for GridFunction {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[0])
    }
    fn second_derivative(&self, _x: &[f64], _dir: &[f64]) -> Option<f64> {
        Some(0.0)
    }
    fn kinks(&self) -> Vec<Kink> {
        self.mesh
            .closed_nodes()
            .into_iter()
            .map(Kink::Point)
            .collect()
    }
    fn tail(&self) -> TailClass {
        TailClass::CompactSupport {
            radius: self.mesh.a().abs().max(self.mesh.b().abs()),
        }
    }
}

/// Which parts of the operator enter the assembled matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorParts {
    Mixed,
    LocalOnly,
    NonlocalOnly,
}

/// Assembled local and nonlocal stiffness matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StiffnessSystem {
    pub mesh: Mesh,
    pub params: OperatorParams,
    pub local: Tridiagonal,
    pub nonlocal: DenseMatrix,
    pub parts: OperatorParts,
}

impl StiffnessSystem {
    /// Assembles both parts of the mixed operator.
    pub fn assemble(mesh: &Mesh, params: &OperatorParams, quad: &QuadratureSpec) -> Result<Self> {
        if params.dim() != 1 {
            return domain("the finite element solver is one-dimensional");
        }
        Ok(Self {
            mesh: mesh.clone(),
            params: *params,
            local: local_stiffness(mesh),
            nonlocal: nonlocal_stiffness(mesh, params, quad)?,
            parts: OperatorParts::Mixed,
        })
    }

    pub fn with_parts(mut self, parts: OperatorParts) -> Self {
        self.parts = parts;
        self
    }

    /// The matrix of the selected operator, with the sign of the local part
    /// taken from the operator parameters.
    pub fn matrix(&self) -> DenseMatrix {
        let sign = match self.params.local_sign() {
            crate::kernel::LocalSign::Minus => 1.0,
            crate::kernel::LocalSign::Plus => -1.0,
        };
        let local = self.local.to_dense();
        match self.parts {
            OperatorParts::Mixed => self.nonlocal.add_scaled(sign, &local),
            OperatorParts::LocalOnly => local.scaled(sign),
            OperatorParts::NonlocalOnly => self.nonlocal.clone(),
        }
    }
}

/// `∫ φ_i' φ_j'`: `2/h` on the diagonal and `-1/h` next to it.
pub fn local_stiffness(mesh: &Mesh) -> Tridiagonal {
    let h = mesh.h();
    Tridiagonal {
        diag: vec![2.0 / h; mesh.n()],
        off: vec![-1.0 / h; mesh.n().saturating_sub(1)],
    }
}

/// Gagliardo form `(c_{1,s}/2) ∬_{R×R} (φ_i(x)-φ_i(y))(φ_j(x)-φ_j(y)) |x-y|^{-1-2s}`
/// of the hat functions.
///
/// The form is translation invariant and scales like `h^{1-2s}`, so the
/// matrix is Toeplitz with entries `h^{1-2s} a_{|i-j|}`. For `k <= 3` the
/// reference entries `a_k` are fourth differences of the antiderivative
/// `E(r) = (|r|^{3-2s} - r^2)/(1-2s)` (which becomes `r^2 ln|r|` at
/// `s = 1/2`); for `k >= 4` the supports are separated and `a_k` is a
/// smooth integral against the autocorrelation of the hat function.
pub fn nonlocal_stiffness(
    mesh: &Mesh,
    params: &OperatorParams,
    quad: &QuadratureSpec,
) -> Result<DenseMatrix> {
    quad.validate()?;
    let s = params.s();
    let c = params.c_ns();
    let n = mesh.n();
    let scale = mesh.h().powf(1.0 - 2.0 * s);
    let coeffs: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| reference_entry(k, s, c))
        .collect();
    if let Some(bad) = coeffs.iter().position(|v| !v.is_finite()) {
        return Err(Error::Accuracy {
            what: format!("nonlocal stiffness entry at offset {bad}"),
            achieved: f64::NAN,
            requested: quad.tolerance,
        });
    }
    Ok(DenseMatrix::from_fn(n, |i, j| {
        scale * coeffs[i.abs_diff(j)]
    }))
}

/// `a_k` for the unit mesh.
pub fn reference_entry(k: usize, s: f64, c: f64) -> f64 {
    if k <= 3 {
        let kf = k as f64;
        let d4 = antiderivative(kf + 2.0, s) - 4.0 * antiderivative(kf + 1.0, s)
            + 6.0 * antiderivative(kf, s)
            - 4.0 * antiderivative(kf - 1.0, s)
            + antiderivative(kf - 2.0, s);
        c / (2.0 * s * (2.0 - 2.0 * s) * (3.0 - 2.0 * s)) * d4
    } else {
        let (x, w) = gl20();
        let e = -1.0 - 2.0 * s;
        let mut acc = Compensated::default();
        for p in -2..2 {
            let lo = p as f64;
            for (xi, wi) in x.iter().zip(w) {
                let t = lo + 0.5 * (xi + 1.0);
                acc.add(0.5 * wi * cubic_bspline(t) * (k as f64 + t).powf(e));
            }
        }
        -c * acc.sum()
    }
}

/// `(|r|^{3-2s} - r^2) / (1 - 2s)`, written so that `s = 1/2` is continuous.
fn antiderivative(r: f64, s: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let eps = 1.0 - 2.0 * s;
    let l = r.abs().ln();
    if eps == 0.0 {
        r * r * l
    } else {
        r * r * (eps * l).exp_m1() / eps
    }
}

/// Centered cubic B-spline, the autocorrelation of the unit hat.
fn cubic_bspline(t: f64) -> f64 {
    let a = t.abs();
    if a >= 2.0 {
        0.0
    } else if a >= 1.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    }
}

/// `∫ f φ_i` with the four-point Gauss rule on every element.
pub fn load_vector<F: ScalarField + ?Sized>(f: &F, mesh: &Mesh) -> Result<Vec<f64>> {
    let samples: Vec<f64> = mesh
        .quadrature_points()
        .iter()
        .map(|(_, x, _)| f.at(*x))
        .collect();
    load_from_samples(mesh, &samples)
}

/// Load vector from values at the points of [`Mesh::quadrature_points`].
pub fn load_from_samples(mesh: &Mesh, samples: &[f64]) -> Result<Vec<f64>> {
    let n = mesh.n();
    let h = mesh.h();
    let mut load = vec![0.0; n];
    for ((e, x, w), v) in mesh.quadrature_points().into_iter().zip(samples) {
        if !v.is_finite() {
            return Err(Error::Input(format!("load is not finite at x = {x}")));
        }
        let lam = (x - (mesh.a() + e as f64 * h)) / h;
        // element e joins interior nodes e-1 and e (zero-based)
        if e >= 1 {
            load[e - 1] += w * v * (1.0 - lam);
        }
        if e < n {
            load[e] += w * v * lam;
        }
    }
    Ok(load)
}

/// `B(u, v) = u^T (local + nonlocal) v` for the selected operator parts.
pub fn bilinear_eval(u: &GridFunction, v: &GridFunction, sys: &StiffnessSystem) -> Result<f64> {
    if !u.mesh.same_as(&sys.mesh) || !v.mesh.same_as(&sys.mesh) {
        return domain("grid functions and stiffness system use different meshes");
    }
    Ok(sys.matrix().form(&u.coeffs, &v.coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_examples() {
        let m = build_mesh(-1.0, 1.0, 1).unwrap();
        assert_eq!(m.nodes(), &[0.0]);
        assert_eq!(m.h(), 1.0);
        let m = build_mesh(-1.0, 1.0, 3).unwrap();
        assert_eq!(m.nodes(), &[-0.5, 0.0, 0.5]);
        let m = build_mesh(0.0, 2.0, 7).unwrap();
        assert_eq!(m.h(), 0.25);
        assert!(build_mesh(1.0, 1.0, 3).is_err());
        assert!(build_mesh(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn local_examples() {
        let k = local_stiffness(&build_mesh(-1.0, 1.0, 1).unwrap());
        assert_eq!(k.diag, vec![2.0]);
        let k = local_stiffness(&build_mesh(0.0, 1.0, 2).unwrap());
        assert!((k.diag[0] - 6.0).abs() < 1e-12 && (k.off[0] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn log_branch_is_continuous() {
        let c = 1.0;
        for k in 0..6 {
            let mid = reference_entry(k, 0.5, c);
            let near = reference_entry(k, 0.5 + 1e-7, c);
            assert!((mid - near).abs() < 1e-5 * mid.abs(), "k={k}");
        }
    }

    #[test]
    fn load_examples() {
        let m = build_mesh(-1.0, 1.0, 5).unwrap();
        let one = crate::fields::Constant::new(1.0, 1);
        for v in load_vector(&one, &m).unwrap() {
            assert!((v - m.h()).abs() < 1e-14);
        }
        let x = crate::fields::Polynomial {
            coeffs: vec![0.0, 1.0],
        };
        let l = load_vector(&x, &m).unwrap();
        for i in 0..5 {
            assert!((l[i] + l[4 - i]).abs() < 1e-14);
        }
    }
}
