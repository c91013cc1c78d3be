use super::build::BarrierParams;
use super::fields::GammaField;
use crate::error::{domain, Error, Result};
use crate::fields::Radial;
use crate::kernel::{sphere_area, Kink, OperatorParams, ScalarField, TailClass};
use crate::quadrature::tanh_sinh;

/// Rejects truncation radii that do not exceed `4 ρ_Ω`.
pub fn check_truncation(r: f64, rho_omega: f64) -> Result<()> {
    if !(r > 4.0 * rho_omega) || !(rho_omega > 0.0) {
        return domain(format!(
            "truncation radius {r} must exceed 4 times the domain radius {rho_omega}"
        ));
    }
    Ok(())
}

/// `Θ(x) = γ(x_1) φ(x)`.
pub fn theta<C: ScalarField + ?Sized>(x: &[f64], p: &BarrierParams, cutoff: &C) -> f64 {
    p.gamma(x[0]) * cutoff.value(x)
}

/// `Θ` with the smooth plateau cutoff equal to 1 on `B_R` and 0 off `B_{2R}`.
#[derive(Debug, Clone)]
pub struct ThetaField {
    gamma: GammaField,
    cutoff: Radial,
    dim: usize,
    r: f64,
}

impl ThetaField {
    pub fn new(p: &BarrierParams, dim: usize, rho_omega: f64) -> Result<Self> {
        check_truncation(p.r, rho_omega)?;
        Ok(Self {
            gamma: p.gamma_field(),
            cutoff: Radial::plateau(dim, p.r, 2.0 * p.r, 1.0),
            dim,
            r: p.r,
        })
    }

    pub fn cutoff(&self) -> &Radial {
        &self.cutoff
    }
}

impl ScalarField for ThetaField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.gamma.eval(x[0])[0] * self.cutoff.value(x)
    }
    /// Available inside `B_R`, where the cutoff is identically one.
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        if crate::kernel::norm_of(x) < self.r {
            Some(self.gamma.eval(x[0])[1] * dir[0] * dir[0])
        } else {
            None
        }
    }
    fn kinks(&self) -> Vec<Kink> {
        let mut k = self.gamma.kinks();
        k.extend(self.cutoff.kinks());
        k
    }
    fn tail(&self) -> TailClass {
        TailClass::CompactSupport {
            radius: 2.0 * self.r,
        }
    }
}

/// `∫_R^∞ (1 + r)^p r^{N-1} / (1 + r^{N+2s}) dr`, integrated in `t = R/r`.
fn radial_tail(r: f64, n: usize, s: f64, p: f64) -> Result<f64> {
    let f = |t: f64| {
        let y = r / t;
        (1.0 + y).powf(p) * y.powi(n as i32 - 1) / (1.0 + y.powf(n as f64 + 2.0 * s)) * r / (t * t)
    };
    Ok(tanh_sinh(f, 0.0, 1.0, 1e-14, 1e-12)?.value)
}

/// Weighted tail mass `κ(R) = ∫_{|y|>=R} |g(y)| / (1 + |y|^{N+2s}) dy`, from
/// the tail class of `g` (an upper bound for bounded and power-growth tails).
pub fn tail_kappa<G: ScalarField + ?Sized>(r: f64, g: &G, params: &OperatorParams) -> Result<f64> {
    if !(r > 0.0) {
        return domain(format!("tail radius must be positive, got {r}"));
    }
    let (n, s) = (params.dim(), params.s());
    let area = sphere_area(n - 1);
    match g.tail() {
        TailClass::CompactSupport { radius } if r >= radius => Ok(0.0),
        TailClass::EventuallyConstant {
            radius,
            left,
            right,
        } if r >= radius => {
            let weight = if n == 1 {
                0.5 * (left.abs() + right.abs())
            } else {
                right.abs()
            };
            Ok(weight * area * radial_tail(r, n, s, 0.0)?)
        }
        TailClass::Bounded { bound } => Ok(bound.abs() * area * radial_tail(r, n, s, 0.0)?),
        TailClass::PowerGrowth { exponent, scale } => {
            if exponent >= 2.0 * s {
                return Err(Error::TailDivergence(format!(
                    "growth exponent {exponent} is not below 2s = {}",
                    2.0 * s
                )));
            }
            Ok(scale.abs() * area * radial_tail(r, n, s, exponent.max(0.0))?)
        }
        other => domain(format!(
            "tail radius {r} lies inside the non-constant region of {other:?}"
        )),
    }
}
