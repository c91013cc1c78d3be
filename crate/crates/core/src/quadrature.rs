//! One-dimensional quadrature rules shared by the kernel and assembly code.
//!
//! Two rules are used throughout: composite Gauss-Legendre for smooth
//! integrands and double-exponential (tanh-sinh) quadrature for integrands
//! with algebraic endpoint singularities, which is what the second-difference
//! form of the fractional Laplacian produces next to kinks.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached 20-point rule.
pub fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Cached 4-point rule (used for load vectors).
pub fn gl4() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(4))
}

/// Integrates `f` over `[a, b]` with the cached 20-point rule.
pub fn gauss20<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (x, w) = gl20();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Compensated::default();
    for (xi, wi) in x.iter().zip(w) {
        acc.add(wi * f(mid + half * xi));
    }
    acc.sum() * half
}

/// Kahan-Babuska compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const TS_MAX_LEVEL: usize = 9;
const TS_T_MAX: f64 = 4.5;

/// Tanh-sinh quadrature of `f` over the finite interval `[a, b]`.
///
/// Nodes are generated from their offset to the nearer endpoint, so
/// integrable algebraic singularities at either end are resolved down to
/// offsets of about 1e-60 of the interval length. Refinement stops once two
/// successive levels agree to `abs_tol + rel_tol * |I|`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let half = 0.5 * (b - a);
    let mut evaluations = 0usize;
    // f at the node t (and -t) with weight already applied
    let sample = |t: f64, evals: &mut usize| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let cosh_u = u.cosh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
        // distance to the endpoint, 1 - tanh(u) = 2 / (1 + e^{2u})
        let off = 2.0 / (1.0 + (2.0 * u).exp());
        let d = half * off;
        let mut acc = 0.0;
        if d > 0.0 && d.is_finite() && w > 0.0 {
            let left = a + d;
            let right = b - d;
            if left > a && left < b {
                acc += w * f(left);
                *evals += 1;
            }
            if right > a && right < b {
                acc += w * f(right);
                *evals += 1;
            }
        }
        acc
    };
    let mut step = 1.0;
    let mut sum = std::f64::consts::FRAC_PI_2 * f(0.5 * (a + b));
    evaluations += 1;
    let mut k = 1;
    while (k as f64) * step <= TS_T_MAX {
        sum += sample(k as f64 * step, &mut evaluations);
        k += 1;
    }
    let mut prev = sum * step * half;
    let mut err = f64::INFINITY;
    for level in 1..=TS_MAX_LEVEL {
        step *= 0.5;
        let mut k = 1;
        while (k as f64) * step <= TS_T_MAX {
            sum += sample(k as f64 * step, &mut evaluations);
            k += 2;
        }
        let cur = sum * step * half;
        if !cur.is_finite() {
            return Err(Error::Accuracy {
                what: "non-finite integrand in tanh-sinh quadrature".into(),
                achieved: f64::INFINITY,
                requested: abs_tol,
            });
        }
        err = (cur - prev).abs();
        prev = cur;
        if err <= abs_tol + rel_tol * cur.abs() && level >= 3 {
            return Ok(Estimate {
                value: cur,
                error: err,
                evaluations,
            });
        }
    }
    Err(Error::Accuracy {
        what: format!("tanh-sinh on [{a:.6e}, {b:.6e}] did not converge"),
        achieved: err,
        requested: abs_tol + rel_tol * prev.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularities() {
        let est = tanh_sinh(|x| x.powf(-0.8), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((est.value - 5.0).abs() < 1e-9, "{}", est.value);
        let est = tanh_sinh(|x| (1.0 - x * x).sqrt(), -1.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((est.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut c = Compensated::default();
        c.add(1e16);
        for _ in 0..10 {
            c.add(1.0);
        }
        c.add(-1e16);
        assert_eq!(c.sum(), 10.0);
    }
}
