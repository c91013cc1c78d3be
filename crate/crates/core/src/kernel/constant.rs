use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature::{gauss20, tanh_sinh, Compensated};

/// Normalization constant `c_{N,s}` of the fractional Laplacian, defined by
/// `c_{N,s}^{-1} = ∫_{R^N} (1 - cos ξ_1) / |ξ|^{N+2s} dξ`.
///
/// The integral factors into a one-dimensional oscillatory integral and a
/// dimension factor, both evaluated by quadrature.
pub fn normalization_constant(dim: usize, s: f64) -> Result<f64> {
    if dim == 0 {
        return domain("dimension must be at least 1");
    }
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("s must lie in (0,1), got {s}"));
    }
    let line = 2.0 * one_minus_cos_integral(s);
    let factor = transverse_factor(dim, s)?;
    let c = 1.0 / (line * factor);
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::Accuracy {
            what: format!("normalization constant for N={dim}, s={s}"),
            achieved: f64::NAN,
            requested: 1e-12,
        });
    }
    Ok(c)
}

/// `∫_0^∞ (1 - cos t) t^{-1-2s} dt`.
fn one_minus_cos_integral(s: f64) -> f64 {
    const EPS: f64 = 0.1;
    const PERIODS: f64 = 64.0;
    let big_t = 2.0 * PI * PERIODS;
    let mut acc = Compensated::default();

    // [0, EPS] from the power series of 1 - cos t
    let mut fact = 1.0;
    for k in 1..=8 {
        let p = 2 * k;
        fact *= ((p - 1) * p) as f64;
        let e = p as f64 - 2.0 * s;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        acc.add(sign * EPS.powf(e) / (fact * e));
    }

    // [EPS, T] piecewise over half periods
    let f = |t: f64| (1.0 - t.cos()) * t.powf(-1.0 - 2.0 * s);
    let mut a = EPS;
    while 2.0 * a < PI {
        acc.add(gauss20(f, a, 2.0 * a));
        a *= 2.0;
    }
    acc.add(gauss20(f, a, PI));
    let mut k = 1.0;
    while k < 2.0 * PERIODS {
        acc.add(gauss20(f, k * PI, (k + 1.0) * PI));
        k += 1.0;
    }

    // [T, ∞): ∫ t^{-a} minus the asymptotic series of ∫ cos t t^{-a}, using
    // sin T = 0 and cos T = 1
    let a = 1.0 + 2.0 * s;
    acc.add(big_t.powf(-2.0 * s) / (2.0 * s));
    let mut coef = a;
    let mut pow = big_t.powf(-a - 1.0);
    let mut cos_tail = 0.0;
    for k in 0..8 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        cos_tail += sign * coef * pow;
        let m = a + 2.0 * k as f64;
        coef *= (m + 1.0) * (m + 2.0);
        pow /= big_t * big_t;
    }
    acc.add(-cos_tail);
    acc.sum()
}

/// `∫_{R^{N-1}} (1 + |y|^2)^{-(N+2s)/2} dy`, equal to 1 when N = 1.
fn transverse_factor(dim: usize, s: f64) -> Result<f64> {
    if dim == 1 {
        return Ok(1.0);
    }
    let n = dim as f64;
    let q = -(n + 2.0 * s) / 2.0;
    let inner = tanh_sinh(
        |r: f64| r.powi(dim as i32 - 2) * (1.0 + r * r).powf(q),
        0.0,
        1.0,
        1e-17,
        1e-15,
    )?;
    let outer = tanh_sinh(
        |t: f64| t.powf(2.0 * s) * (1.0 + t * t).powf(q),
        0.0,
        1.0,
        1e-17,
        1e-15,
    )?;
    Ok(sphere_area(dim - 2) * (inner.value + outer.value))
}

/// Surface area of the unit sphere `S^k ⊂ R^{k+1}`.
pub(crate) fn sphere_area(k: usize) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(k - 2) / (k as f64 - 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let c = normalization_constant(1, 0.5).unwrap();
        assert!((c - 1.0 / PI).abs() < 1e-14);
        let c = normalization_constant(2, 0.5).unwrap();
        assert!((c - 0.5 / PI).abs() < 1e-14);
        let c = normalization_constant(3, 0.5).unwrap();
        assert!((c - 1.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(normalization_constant(1, 0.0).is_err());
        assert!(normalization_constant(1, 1.0).is_err());
        assert!(normalization_constant(1, f64::NAN).is_err());
    }
}
