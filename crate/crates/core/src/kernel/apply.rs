use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::field::{norm, ScalarField, TailClass};
use super::{LocalSign, OperatorParams, QuadratureSpec};
use crate::error::{domain, Error, Result};
use crate::quadrature::{gauss_legendre, gl20, tanh_sinh, Compensated};

/// Smallest admissible distance from the evaluation point to a kink.
pub(crate) const MIN_SMOOTH_ZONE: f64 = 1e-12;
/// The innermost piece `[0, INNER_FRACTION * t_1]` of each line integral is
/// integrated from the fourth-order Taylor expansion of the second difference.
const INNER_FRACTION: f64 = 1e-2;
/// Largest ratio between the endpoints of a single tanh-sinh segment.
const SEGMENT_RATIO: f64 = 16.0;
/// Upper limit for `ln(Z / R)` in numerically integrated tails.
const MAX_LOG_TAIL: f64 = 650.0;

/// Value of the weighted tail integral `∫ |u(y)| / (1 + |y|^{N+2s}) dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum TailIntegral {
    Finite(f64),
    Infinite,
}

impl TailIntegral {
    pub fn is_finite(&self) -> bool {
        matches!(self, TailIntegral::Finite(_))
    }
}

/// Pointwise fractional Laplacian `(-Δ)^s u(x)`.
///
/// Fails with a domain error when `x` is within `1e-12` of a kink of `u` or
/// the dimensions disagree, with a tail divergence error when `u` grows too
/// fast, and with an accuracy error when the quadrature does not converge.
pub fn frac_apply<F: ScalarField + ?Sized>(
    u: &F,
    x: &[f64],
    params: &OperatorParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    check_point(u, x, params)?;
    let s = params.s();
    if !u.tail().admissible(s) {
        return Err(Error::TailDivergence(format!(
            "tail {:?} is not integrable against |z|^(-N-2s) for s = {s}",
            u.tail()
        )));
    }
    if u.kink_distance(x) <= MIN_SMOOTH_ZONE {
        return domain(format!(
            "evaluation point {x:?} lies within {MIN_SMOOTH_ZONE:e} of a kink"
        ));
    }
    let c = params.c_ns();
    let ux = u.value(x);
    if !ux.is_finite() {
        return Err(Error::Input(format!("field is not finite at {x:?}")));
    }
    match params.dim() {
        1 => Ok(-c * line_integral(u, x, &[1.0], ux, s, c, quad)?),
        2 => {
            let sphere = angular_average(
                |m| {
                    let mut acc = Compensated::default();
                    for k in 0..m {
                        let th = PI * k as f64 / m as f64;
                        let dir = [th.cos(), th.sin()];
                        acc.add(line_integral(u, x, &dir, ux, s, c, quad)?);
                    }
                    Ok(2.0 * PI / m as f64 * acc.sum())
                },
                16,
                1024,
                quad.tolerance,
            )?;
            Ok(-0.5 * c * sphere)
        }
        3 => {
            let sphere = angular_average(
                |m| {
                    let k = m / 2;
                    let (mu, w) = gauss_legendre(k);
                    let mut acc = Compensated::default();
                    for (mi, wi) in mu.iter().zip(&w) {
                        let mu = 0.5 * (mi + 1.0);
                        let rho = (1.0 - mu * mu).sqrt();
                        for j in 0..m {
                            let ph = 2.0 * PI * j as f64 / m as f64;
                            let dir = [mu, rho * ph.cos(), rho * ph.sin()];
                            let li = line_integral(u, x, &dir, ux, s, c, quad)?;
                            acc.add(0.5 * wi * li);
                        }
                    }
                    // the hemisphere μ > 0 covers the sphere twice by symmetry
                    Ok(2.0 * 2.0 * PI / m as f64 * acc.sum())
                },
                16,
                128,
                quad.tolerance,
            )?;
            Ok(-0.5 * c * sphere)
        }
        n => domain(format!("pointwise evaluation supports N in 1..=3, got {n}")),
    }
}

/// Pointwise mixed operator `∓Δu(x) + (-Δ)^s u(x)` with the sign taken from
/// `params`.
pub fn mixed_apply<F: ScalarField + ?Sized>(
    u: &F,
    x: &[f64],
    params: &OperatorParams,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let frac = frac_apply(u, x, params, quad)?;
    let lap = u
        .laplacian(x)
        .ok_or_else(|| Error::Domain(format!("field has no second derivatives at {x:?}")))?;
    Ok(match params.local_sign() {
        LocalSign::Minus => -lap + frac,
        LocalSign::Plus => lap + frac,
    })
}

/// Weighted tail integral `∫_{R^N} |u(y)| / (1 + |y|^{N+2s}) dy`.
pub fn tail_integral<F: ScalarField + ?Sized>(u: &F, params: &OperatorParams) -> TailIntegral {
    let s = params.s();
    let tail = u.tail();
    if !tail.admissible(s) {
        return TailIntegral::Infinite;
    }
    let n = params.dim();
    let value = match n {
        1 => ray_weighted(u, &[1.0], s, n) + ray_weighted(u, &[-1.0], s, n),
        2 => {
            let m = 64;
            (0..m)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / m as f64;
                    ray_weighted(u, &[th.cos(), th.sin()], s, n)
                })
                .sum::<f64>()
                * 2.0
                * PI
                / m as f64
        }
        _ => {
            let (mu, w) = gauss_legendre(16);
            let m = 32;
            let mut acc = 0.0;
            for (mi, wi) in mu.iter().zip(&w) {
                let rho = (1.0 - mi * mi).sqrt();
                for j in 0..m {
                    let ph = 2.0 * PI * j as f64 / m as f64;
                    let dir = [*mi, rho * ph.cos(), rho * ph.sin()];
                    acc += wi * ray_weighted(u, &dir, s, n);
                }
            }
            acc * 2.0 * PI / m as f64
        }
    };
    if value.is_finite() {
        TailIntegral::Finite(value)
    } else {
        TailIntegral::Infinite
    }
}

fn check_point<F: ScalarField + ?Sized>(u: &F, x: &[f64], params: &OperatorParams) -> Result<()> {
    if x.len() != params.dim() || u.dim() != params.dim() {
        return domain(format!(
            "dimension mismatch: point has {}, field {}, operator {}",
            x.len(),
            u.dim(),
            params.dim()
        ));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return domain("evaluation point is not finite");
    }
    Ok(())
}

/// Refines an angular rule by doubling the number of directions until two
/// successive estimates agree.
fn angular_average<G>(rule: G, start: usize, max: usize, tol: f64) -> Result<f64>
where
    G: Fn(usize) -> Result<f64>,
{
    let mut m = start;
    let mut prev = rule(m)?;
    while m < max {
        m *= 2;
        let cur = rule(m)?;
        if (cur - prev).abs() <= 0.1 * tol * (1.0 + cur.abs()) {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

/// `∫_0^∞ (u(x+tω) + u(x-tω) - 2u(x)) t^{-1-2s} dt`.
fn line_integral<F: ScalarField + ?Sized>(
    u: &F,
    x: &[f64],
    dir: &[f64],
    ux: f64,
    s: f64,
    c: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let n = x.len();
    let xr = norm(x);
    let mut breaks = Vec::new();
    for k in u.kinks() {
        k.crossings(x, dir, &mut breaks);
    }
    let mut breaks: Vec<f64> = breaks
        .into_iter()
        .map(f64::abs)
        .filter(|t| t.is_finite() && *t > 0.0)
        .collect();
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());

    let tail = u.tail();
    let far = breaks.last().copied().unwrap_or(0.0);
    let radius = match tail {
        TailClass::CompactSupport { radius } | TailClass::EventuallyConstant { radius, .. } => {
            (radius + xr).max(quad.inner_radius)
        }
        TailClass::Bounded { .. } | TailClass::PowerGrowth { .. } => {
            quad.outer_radius.max(1.0 + xr).max(far * 1.5)
        }
    };
    breaks.retain(|t| *t < radius);

    let point =
        |t: f64, sign: f64| -> Vec<f64> { (0..n).map(|i| x[i] + sign * t * dir[i]).collect() };
    let second_difference = |t: f64| u.value(&point(t, 1.0)) + u.value(&point(t, -1.0)) - 2.0 * ux;

    let t1 = breaks
        .first()
        .copied()
        .unwrap_or(f64::INFINITY)
        .min(quad.inner_radius)
        .min(radius);
    if t1 <= MIN_SMOOTH_ZONE {
        return domain(format!("kink within {MIN_SMOOTH_ZONE:e} of {x:?}"));
    }
    let t0 = INNER_FRACTION * t1;
    // D(z) = Δ²u(z) / z² = u'' + u'''' z² / 12 + O(z⁴)
    let d = |z: f64| second_difference(z) / (z * z);
    let (upp, u4) = match u.second_derivative(x, dir) {
        Some(v) => (v, 12.0 * (d(t0) - v) / (t0 * t0)),
        None => {
            let (d1, d2) = (d(t0), d(0.5 * t0));
            let u4 = 16.0 * (d1 - d2) / (t0 * t0);
            (d2 - u4 * t0 * t0 / 48.0, u4)
        }
    };
    let inner = upp * t0.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        + u4 / 12.0 * t0.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s);

    // segment end points: geometric refinement of [t0, t1], then kinks, then R
    let mut nodes = vec![t0];
    for b in std::iter::once(t1)
        .chain(breaks.iter().copied().filter(|t| *t > t1))
        .chain(std::iter::once(radius))
    {
        let last = *nodes.last().unwrap();
        if b <= last * (1.0 + 1e-14) {
            continue;
        }
        let mut a = last;
        while b / a > SEGMENT_RATIO {
            a *= SEGMENT_RATIO;
            nodes.push(a);
        }
        nodes.push(b);
    }

    let scale = {
        let mut m = ux.abs() * t1.powf(-2.0 * s) / (2.0 * s) + upp.abs() * t1.powf(2.0 - 2.0 * s);
        for w in nodes.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            m = m.max(second_difference(mid).abs() * w[0].powf(-2.0 * s) / (2.0 * s));
        }
        m.max(1.0 / c)
    };
    let segments = nodes.len();
    let abs_tol = 0.1 * quad.tolerance * scale / segments as f64;
    let rel_tol = 0.1 * quad.tolerance;

    let mut acc = Compensated::default();
    acc.add(inner);
    let expo = -1.0 - 2.0 * s;
    for w in nodes.windows(2) {
        let est = tanh_sinh(
            |t| second_difference(t) * t.powf(expo),
            w[0],
            w[1],
            abs_tol,
            rel_tol,
        )?;
        acc.add(est.value);
    }

    let tail_value = match tail {
        TailClass::CompactSupport { .. } => -2.0 * ux * radius.powf(-2.0 * s) / (2.0 * s),
        TailClass::EventuallyConstant { left, right, .. } => {
            if n > 1 && left != right {
                return domain("eventually constant tails must be symmetric when N > 1");
            }
            (left + right - 2.0 * ux) * radius.powf(-2.0 * s) / (2.0 * s)
        }
        TailClass::Bounded { bound } => {
            let rem = |z: f64| (2.0 * bound + 2.0 * ux.abs()) * z.powf(-2.0 * s) / (2.0 * s);
            log_tail(
                |t| second_difference(t) * t.powf(-2.0 * s),
                radius,
                rem,
                abs_tol,
                quad.panels,
            )?
        }
        TailClass::PowerGrowth { exponent, scale } => {
            let p = exponent;
            let rem = |z: f64| {
                2.0 * scale * 2f64.powf(p.max(0.0)) * z.powf(p - 2.0 * s) / (2.0 * s - p)
                    + 2.0 * ux.abs() * z.powf(-2.0 * s) / (2.0 * s)
            };
            log_tail(
                |t| second_difference(t) * t.powf(-2.0 * s),
                radius,
                rem,
                abs_tol,
                quad.panels,
            )?
        }
    };
    acc.add(tail_value);
    Ok(acc.sum())
}

/// `∫_R^Z g(t) dt/t` on a logarithmic grid, with Z chosen so that the
/// remainder bound `rem(Z)` is below `tol`.
fn log_tail<G, B>(g: G, radius: f64, rem: B, tol: f64, panels: usize) -> Result<f64>
where
    G: Fn(f64) -> f64,
    B: Fn(f64) -> f64,
{
    let mut tau_max: f64 = 1.0;
    while rem(radius * tau_max.exp()) > tol {
        tau_max += 1.0;
        if tau_max > MAX_LOG_TAIL {
            return Err(Error::Accuracy {
                what: "tail remainder does not fall below tolerance".into(),
                achieved: rem(radius * MAX_LOG_TAIL.exp()),
                requested: tol,
            });
        }
    }
    let (x, w) = gl20();
    let h = 1.0 / panels as f64;
    let count = (tau_max * panels as f64).ceil() as usize;
    let mut acc = Compensated::default();
    for k in 0..count {
        let a = k as f64 * h;
        for (xi, wi) in x.iter().zip(w) {
            let tau = a + 0.5 * h * (xi + 1.0);
            acc.add(0.5 * h * wi * g(radius * tau.exp()));
        }
    }
    Ok(acc.sum())
}

/// `∫_0^∞ |u(rω)| r^{N-1} / (1 + r^{N+2s}) dr`.
fn ray_weighted<F: ScalarField + ?Sized>(u: &F, dir: &[f64], s: f64, n: usize) -> f64 {
    let origin = vec![0.0; n];
    let mut breaks = Vec::new();
    for k in u.kinks() {
        k.crossings(&origin, dir, &mut breaks);
    }
    let mut breaks: Vec<f64> = breaks
        .into_iter()
        .filter(|t| *t > 0.0 && t.is_finite())
        .collect();
    breaks.sort_by(f64::total_cmp);
    let q = n as f64 + 2.0 * s;
    let weight = |r: f64| r.powi(n as i32 - 1) / (1.0 + r.powf(q));
    let at = |r: f64| -> f64 {
        let p: Vec<f64> = dir.iter().map(|d| d * r).collect();
        u.value(&p).abs()
    };
    let tail = u.tail();
    let far = breaks.last().copied().unwrap_or(0.0);
    let radius = match tail {
        TailClass::CompactSupport { radius } | TailClass::EventuallyConstant { radius, .. } => {
            radius.max(1e-3)
        }
        _ => (2.0 * far).max(8.0),
    };
    breaks.retain(|t| *t < radius);
    let mut nodes = vec![0.0];
    nodes.extend(breaks);
    nodes.push(radius);
    let mut total = 0.0;
    for w in nodes.windows(2) {
        total += lenient(|r| at(r) * weight(r), w[0], w[1]);
    }
    let tol = 1e-10;
    let tail_part = match tail {
        TailClass::CompactSupport { .. } => Ok(0.0),
        TailClass::EventuallyConstant { left, right, .. } => {
            let v = if dir[0] < 0.0 {
                left.abs()
            } else {
                right.abs()
            };
            log_tail(
                |r| v * weight(r) * r,
                radius,
                |z| v * z.powf(-2.0 * s) / (2.0 * s),
                tol,
                1,
            )
        }
        TailClass::Bounded { bound } => log_tail(
            |r| at(r) * weight(r) * r,
            radius,
            |z| bound * z.powf(-2.0 * s) / (2.0 * s),
            tol,
            1,
        ),
        TailClass::PowerGrowth { exponent, scale } => log_tail(
            |r| at(r) * weight(r) * r,
            radius,
            |z| {
                scale * 2f64.powf(exponent.max(0.0)) * z.powf(exponent - 2.0 * s)
                    / (2.0 * s - exponent)
            },
            tol,
            1,
        ),
    };
    match tail_part {
        Ok(v) => total + v,
        Err(_) => f64::INFINITY,
    }
}

/// Integration that falls back to composite Gauss rules when the integrand
/// is not smooth enough for tanh-sinh to certify convergence.
fn lenient<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> f64 {
    match tanh_sinh(&g, a, b, 1e-12, 1e-10) {
        Ok(e) => e.value,
        Err(_) => {
            let m = 64;
            let h = (b - a) / m as f64;
            (0..m)
                .map(|k| crate::quadrature::gauss20(&g, a + k as f64 * h, a + (k + 1) as f64 * h))
                .sum()
        }
    }
}
