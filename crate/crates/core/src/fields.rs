//! Concrete fields used by the solvers, the barrier construction and the
//! verification checks.

use std::sync::Arc;

use crate::error::{domain, Result};
use crate::kernel::{Kink, ScalarField, TailClass};

/// The constant function on `R^N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant {
    pub value: f64,
    pub dim: usize,
}

impl Constant {
    pub fn new(value: f64, dim: usize) -> Self {
        Self { value, dim }
    }
}

impl ScalarField for Constant {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _x: &[f64]) -> f64 {
        self.value
    }
    fn second_derivative(&self, _x: &[f64], _dir: &[f64]) -> Option<f64> {
        Some(0.0)
    }
    fn tail(&self) -> TailClass {
        TailClass::EventuallyConstant {
            radius: 0.0,
            left: self.value,
            right: self.value,
        }
    }
}

/// The one-dimensional ramp `x_+^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRamp {
    pub alpha: f64,
}

impl ScalarField for PowerRamp {
    fn value(&self, x: &[f64]) -> f64 {
        if x[0] > 0.0 {
            x[0].powf(self.alpha)
        } else {
            0.0
        }
    }
    fn second_derivative(&self, x: &[f64], _dir: &[f64]) -> Option<f64> {
        let a = self.alpha;
        Some(if x[0] > 0.0 {
            a * (a - 1.0) * x[0].powf(a - 2.0)
        } else {
            0.0
        })
    }
    fn kinks(&self) -> Vec<Kink> {
        vec![Kink::Point(0.0)]
    }
    fn tail(&self) -> TailClass {
        TailClass::PowerGrowth {
            exponent: self.alpha,
            scale: 1.0,
        }
    }
}

/// `x_+^α` capped at `x = cap`, constant equal to `cap^α` beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedPower {
    pub alpha: f64,
    pub cap: f64,
}

impl ScalarField for TruncatedPower {
    fn value(&self, x: &[f64]) -> f64 {
        let t = x[0];
        if t <= 0.0 {
            0.0
        } else {
            t.min(self.cap).powf(self.alpha)
        }
    }
    fn second_derivative(&self, x: &[f64], _dir: &[f64]) -> Option<f64> {
        let (t, a) = (x[0], self.alpha);
        Some(if t > 0.0 && t < self.cap {
            a * (a - 1.0) * t.powf(a - 2.0)
        } else {
            0.0
        })
    }
    fn kinks(&self) -> Vec<Kink> {
        vec![Kink::Point(0.0), Kink::Point(self.cap)]
    }
    fn tail(&self) -> TailClass {
        TailClass::EventuallyConstant {
            radius: self.cap,
            left: 0.0,
            right: self.cap.powf(self.alpha),
        }
    }
}

/// A polynomial `Σ c_k x^k` in one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl ScalarField for Polynomial {
    fn value(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x[0] + c)
    }
    fn second_derivative(&self, x: &[f64], _dir: &[f64]) -> Option<f64> {
        let mut acc = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(2).rev() {
            acc = acc * x[0] + c * (k * (k - 1)) as f64;
        }
        Some(acc)
    }
    fn tail(&self) -> TailClass {
        let degree = self.coeffs.iter().rposition(|c| *c != 0.0).unwrap_or(0);
        TailClass::PowerGrowth {
            exponent: degree as f64,
            scale: self.coeffs.iter().map(|c| c.abs()).sum::<f64>().max(1e-300),
        }
    }
}

/// Piecewise linear interpolant of samples, zero outside the sample range.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return domain("piecewise linear data needs at least two matching samples");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("sample abscissae must be strictly increasing");
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return domain("samples must be finite");
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }
}

impl ScalarField for PiecewiseLinear {
    fn value(&self, x: &[f64]) -> f64 {
        interpolate(&self.xs, &self.ys, x[0])
    }
    fn second_derivative(&self, _x: &[f64], _dir: &[f64]) -> Option<f64> {
        Some(0.0)
    }
    fn kinks(&self) -> Vec<Kink> {
        self.xs.iter().map(|x| Kink::Point(*x)).collect()
    }
    fn tail(&self) -> TailClass {
        let r = self.xs[0].abs().max(self.xs[self.xs.len() - 1].abs());
        TailClass::CompactSupport { radius: r }
    }
}

/// Linear interpolation of `(xs, ys)` at `t`, zero outside `[xs_0, xs_last]`.
pub(crate) fn interpolate(xs: &[f64], ys: &[f64], t: f64) -> f64 {
    let n = xs.len();
    if !(t >= xs[0] && t <= xs[n - 1]) {
        return 0.0;
    }
    let k = xs.partition_point(|v| *v <= t).clamp(1, n - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let w = (t - x0) / (x1 - x0);
    ys[k - 1] * (1.0 - w) + ys[k] * w
}

/// Profile of a radial field: value, first and second derivative in `r`.
pub type Profile = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// A radial function `u(x) = f(|x|)`.
#[derive(Clone)]
pub struct Radial {
    dim: usize,
    profile: Profile,
    kink_radii: Vec<f64>,
    tail: TailClass,
}

impl std::fmt::Debug for Radial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Radial")
            .field("dim", &self.dim)
            .field("kink_radii", &self.kink_radii)
            .field("tail", &self.tail)
            .finish()
    }
}

impl Radial {
    pub fn new(dim: usize, profile: Profile, kink_radii: Vec<f64>, tail: TailClass) -> Self {
        Self {
            dim,
            profile,
            kink_radii,
            tail,
        }
    }

    /// `(1 - |x|^2/r^2)_+^p`.
    pub fn bump(dim: usize, radius: f64, power: f64) -> Self {
        let r2 = radius * radius;
        let profile: Profile = Arc::new(move |r: f64| {
            let q = 1.0 - r * r / r2;
            if q <= 0.0 {
                return [0.0; 3];
            }
            let f = q.powf(power);
            let dq = -2.0 * r / r2;
            let d1 = power * q.powf(power - 1.0) * dq;
            let d2 = power * (power - 1.0) * q.powf(power - 2.0) * dq * dq
                + power * q.powf(power - 1.0) * (-2.0 / r2);
            [f, d1, d2]
        });
        Self::new(
            dim,
            profile,
            vec![radius],
            TailClass::CompactSupport { radius },
        )
    }

    /// Equal to `height` on `|x| <= r_in`, zero beyond `r_out`, joined by a
    /// `C^3` smoothstep.
    pub fn plateau(dim: usize, r_in: f64, r_out: f64, height: f64) -> Self {
        let profile: Profile = Arc::new(move |r: f64| {
            let [f, d1, d2] = step_down(r, r_in, r_out);
            [height * f, height * d1, height * d2]
        });
        Self::new(
            dim,
            profile,
            vec![r_in, r_out],
            TailClass::CompactSupport { radius: r_out },
        )
    }

    /// The profile `((r/ε)^2 - 1)` on `r <= ε`, zero outside.
    pub fn parabola_cap(dim: usize, eps: f64) -> Self {
        let profile: Profile = Arc::new(move |r: f64| {
            if r >= eps {
                [0.0; 3]
            } else {
                let e2 = eps * eps;
                [r * r / e2 - 1.0, 2.0 * r / e2, 2.0 / e2]
            }
        });
        Self::new(
            dim,
            profile,
            vec![eps],
            TailClass::CompactSupport { radius: eps },
        )
    }

    pub fn profile(&self, r: f64) -> [f64; 3] {
        (self.profile)(r)
    }
}

impl ScalarField for Radial {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.profile)(crate::kernel::norm_of(x))[0]
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        let r = crate::kernel::norm_of(x);
        let [_, d1, d2] = (self.profile)(r);
        if r < 1e-14 {
            return Some(d2);
        }
        let c: f64 = x.iter().zip(dir).map(|(a, b)| a * b).sum::<f64>() / r;
        Some(d2 * c * c + d1 / r * (1.0 - c * c))
    }
    fn kinks(&self) -> Vec<Kink> {
        self.kink_radii.iter().map(|r| Kink::Sphere(*r)).collect()
    }
    fn tail(&self) -> TailClass {
        self.tail
    }
}

/// Septic smoothstep `S(t) = 35t^4 - 84t^5 + 70t^6 - 20t^7` on `[0, 1]`
/// with its first two derivatives.
pub fn smoothstep(t: f64) -> [f64; 3] {
    if t <= 0.0 {
        return [0.0; 3];
    }
    if t >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let t2 = t * t;
    let t3 = t2 * t;
    let f = t3 * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
    let d1 = 140.0 * t3 * (1.0 - t).powi(3);
    let d2 = 420.0 * t2 * (1.0 - t).powi(2) * (1.0 - 2.0 * t);
    [f, d1, d2]
}

/// Smooth transition from 1 (for `r <= a`) to 0 (for `r >= b`).
pub fn step_down(r: f64, a: f64, b: f64) -> [f64; 3] {
    let h = b - a;
    let [f, d1, d2] = smoothstep((b - r) / h);
    [f, -d1 / h, d2 / (h * h)]
}

/// Smooth transition from 0 (for `r <= a`) to 1 (for `r >= b`).
pub fn step_up(r: f64, a: f64, b: f64) -> [f64; 3] {
    let h = b - a;
    let [f, d1, d2] = smoothstep((r - a) / h);
    [f, d1 / h, d2 / (h * h)]
}

/// Product rule for `[f, f', f'']` triples.
pub fn product(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[0] * b[0],
        a[1] * b[0] + a[0] * b[1],
        a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
    ]
}

/// `Σ_k w_k u_k`.
#[derive(Clone, Default)]
pub struct Combination {
    terms: Vec<(f64, Arc<dyn ScalarField>)>,
}

impl Combination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, weight: f64, field: Arc<dyn ScalarField>) -> Self {
        self.terms.push((weight, field));
        self
    }
}

impl ScalarField for Combination {
    fn dim(&self) -> usize {
        self.terms.first().map_or(1, |t| t.1.dim())
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(w, u)| w * u.value(x)).sum()
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        let mut acc = 0.0;
        for (w, u) in &self.terms {
            acc += w * u.second_derivative(x, dir)?;
        }
        Some(acc)
    }
    fn kinks(&self) -> Vec<Kink> {
        self.terms.iter().flat_map(|t| t.1.kinks()).collect()
    }
    fn tail(&self) -> TailClass {
        combine_tails(self.terms.iter().map(|(w, u)| (*w, u.tail())))
    }
}

/// Tail class of a linear combination.
pub fn combine_tails(tails: impl Iterator<Item = (f64, TailClass)>) -> TailClass {
    let mut radius = 0.0f64;
    let (mut left, mut right) = (0.0, 0.0);
    let mut bound = 0.0;
    let mut growth: Option<(f64, f64)> = None;
    let mut bounded_only = false;
    for (w, t) in tails {
        match t {
            TailClass::CompactSupport { radius: r } => {
                radius = radius.max(r);
            }
            TailClass::EventuallyConstant {
                radius: r,
                left: l,
                right: rr,
            } => {
                radius = radius.max(r);
                left += w * l;
                right += w * rr;
                bound += w.abs() * l.abs().max(rr.abs());
            }
            TailClass::Bounded { bound: b } => {
                bounded_only = true;
                bound += w.abs() * b;
            }
            TailClass::PowerGrowth { exponent, scale } => {
                let (e, sc) = growth.unwrap_or((0.0, 0.0));
                growth = Some((e.max(exponent), sc + w.abs() * scale));
            }
        }
    }
    if let Some((exponent, scale)) = growth {
        return TailClass::PowerGrowth {
            exponent,
            scale: scale + bound,
        };
    }
    if bounded_only {
        return TailClass::Bounded { bound };
    }
    if left == 0.0 && right == 0.0 {
        TailClass::CompactSupport { radius }
    } else {
        TailClass::EventuallyConstant {
            radius,
            left,
            right,
        }
    }
}

type ValueFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type SecondFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A field given by closures, with explicitly declared kinks and tail.
#[derive(Clone)]
pub struct FnField {
    dim: usize,
    value: ValueFn,
    second: Option<SecondFn>,
    kinks: Vec<Kink>,
    tail: TailClass,
}

impl FnField {
    pub fn new(dim: usize, value: ValueFn, kinks: Vec<Kink>, tail: TailClass) -> Self {
        Self {
            dim,
            value,
            second: None,
            kinks,
            tail,
        }
    }

    pub fn with_second_derivative(mut self, second: SecondFn) -> Self {
        self.second = Some(second);
        self
    }
}

impl ScalarField for FnField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        self.second.as_ref().map(|f| f(x, dir))
    }
    fn kinks(&self) -> Vec<Kink> {
        self.kinks.clone()
    }
    fn tail(&self) -> TailClass {
        self.tail
    }
}

/// The one-dimensional translate `u(x - shift)`.
#[derive(Clone)]
pub struct Shifted<F> {
    pub inner: F,
    pub shift: f64,
}

impl<F: ScalarField> ScalarField for Shifted<F> {
    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(&[x[0] - self.shift])
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        self.inner.second_derivative(&[x[0] - self.shift], dir)
    }
    fn kinks(&self) -> Vec<Kink> {
        let mut out = Vec::new();
        for k in self.inner.kinks() {
            match k {
                Kink::Point(c) => out.push(Kink::Point(c + self.shift)),
                Kink::Sphere(r) => {
                    out.push(Kink::Point(self.shift - r));
                    out.push(Kink::Point(self.shift + r));
                }
            }
        }
        out
    }
    fn tail(&self) -> TailClass {
        match self.inner.tail() {
            TailClass::CompactSupport { radius } => TailClass::CompactSupport {
                radius: radius + self.shift.abs(),
            },
            TailClass::EventuallyConstant {
                radius,
                left,
                right,
            } => TailClass::EventuallyConstant {
                radius: radius + self.shift.abs(),
                left,
                right,
            },
            TailClass::PowerGrowth { exponent, scale } => TailClass::PowerGrowth {
                exponent,
                scale: scale * (1.0 + self.shift.abs()).powf(exponent.max(0.0)),
            },
            t => t,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_is_c2() {
        let [f0, d0, _] = smoothstep(0.5);
        assert!((f0 - 0.5).abs() < 1e-15);
        assert!(d0 > 0.0);
        let h = 1e-5;
        for t in [0.1, 0.3, 0.7, 0.95] {
            let fd = (smoothstep(t + h)[0] - smoothstep(t - h)[0]) / (2.0 * h);
            assert!((fd - smoothstep(t)[1]).abs() < 1e-8);
            let fd2 = (smoothstep(t + h)[1] - smoothstep(t - h)[1]) / (2.0 * h);
            assert!((fd2 - smoothstep(t)[2]).abs() < 1e-6);
        }
    }

    #[test]
    fn radial_second_derivative_matches_differences() {
        let u = Radial::bump(2, 1.0, 3.0);
        let x = [0.3, -0.2];
        let dir = [0.6, 0.8];
        let h = 1e-4;
        let p = |t: f64| [x[0] + t * dir[0], x[1] + t * dir[1]];
        let fd = (u.value(&p(h)) + u.value(&p(-h)) - 2.0 * u.value(&x)) / (h * h);
        assert!((fd - u.second_derivative(&x, &dir).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn polynomial_and_interpolation() {
        let p = Polynomial {
            coeffs: vec![1.0, 2.0, 3.0],
        };
        assert_eq!(p.at(2.0), 17.0);
        assert_eq!(p.second_derivative(&[5.0], &[1.0]), Some(6.0));
        let pl = PiecewiseLinear::new(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(pl.at(0.5), 1.0);
        assert_eq!(pl.at(3.0), 0.0);
        assert!(PiecewiseLinear::new(vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn combined_tails() {
        let t = combine_tails(
            [
                (1.0, TailClass::CompactSupport { radius: 2.0 }),
                (
                    2.0,
                    TailClass::EventuallyConstant {
                        radius: 1.0,
                        left: 0.0,
                        right: 1.0,
                    },
                ),
            ]
            .into_iter(),
        );
        assert_eq!(
            t,
            TailClass::EventuallyConstant {
                radius: 2.0,
                left: 0.0,
                right: 2.0
            }
        );
    }
}
