use serde::{Deserialize, Serialize};

use crate::kernel::{Kink, ScalarField, TailClass};

/// Truncation point `2L` of the top ladder term (`L = 1`).
pub const TOP_CAP: f64 = 2.0;

/// `w_α(x) = x_+^α` for `x < 2L` and `(2L)^α` beyond.
pub fn w_alpha(x: f64, alpha: f64, l: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x.min(2.0 * l).powf(alpha)
    }
}

/// A term `c x^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub c: f64,
    pub alpha: f64,
}

impl Monomial {
    fn value(&self, x: f64) -> f64 {
        self.c * x.powf(self.alpha)
    }
    fn d1(&self, x: f64) -> f64 {
        self.c * self.alpha * x.powf(self.alpha - 1.0)
    }
    fn d2(&self, x: f64) -> f64 {
        self.c * self.alpha * (self.alpha - 1.0) * x.powf(self.alpha - 2.0)
    }
}

/// The explicit ingredients of `β = β_♯ - C_♯ W`.
///
/// `β_♯ = Σ_{free} c_j x_+^{α_j} + c_T w_{α_T}` and, on `(0, d]`,
/// `C_♯ W(x) = C_♯ x²(3 - 2 log x)/4 + 2 Σ_{corr} c_j x^{α_j}`. On `[d, 2d]`
/// the corrector is the cubic Hermite blend from `(W(d), W'(d))` to `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaShape {
    pub free: Vec<Monomial>,
    pub top: Monomial,
    pub corrector_terms: Vec<Monomial>,
    pub c_sharp: f64,
    pub d: f64,
}

impl BetaShape {
    /// `C_♯ W̃` and its first two derivatives on `(0, d]`.
    fn corrector_inner(&self, x: f64) -> [f64; 3] {
        let lx = x.ln();
        let cs = self.c_sharp;
        let mut v = [
            cs * 0.25 * x * x * (3.0 - 2.0 * lx),
            cs * x * (1.0 - lx),
            -cs * lx,
        ];
        for m in &self.corrector_terms {
            v[0] += 2.0 * m.value(x);
            v[1] += 2.0 * m.d1(x);
            v[2] += 2.0 * m.d2(x);
        }
        v
    }

    /// `C_♯ W` and its second derivative (where it exists).
    pub fn corrector(&self, x: f64) -> [f64; 2] {
        let d = self.d;
        if x <= 0.0 || x >= 2.0 * d {
            return [0.0, 0.0];
        }
        if x <= d {
            let [v, _, v2] = self.corrector_inner(x);
            return [v, v2];
        }
        let [w0, w1, _] = self.corrector_inner(d);
        let t = (x - d) / d;
        let h = 1.0 - 3.0 * t * t + 2.0 * t * t * t;
        let h1 = t - 2.0 * t * t + t * t * t;
        let h2 = -6.0 + 12.0 * t;
        let h12 = -4.0 + 6.0 * t;
        [w0 * h + w1 * d * h1, (w0 * h2 + w1 * d * h12) / (d * d)]
    }

    /// `S(d) = max_{(-∞, d]} W̃ = W̃(d)`; `W̃` is increasing on `(0, d]`
    /// because `x(1 - log x) > 0` for `x < e` and every `c_j > 0`.
    pub fn s_of_d(&self) -> f64 {
        self.corrector_inner(self.d)[0] / self.c_sharp
    }

    pub fn sharp(&self, x: f64) -> [f64; 2] {
        if x <= 0.0 {
            return [0.0, 0.0];
        }
        let mut v = [0.0, 0.0];
        for m in &self.free {
            v[0] += m.value(x);
            v[1] += m.d2(x);
        }
        if x < TOP_CAP {
            v[0] += self.top.value(x);
            v[1] += self.top.d2(x);
        } else {
            v[0] += self.top.value(TOP_CAP);
        }
        v
    }

    fn top_limit(&self) -> f64 {
        self.top.value(TOP_CAP)
    }

    /// Growth exponent and bound of `β_♯`; `None` when it is eventually
    /// constant.
    fn growth(&self) -> Option<(f64, f64)> {
        let exponent = self
            .free
            .iter()
            .map(|m| m.alpha)
            .fold(None, |acc: Option<f64>, a| {
                Some(acc.map_or(a, |b| b.max(a)))
            })?;
        let scale = self.free.iter().map(|m| m.c.abs()).sum::<f64>() + self.top_limit().abs();
        Some((exponent, scale))
    }

    fn corrector_bound(&self) -> f64 {
        if self.c_sharp > 0.0 {
            2.0 * self.c_sharp * self.s_of_d()
        } else {
            0.0
        }
    }
}

/// `β_♯` (when `corrected` is false) or `β = β_♯ - C_♯ W`.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaField {
    pub shape: BetaShape,
    pub corrected: bool,
}

impl BetaField {
    pub fn eval(&self, x: f64) -> [f64; 2] {
        let [mut v, mut v2] = self.shape.sharp(x);
        if self.corrected {
            let [w, w2] = self.shape.corrector(x);
            v -= w;
            v2 -= w2;
        }
        [v, v2]
    }

    fn break_points(&self) -> Vec<f64> {
        let mut out = vec![0.0, TOP_CAP];
        if self.corrected {
            out.extend([self.shape.d, 2.0 * self.shape.d]);
        }
        out
    }
}

impl ScalarField for BetaField {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[0])[0]
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        Some(self.eval(x[0])[1] * dir[0] * dir[0])
    }
    fn kinks(&self) -> Vec<Kink> {
        self.break_points().into_iter().map(Kink::Point).collect()
    }
    fn tail(&self) -> TailClass {
        let extra = if self.corrected {
            self.shape.corrector_bound()
        } else {
            0.0
        };
        match self.shape.growth() {
            Some((exponent, scale)) => TailClass::PowerGrowth {
                exponent,
                scale: scale + extra,
            },
            None => TailClass::EventuallyConstant {
                radius: TOP_CAP,
                left: 0.0,
                right: self.shape.top_limit(),
            },
        }
    }
}

/// `γ = M (β - β_*)` with the piecewise quadratic `β_*`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaField {
    pub beta: BetaField,
    pub m: f64,
    pub c2: f64,
    pub ell: f64,
}

impl GammaField {
    /// `β_*` and its second derivative.
    pub fn beta_star(&self, x: f64) -> [f64; 2] {
        let (c2, l, d) = (self.c2, self.ell, self.beta.shape.d);
        if x <= 0.0 {
            [0.0, 0.0]
        } else if x < l {
            [c2 * x * x, 2.0 * c2]
        } else if x < d {
            [2.0 * c2 * l * x - c2 * l * l, 0.0]
        } else {
            [c2 * l * (2.0 * d - l), 0.0]
        }
    }

    pub fn eval(&self, x: f64) -> [f64; 2] {
        let [b, b2] = self.beta.eval(x);
        let [p, p2] = self.beta_star(x);
        [self.m * (b - p), self.m * (b2 - p2)]
    }
}

impl ScalarField for GammaField {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[0])[0]
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        Some(self.eval(x[0])[1] * dir[0] * dir[0])
    }
    fn kinks(&self) -> Vec<Kink> {
        let mut k = self.beta.kinks();
        k.push(Kink::Point(self.ell));
        k
    }
    fn tail(&self) -> TailClass {
        let plateau = self.c2 * self.ell * (2.0 * self.beta.shape.d - self.ell);
        match self.beta.tail() {
            TailClass::PowerGrowth { exponent, scale } => TailClass::PowerGrowth {
                exponent,
                scale: self.m * (scale + plateau),
            },
            TailClass::EventuallyConstant { radius, right, .. } => TailClass::EventuallyConstant {
                radius,
                left: 0.0,
                right: self.m * (right - plateau),
            },
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn w_alpha_examples() {
        assert_eq!(w_alpha(-1.0, 1.5, 1.0), 0.0);
        assert!((w_alpha(3.0, 1.5, 1.0) - 2f64.powf(1.5)).abs() < 1e-15);
        assert!((w_alpha(1.0, 1.5, 1.0) - 1.0).abs() < 1e-15);
    }

    fn shape() -> BetaShape {
        BetaShape {
            free: vec![Monomial { c: 1.0, alpha: 1.0 }],
            top: Monomial { c: 0.4, alpha: 1.5 },
            corrector_terms: vec![Monomial { c: 0.4, alpha: 1.5 }],
            c_sharp: 3.0,
            d: 0.01,
        }
    }

    #[test]
    fn corrector_blend_is_c1_and_vanishes() {
        let s = shape();
        let d = s.d;
        let h = 1e-7;
        let left = (s.corrector(d)[0] - s.corrector(d - h)[0]) / h;
        let right = (s.corrector(d + h)[0] - s.corrector(d)[0]) / h;
        assert!((left - right).abs() < 1e-4 * left.abs());
        assert_eq!(s.corrector(2.0 * d), [0.0, 0.0]);
        let cap = 2.0 * s.c_sharp * s.s_of_d();
        for k in 0..=100 {
            let x = d * (1.0 + k as f64 / 100.0);
            let w = s.corrector(x)[0];
            assert!(w >= 0.0 && w <= cap, "{x} {w}");
        }
    }

    #[test]
    fn second_derivative_matches_differences() {
        let f = BetaField {
            shape: shape(),
            corrected: true,
        };
        for x in [0.002, 0.007, 0.013, 0.5, 1.7] {
            let h = 1e-4 * x;
            let fd = (f.at(x + h) + f.at(x - h) - 2.0 * f.at(x)) / (h * h);
            let exact = f.eval(x)[1];
            assert!(
                (fd - exact).abs() < 1e-4 * (1.0 + exact.abs()),
                "{x}: {fd} {exact}"
            );
        }
    }
}
