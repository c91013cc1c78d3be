use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fields::{BetaField, BetaShape, GammaField, Monomial, TOP_CAP};
use super::ladder::{build_ladder, coefficients, kappa, ExponentLadder, LadderCase};
use crate::error::{Error, Result};
use crate::fields::TruncatedPower;
use crate::kernel::{frac_apply, mixed_apply, OperatorParams, QuadratureSpec, ScalarField};

/// Safety factor applied to measured grid extrema.
const SAFETY: f64 = 1.25;
/// Lower bound for `C_2`; the measured `(-ℒβ)_+` is often zero.
const C2_FLOOR: f64 = 1.0;
const MAX_HALVINGS: usize = 12;
/// Truncation radius used when none is given (suits domains inside `B_1`).
pub const DEFAULT_TRUNCATION_RADIUS: f64 = 5.0;
/// Right end of the grids certifying the behaviour away from the origin.
const FAR_FIELD: f64 = 10.0;

/// One certified inequality, recorded as its worst margin over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub name: String,
    /// Smallest value of `lhs - rhs` over the grid (negative means violated).
    pub worst_margin: f64,
    /// Margin below zero that is still accepted.
    pub allowance: f64,
    pub points: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<CertificateCheck>,
    /// Number of times `d` was halved after the initial choice.
    pub halvings: usize,
    pub tolerance: f64,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CertificateCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Constants of a built barrier together with the grid certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub ladder: ExponentLadder,
    pub kappas: Vec<f64>,
    pub cs: Vec<f64>,
    pub d: f64,
    pub c_sharp: f64,
    pub s_of_d: f64,
    pub c2: f64,
    pub c0: f64,
    pub c1: f64,
    pub ell: f64,
    pub m: f64,
    pub r: f64,
    pub c_gamma: f64,
    pub certificate: Certificate,
}

impl BarrierParams {
    pub fn s(&self) -> f64 {
        self.ladder.s
    }

    pub fn shape(&self) -> BetaShape {
        let mut shape = base_shape(&self.ladder, &self.cs);
        shape.c_sharp = self.c_sharp;
        shape.d = self.d;
        shape
    }

    pub fn beta_field(&self) -> BetaField {
        BetaField {
            shape: self.shape(),
            corrected: true,
        }
    }

    /// `β_♯`, the barrier before the logarithmic correction.
    pub fn sharp_field(&self) -> BetaField {
        BetaField {
            shape: self.shape(),
            corrected: false,
        }
    }

    pub fn gamma_field(&self) -> GammaField {
        GammaField {
            beta: self.beta_field(),
            m: self.m,
            c2: self.c2,
            ell: self.ell,
        }
    }

    pub fn beta(&self, x: f64) -> f64 {
        self.beta_field().eval(x)[0]
    }

    pub fn gamma(&self, x: f64) -> f64 {
        self.gamma_field().eval(x)[0]
    }

    pub fn with_truncation_radius(mut self, r: f64) -> Self {
        self.r = r;
        self
    }
}

pub fn beta(x: f64, p: &BarrierParams) -> f64 {
    p.beta(x)
}

pub fn gamma(x: f64, p: &BarrierParams) -> f64 {
    p.gamma(x)
}

fn base_shape(ladder: &ExponentLadder, cs: &[f64]) -> BetaShape {
    match ladder.case {
        LadderCase::LowS => BetaShape {
            free: Vec::new(),
            top: Monomial { c: 1.0, alpha: 1.0 },
            corrector_terms: Vec::new(),
            c_sharp: 0.0,
            d: 0.0,
        },
        LadderCase::HighS => {
            let terms: Vec<Monomial> = cs
                .iter()
                .zip(&ladder.alphas)
                .map(|(c, alpha)| Monomial {
                    c: *c,
                    alpha: *alpha,
                })
                .collect();
            let (top, free) = terms.split_last().expect("ladder has a top term");
            BetaShape {
                free: free.to_vec(),
                top: *top,
                corrector_terms: terms[1..].to_vec(),
                c_sharp: 0.0,
                d: 0.0,
            }
        }
    }
}

/// `n` geometrically spaced points in `[a, b]`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let r = (b / a).ln() / (n - 1) as f64;
    (0..n).map(|k| a * (r * k as f64).exp()).collect()
}

/// Geometric grid covering `(0, b)` down to `1e-5 b`.
pub(crate) fn inner_grid(b: f64, n: usize) -> Vec<f64> {
    geometric_grid(1e-5 * b, 0.999 * b, n)
}

fn evaluate<F>(grid: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    grid.par_iter().map(|x| f(*x)).collect()
}

fn record(name: &str, margins: &[f64], allowance: f64) -> CertificateCheck {
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    CertificateCheck {
        name: name.to_string(),
        worst_margin: worst,
        allowance,
        points: margins.len(),
        passed: worst >= -allowance,
    }
}

/// `C_♯ (3 - 2 log d) d / 4 + 2 Σ c_j d^{α_j - 1}`; `S(d) <= d/(4C_♯)` holds
/// exactly when this is at most `1/4`.
fn shrink_lhs(d: f64, c_sharp: f64, terms: &[Monomial]) -> f64 {
    c_sharp * d * (3.0 - 2.0 * d.ln()) / 4.0
        + 2.0
            * terms
                .iter()
                .map(|m| m.c * d.powf(m.alpha - 1.0))
                .sum::<f64>()
}

struct Builder<'a> {
    ladder: ExponentLadder,
    kappas: Vec<f64>,
    cs: Vec<f64>,
    base: BetaShape,
    op: OperatorParams,
    quad: &'a QuadratureSpec,
}

impl Builder<'_> {
    /// `1.25 max |c_T (-Δ)^s w_T(x)| / |log x|` over a grid in `(0, d)`.
    fn c_sharp(&self, d: f64) -> Result<f64> {
        let top = TruncatedPower {
            alpha: self.base.top.alpha,
            cap: TOP_CAP,
        };
        let c_top = self.base.top.c;
        let ratios = evaluate(&inner_grid(d, 200), |x| {
            Ok((c_top * frac_apply(&top, &[x], &self.op, self.quad)?).abs() / x.ln().abs())
        })?;
        let max = ratios.iter().copied().fold(0.0, f64::max);
        Ok(SAFETY * max.max(1e-3))
    }

    fn mixed(&self, f: &(impl ScalarField + ?Sized), x: f64) -> Result<f64> {
        mixed_apply(f, &[x], &self.op, self.quad)
    }

    fn attempt(&self, d: f64, halvings: usize) -> std::result::Result<BarrierParams, String> {
        let err = |e: Error| e.to_string();
        let s = self.ladder.s;
        let tol = self.quad.tolerance;
        let c_sharp = self.c_sharp(d).map_err(err)?;
        let lhs = shrink_lhs(d, c_sharp, &self.base.corrector_terms);
        if lhs > 0.25 {
            return Err(format!(
                "S(d) <= d/(4 C_sharp) fails (C_sharp = {c_sharp:.4e}, lhs = {lhs:.4e})"
            ));
        }
        let mut shape = self.base.clone();
        shape.c_sharp = c_sharp;
        shape.d = d;
        let s_of_d = shape.s_of_d();
        let c1 = 2f64.max(
            1.0 + self
                .base
                .corrector_terms
                .iter()
                .map(|m| m.c * d.powf(m.alpha - 1.0))
                .sum::<f64>(),
        );
        let beta = BetaField {
            shape: shape.clone(),
            corrected: true,
        };
        let probe = evaluate(&inner_grid(d, 200), |x| self.mixed(&beta, x)).map_err(err)?;
        let worst = probe.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        let c2 = (SAFETY * worst).max(C2_FLOOR);
        if d > 1.0 / (4.0 * c1 * c2) {
            return Err(format!(
                "d <= 1/(4 C1 C2) fails (C1 = {c1:.4e}, C2 = {c2:.4e})"
            ));
        }
        let c = self.op.c_ns();
        let mut ell = (0.45 * d).min(1.0 / (2.0 * c1 * c2));
        let mut tries = 0;
        while 4.0 * c * ell * (2.0 * d - ell) > s * (d - ell).powf(2.0 * s) {
            ell *= 0.5;
            tries += 1;
            if tries > 60 {
                return Err("no ell satisfies the nonlocal bound on beta_*".into());
            }
        }
        let m = (2.0 / c2).max(2.0 * c1 / ell);
        let c_gamma = (m / (2.0 * c1)).min(1.0 / (m * c1));
        let gamma = GammaField {
            beta: beta.clone(),
            m,
            c2,
            ell,
        };

        let mut checks = Vec::new();
        let grid = inner_grid(d, 400);
        let lb = evaluate(&grid, |x| self.mixed(&beta, x)).map_err(err)?;
        let margins: Vec<f64> = lb.iter().map(|v| v + c2).collect();
        checks.push(record("L beta >= -C2", &margins, 10.0 * tol));

        let margins: Vec<f64> = grid
            .iter()
            .map(|&x| {
                let b = beta.at(x);
                (b - x / c1).min(c1 * x - b) / x
            })
            .collect();
        checks.push(record("x/C1 <= beta <= C1 x", &margins, 1e-12));

        let c0 = 0.5 * d;
        let mut far: Vec<f64> = (0..=100).map(|k| d * (1.0 + k as f64 / 100.0)).collect();
        far.extend(geometric_grid(2.0 * d, FAR_FIELD, 100));
        let margins: Vec<f64> = far.iter().map(|&x| beta.at(x) - c0).collect();
        checks.push(record("beta >= C0 beyond d", &margins, 1e-12 * c0));

        let cap = 2.0 * c_sharp * s_of_d;
        let margins: Vec<f64> = far[..=100]
            .iter()
            .map(|&x| {
                let w = shape.corrector(x)[0];
                w.min(cap - w)
            })
            .collect();
        checks.push(record("0 <= W <= 2 S(d)", &margins, 1e-12 * cap));

        let ggrid = inner_grid(ell, 200);
        let lg = evaluate(&ggrid, |x| self.mixed(&gamma, x)).map_err(err)?;
        let margins: Vec<f64> = lg.iter().map(|v| v - 1.0).collect();
        checks.push(record("L gamma >= 1", &margins, 10.0 * tol));

        let margins: Vec<f64> = ggrid
            .iter()
            .map(|&x| {
                let g = gamma.at(x);
                (g - c_gamma * x).min(x / c_gamma - g) / x
            })
            .collect();
        checks.push(record("c x <= gamma <= x/c", &margins, 1e-12));

        let mut beyond = geometric_grid(ell, FAR_FIELD, 300);
        beyond.extend((1..=50).map(|k| d * (1.0 + k as f64 / 50.0)));
        let margins: Vec<f64> = beyond.iter().map(|&x| gamma.at(x) - 1.0).collect();
        checks.push(record("gamma >= 1 beyond ell", &margins, 1e-12));

        if self.ladder.case == LadderCase::HighS {
            let residuals = self.telescoping(&shape, d).map_err(err)?;
            let margins: Vec<f64> = residuals.iter().map(|r| -r.abs()).collect();
            checks.push(record("telescoping residual", &margins, 100.0 * tol));
        }

        let certificate = Certificate {
            checks,
            halvings,
            tolerance: tol,
        };
        if let Some(bad) = certificate.checks.iter().find(|c| !c.passed) {
            return Err(format!(
                "certificate '{}' failed with margin {:.4e}",
                bad.name, bad.worst_margin
            ));
        }
        Ok(BarrierParams {
            ladder: self.ladder.clone(),
            kappas: self.kappas.clone(),
            cs: self.cs.clone(),
            d,
            c_sharp,
            s_of_d,
            c2,
            c0,
            c1,
            ell,
            m,
            r: DEFAULT_TRUNCATION_RADIUS,
            c_gamma,
            certificate,
        })
    }

    /// Residual of `ℒβ_♯ - c_T(-Δ)^s w_T + 2Σ c_j α_j(α_j-1)x^{α_j-2}` on a
    /// grid in `(0, d)`, relative to the size of the cancelling terms.
    fn telescoping(&self, shape: &BetaShape, d: f64) -> Result<Vec<f64>> {
        let sharp = BetaField {
            shape: shape.clone(),
            corrected: false,
        };
        let top = TruncatedPower {
            alpha: shape.top.alpha,
            cap: TOP_CAP,
        };
        evaluate(&inner_grid(d, 50), |x| {
            let lhs = self.mixed(&sharp, x)?;
            let tail = shape.top.c * frac_apply(&top, &[x], &self.op, self.quad)?;
            let sum: f64 = shape
                .corrector_terms
                .iter()
                .map(|m| 2.0 * m.c * m.alpha * (m.alpha - 1.0) * x.powf(m.alpha - 2.0))
                .sum();
            Ok((lhs - tail + sum) / (1.0 + sum.abs() + tail.abs()))
        })
    }
}

/// Builds and certifies the lower barrier `γ` for order `s`.
///
/// `d` starts at the largest power-of-two fraction of `1/2` meeting
/// `S(d) <= d/(4C_♯)` and is halved at most 12 times while any of the
/// inequalities fails on its grid.
pub fn build_barrier(s: f64, quad: &QuadratureSpec) -> Result<BarrierParams> {
    quad.validate()?;
    let ladder = build_ladder(s)?;
    let kappas = ladder
        .free_alphas()
        .iter()
        .map(|a| kappa(*a, s, quad))
        .collect::<Result<Vec<_>>>()?;
    let cs = coefficients(&ladder, &kappas)?;
    let base = base_shape(&ladder, &cs);
    let builder = Builder {
        op: OperatorParams::mixed_1d(s)?,
        ladder,
        kappas,
        cs,
        base,
        quad,
    };

    let mut trace = Vec::new();
    let mut d: f64 = 0.5;
    for _ in 0..16 {
        let c_sharp = builder.c_sharp(d)?;
        let mut next = d;
        while shrink_lhs(next, c_sharp, &builder.base.corrector_terms) > 0.25 && next > 1e-12 {
            next *= 0.5;
        }
        trace.push(format!(
            "initial d: C_sharp({d:.4e}) = {c_sharp:.4e} -> d = {next:.4e}"
        ));
        if next == d {
            break;
        }
        d = next;
    }
    for halvings in 0..=MAX_HALVINGS {
        match builder.attempt(d, halvings) {
            Ok(p) => return Ok(p),
            Err(reason) => {
                trace.push(format!("d = {d:.4e}: {reason}"));
                d *= 0.5;
            }
        }
    }
    Err(Error::Construction {
        message: format!("barrier for s = {s} not certified after {MAX_HALVINGS} halvings of d"),
        trace: trace.join("\n"),
    })
}
