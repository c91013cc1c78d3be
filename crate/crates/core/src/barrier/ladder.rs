use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fields::PowerRamp;
use crate::kernel::{frac_apply, OperatorParams, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderCase {
    /// `s > 1/2`: a finite ladder of untruncated powers below `2s`.
    HighS,
    /// `s <= 1/2`: the ladder degenerates to the single exponent 1.
    LowS,
}

/// Exponents `α_j = 1 + 2j(1-s)`, `j = 0..=J+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentLadder {
    pub s: f64,
    /// `(2s-1) / (2(1-s))`; only meaningful when `s > 1/2`.
    pub rho: f64,
    pub j_max: usize,
    pub alphas: Vec<f64>,
    pub case: LadderCase,
}

impl ExponentLadder {
    /// Exponent of the truncated top term.
    pub fn top_alpha(&self) -> f64 {
        *self.alphas.last().expect("ladder is never empty")
    }

    /// Exponents of the untruncated powers (`j = 0..=J`).
    pub fn free_alphas(&self) -> &[f64] {
        match self.case {
            LadderCase::HighS => &self.alphas[..self.alphas.len() - 1],
            LadderCase::LowS => &[],
        }
    }
}

const INTEGER_TOL: f64 = 1e-12;

pub fn build_ladder(s: f64) -> Result<ExponentLadder> {
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("s must lie in (0,1), got {s}"));
    }
    if s <= 0.5 {
        return Ok(ExponentLadder {
            s,
            rho: (2.0 * s - 1.0) / (2.0 * (1.0 - s)),
            j_max: 0,
            alphas: vec![1.0],
            case: LadderCase::LowS,
        });
    }
    let rho = (2.0 * s - 1.0) / (2.0 * (1.0 - s));
    let nearest = rho.round();
    let j_max = if (rho - nearest).abs() <= INTEGER_TOL * rho.max(1.0) && nearest >= 1.0 {
        nearest as usize - 1
    } else {
        rho.floor() as usize
    };
    let alphas = (0..=j_max + 1)
        .map(|j| 1.0 + 2.0 * j as f64 * (1.0 - s))
        .collect();
    Ok(ExponentLadder {
        s,
        rho,
        j_max,
        alphas,
        case: LadderCase::HighS,
    })
}

/// `κ` with `(-Δ)^s x_+^α = κ x_+^{α-2s}`, evaluated at `x = 1` and
/// cross-checked by homogeneity at `x = 1/2` and `x = 2`.
pub fn kappa(alpha: f64, s: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(alpha >= 1.0) {
        return domain(format!("kappa needs alpha >= 1, got {alpha}"));
    }
    if alpha >= 2.0 * s {
        return Err(Error::TailDivergence(format!(
            "x_+^{alpha} is not admissible for s = {s}"
        )));
    }
    let params = OperatorParams::mixed_1d(s)?;
    let ramp = PowerRamp { alpha };
    let k = frac_apply(&ramp, &[1.0], &params, quad)?;
    for x in [0.5, 2.0] {
        let v = frac_apply(&ramp, &[x], &params, quad)?;
        let predicted = k * f64::powf(x, alpha - 2.0 * s);
        let err = (v - predicted).abs();
        let allowed = 10.0 * quad.tolerance * (1.0 + v.abs());
        if err > allowed {
            return Err(Error::Accuracy {
                what: format!("homogeneity check for kappa(alpha={alpha}, s={s}) at x={x}"),
                achieved: err,
                requested: allowed,
            });
        }
    }
    Ok(k)
}

/// `c_0 = 1`, `c_j = -κ_{j-1} c_{j-1} / (α_j (α_j - 1))` for `j = 1..=J+1`.
pub fn coefficients(ladder: &ExponentLadder, kappas: &[f64]) -> Result<Vec<f64>> {
    if ladder.case == LadderCase::LowS {
        return Ok(vec![1.0]);
    }
    if kappas.len() != ladder.j_max + 1 {
        return domain(format!(
            "expected {} kernel constants, got {}",
            ladder.j_max + 1,
            kappas.len()
        ));
    }
    if let Some(k) = kappas.iter().find(|k| !(**k < 0.0)) {
        return domain(format!("kernel constants must be negative, got {k}"));
    }
    let mut cs = vec![1.0];
    for j in 1..=ladder.j_max + 1 {
        let a = ladder.alphas[j];
        let denom = a * (a - 1.0);
        assert!(denom > 0.0, "ladder exponent {a} must exceed 1");
        cs.push(-kappas[j - 1] * cs[j - 1] / denom);
    }
    Ok(cs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_examples() {
        let l = build_ladder(0.75).unwrap();
        assert_eq!(l.j_max, 0);
        assert_eq!(l.alphas, vec![1.0, 1.5]);
        let l = build_ladder(0.9).unwrap();
        assert_eq!(l.j_max, 3);
        for (a, b) in l.alphas.iter().zip([1.0, 1.2, 1.4, 1.6, 1.8]) {
            assert!((a - b).abs() < 1e-12);
        }
        let l = build_ladder(0.3).unwrap();
        assert_eq!(l.case, LadderCase::LowS);
        assert_eq!(l.alphas, vec![1.0]);
        let l = build_ladder(0.6).unwrap();
        assert_eq!(l.j_max, 0);
        assert!(build_ladder(1.0).is_err());
    }

    #[test]
    fn recursion_example() {
        let l = build_ladder(0.75).unwrap();
        let cs = coefficients(&l, &[-0.3]).unwrap();
        assert_eq!(cs[0], 1.0);
        assert!((cs[1] - 0.3 / 0.75).abs() < 1e-15);
        let doubled = coefficients(&l, &[-0.6]).unwrap();
        assert!((doubled[1] - 2.0 * cs[1]).abs() < 1e-15);
        assert!(coefficients(&l, &[0.1]).is_err());
    }
}
