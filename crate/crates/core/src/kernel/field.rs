use serde::{Deserialize, Serialize};

/// A set where a field fails to be smooth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kink {
    /// The point `x = c` in one dimension, the hyperplane `x_1 = c` otherwise.
    Point(f64),
    /// The sphere `|x| = r` (the pair of points `±r` in one dimension).
    Sphere(f64),
}

impl Kink {
    /// Line parameters `t` at which `x + t dir` crosses the kink.
    pub(crate) fn crossings(&self, x: &[f64], dir: &[f64], out: &mut Vec<f64>) {
        match *self {
            Kink::Point(c) => {
                if dir[0].abs() > 1e-300 {
                    out.push((c - x[0]) / dir[0]);
                }
            }
            Kink::Sphere(r) => {
                let xd: f64 = x.iter().zip(dir).map(|(a, b)| a * b).sum();
                let xx: f64 = x.iter().map(|a| a * a).sum();
                let disc = xd * xd - xx + r * r;
                if disc >= 0.0 {
                    let root = disc.sqrt();
                    out.push(-xd - root);
                    out.push(-xd + root);
                }
            }
        }
    }

    pub(crate) fn distance(&self, x: &[f64]) -> f64 {
        match *self {
            Kink::Point(c) => (x[0] - c).abs(),
            Kink::Sphere(r) => (norm(x) - r).abs(),
        }
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Behaviour of a field far from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TailClass {
    /// Zero outside the ball of the given radius.
    CompactSupport { radius: f64 },
    /// Constant outside the ball of the given radius; `left` is the value
    /// for `x_1 < 0` and `right` for `x_1 > 0` (they must agree when N > 1).
    EventuallyConstant { radius: f64, left: f64, right: f64 },
    /// Bounded by `bound` everywhere, with no further structure.
    Bounded { bound: f64 },
    /// `|u(y)| <= scale * (1 + |y|)^exponent`.
    PowerGrowth { exponent: f64, scale: f64 },
}

impl TailClass {
    /// Whether the weighted tail integral converges for order `s`.
    pub fn admissible(&self, s: f64) -> bool {
        match *self {
            TailClass::PowerGrowth { exponent, .. } => exponent < 2.0 * s,
            _ => true,
        }
    }
}

/// A real function on `R^N` that the kernel can evaluate.
///
/// Implementors list the sets where they fail to be `C^2` through
/// [`ScalarField::kinks`]; the complement is the region where pointwise
/// evaluation of the operators is valid.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> f64;

    /// Second derivative along the unit vector `dir`, where defined.
    fn second_derivative(&self, _x: &[f64], _dir: &[f64]) -> Option<f64> {
        None
    }

    fn kinks(&self) -> Vec<Kink> {
        Vec::new()
    }

    fn tail(&self) -> TailClass;

    fn at(&self, x: f64) -> f64 {
        self.value(std::slice::from_ref(&x))
    }

    /// Laplacian as the sum of coordinate second derivatives.
    fn laplacian(&self, x: &[f64]) -> Option<f64> {
        let n = x.len();
        let mut e = vec![0.0; n];
        let mut acc = 0.0;
        for i in 0..n {
            e[i] = 1.0;
            acc += self.second_derivative(x, &e)?;
            e[i] = 0.0;
        }
        Some(acc)
    }

    /// Distance from `x` to the nearest kink (infinite if there is none).
    fn kink_distance(&self, x: &[f64]) -> f64 {
        self.kinks()
            .iter()
            .map(|k| k.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `x` lies in the open set where the field is `C^2`.
    fn in_smooth_region(&self, x: &[f64]) -> bool {
        self.kink_distance(x) > super::apply::MIN_SMOOTH_ZONE
    }
}

impl<T: ScalarField + ?Sized> ScalarField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        (**self).second_derivative(x, dir)
    }
    fn kinks(&self) -> Vec<Kink> {
        (**self).kinks()
    }
    fn tail(&self) -> TailClass {
        (**self).tail()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        (**self).second_derivative(x, dir)
    }
    fn kinks(&self) -> Vec<Kink> {
        (**self).kinks()
    }
    fn tail(&self) -> TailClass {
        (**self).tail()
    }
}

impl<T: ScalarField + ?Sized> ScalarField for std::sync::Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn second_derivative(&self, x: &[f64], dir: &[f64]) -> Option<f64> {
        (**self).second_derivative(x, dir)
    }
    fn kinks(&self) -> Vec<Kink> {
        (**self).kinks()
    }
    fn tail(&self) -> TailClass {
        (**self).tail()
    }
}
