//! Dense symmetric and tridiagonal linear algebra used by the solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    /// `x^T A y`.
    pub fn form(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    /// `self + w * other`.
    pub fn add_scaled(&self, w: f64, other: &DenseMatrix) -> DenseMatrix {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + w * b)
            .collect();
        DenseMatrix { n: self.n, data }
    }

    pub fn scaled(&self, w: f64) -> DenseMatrix {
        DenseMatrix {
            n: self.n,
            data: self.data.iter().map(|a| w * a).collect(),
        }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| {
            (0..i).all(|j| {
                (self.get(i, j) - self.get(j, i)).abs() <= tol * self.get(i, i).abs().max(1.0)
            })
        })
    }

    /// Writes the lower triangle as a matrix-market coordinate file.
    pub fn write_matrix_market<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
        let nnz = self.n * (self.n + 1) / 2;
        writeln!(w, "{} {} {}", self.n, self.n, nnz)?;
        for j in 0..self.n {
            for i in j..self.n {
                writeln!(w, "{} {} {:.17e}", i + 1, j + 1, self.get(i, j))?;
            }
        }
        Ok(())
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.dim();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, self.diag[i]);
            if i + 1 < n {
                m.set(i, i + 1, self.off[i]);
                m.set(i + 1, i, self.off[i]);
            }
        }
        m
    }

    /// Number of eigenvalues below `x` (Sturm count).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.dim() {
            let o = if i > 0 { self.off[i - 1] } else { 0.0 };
            q = self.diag[i] - x - if i > 0 { o * o / q } else { 0.0 };
            if q == 0.0 {
                q = 1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Smallest eigenvalue by Sturm bisection.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &DenseMatrix) -> Option<Self> {
        let n = a.dim();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in j + 1..n {
                let mut v = a.get(i, j);
                let (ri, rj) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                v -= dot(ri, rj);
                l[i * n + j] = v / d;
            }
        }
        Some(Self { n, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let v = y[i] - dot(&self.l[i * n..i * n + i], &y[..i]);
            y[i] = v / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let v = y[i] - (i + 1..n).map(|k| self.l[k * n + i] * y[k]).sum::<f64>();
            y[i] = v / self.l[i * n + i];
        }
        y
    }
}

/// Outcome of [`solve_spd`].
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Vec<f64>,
    pub relative_residual: f64,
    pub iterations: usize,
}

/// Solves `A x = b` for symmetric positive definite `A` to the relative
/// residual `tol`: Cholesky with iterative refinement, falling back to
/// conjugate gradients when the factorization breaks down.
pub fn solve_spd(a: &DenseMatrix, b: &[f64], tol: f64) -> Result<LinearSolution> {
    let bn = norm2(b);
    if bn == 0.0 {
        return Ok(LinearSolution {
            x: vec![0.0; b.len()],
            relative_residual: 0.0,
            iterations: 0,
        });
    }
    let residual = |x: &[f64]| -> Vec<f64> {
        let ax = a.matvec(x);
        b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
    };
    if let Some(ch) = Cholesky::factor(a) {
        let mut x = ch.solve(b);
        let mut rel = norm2(&residual(&x)) / bn;
        let mut it = 1;
        while rel > tol && it < 5 {
            let r = residual(&x);
            let dx = ch.solve(&r);
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
            let trial_rel = norm2(&residual(&trial)) / bn;
            it += 1;
            if trial_rel >= rel {
                break;
            }
            x = trial;
            rel = trial_rel;
        }
        if rel <= tol {
            return Ok(LinearSolution {
                x,
                relative_residual: rel,
                iterations: it,
            });
        }
    }
    conjugate_gradient(a, b, tol)
}

fn conjugate_gradient(a: &DenseMatrix, b: &[f64], tol: f64) -> Result<LinearSolution> {
    let n = b.len();
    let bn = norm2(b);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for it in 1..=10 * n.max(10) {
        let ap = a.matvec(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= tol * bn {
            return Ok(LinearSolution {
                x,
                relative_residual: rr_new.sqrt() / bn,
                iterations: it,
            });
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::Numerical {
        message: "symmetric solve failed: matrix is not numerically positive definite".into(),
        min_eigenvalue: min_eigenvalue_estimate(a),
    })
}

/// Smallest eigenvalue estimate by power iteration on `σI - A`.
pub fn min_eigenvalue_estimate(a: &DenseMatrix) -> f64 {
    let n = a.dim();
    if n == 0 {
        return f64::NAN;
    }
    let sigma = (0..n)
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64)
        .collect();
    let mut mu = 0.0;
    for _ in 0..2000 {
        let nv = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let av = a.matvec(&v);
        let w: Vec<f64> = v.iter().zip(&av).map(|(x, y)| sigma * x - y).collect();
        let new_mu = dot(&v, &w);
        v = w;
        if (new_mu - mu).abs() <= 1e-12 * sigma.max(1e-300) {
            mu = new_mu;
            break;
        }
        mu = new_mu;
    }
    sigma - mu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_spd(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, |i, j| {
            if i == j {
                4.0 + i as f64
            } else {
                1.0 / (1.0 + (i as f64 - j as f64).abs())
            }
        })
    }

    #[test]
    fn cholesky_solves() {
        let a = sample_spd(12);
        let b: Vec<f64> = (0..12).map(|i| (i as f64).sin()).collect();
        let sol = solve_spd(&a, &b, 1e-12).unwrap();
        assert!(sol.relative_residual <= 1e-12);
    }

    #[test]
    fn cg_agrees_with_cholesky() {
        let a = sample_spd(9);
        let b = vec![1.0; 9];
        let x1 = solve_spd(&a, &b, 1e-13).unwrap().x;
        let x2 = conjugate_gradient(&a, &b, 1e-13).unwrap().x;
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_matrix_reports_eigenvalue() {
        let a = DenseMatrix::from_fn(3, |i, j| if i == j { [1.0, -2.0, 3.0][i] } else { 0.0 });
        match solve_spd(&a, &[1.0, 1.0, 1.0], 1e-10) {
            Err(Error::Numerical { min_eigenvalue, .. }) => {
                assert!((min_eigenvalue + 2.0).abs() < 1e-6)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sturm_bisection_matches_known_spectrum() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2cos(kπ/(n+1))
        let n = 20;
        let t = Tridiagonal {
            diag: vec![2.0; n],
            off: vec![-1.0; n - 1],
        };
        let want = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((t.min_eigenvalue() - want).abs() < 1e-13);
        let est = min_eigenvalue_estimate(&t.to_dense());
        assert!((est - want).abs() < 1e-6);
    }
}
