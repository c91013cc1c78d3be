//! Executable checks of the maximum principles, the a priori bounds, the
//! boundary behaviour and the counterexamples for the wrong-sign operator.
//!
//! Every check returns a [`VerificationReport`] carrying the measured
//! quantity, the threshold it was compared with and a digest of its inputs.

mod bounds;
mod counterexamples;
mod principles;
mod residual;
mod suite;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assembly::Mesh;
use crate::error::Result;

pub use bounds::{
    boundary_quotient, check_boundary_lipschitz, check_energy_bound, check_linf_bound,
    BoundaryQuotient,
};
pub use counterexamples::{
    counterexample_boundary_only, counterexample_ces, counterexample_general, BoundaryOnlyOutcome,
    CesOutcome, GeneralOutcome,
};
pub use principles::{check_strong_mp_contact, check_strong_mp_discrete, check_weak_mp};
pub use residual::{interior_residual, manufactured_bump, residual_check};
pub use suite::{random_loads, run_suite, SuiteConfig, SuiteResult};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    /// SHA-256 of the serialized inputs.
    pub inputs_digest: String,
    pub notes: String,
}

/// Prefix of `notes` for checks whose preconditions could not be confirmed.
pub const INCONCLUSIVE: &str = "inconclusive";

impl VerificationReport {
    pub fn new(
        name: &str,
        passed: bool,
        measured: f64,
        threshold: f64,
        inputs_digest: String,
        notes: impl Into<String>,
    ) -> Self {
        Self {
            check_name: name.to_string(),
            passed,
            measured,
            threshold,
            inputs_digest,
            notes: notes.into(),
        }
    }

    pub fn is_inconclusive(&self) -> bool {
        self.notes.starts_with(INCONCLUSIVE)
    }

    /// One-line summary used by the suite output.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} measured={:.6e} threshold={:.6e} digest={} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check_name,
            self.measured,
            self.threshold,
            &self.inputs_digest[..16.min(self.inputs_digest.len())],
            self.notes
        )
    }
}

/// Hex SHA-256 of the JSON serialization of `value`.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("inputs serialize to JSON");
    hex::encode(Sha256::digest(&bytes))
}

/// Index `k_{m,N}` of the Sobolev embedding `H^m ⊂ C^k`: `⌊m - N/2⌋` when
/// `m - N/2` is not an integer, `m - N/2 - 1` when it is a positive integer,
/// and `None` when `m - N/2 <= 0`.
pub fn sobolev_index(m: u32, n: u32) -> Option<u32> {
    let twice = 2 * i64::from(m) - i64::from(n);
    if twice <= 0 {
        None
    } else if twice % 2 == 0 {
        Some((twice / 2 - 1) as u32)
    } else {
        Some((twice / 2) as u32)
    }
}

/// `f` at every point of [`Mesh::quadrature_points`], evaluated in parallel.
pub fn quadrature_samples<F>(mesh: &Mesh, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    mesh.quadrature_points()
        .par_iter()
        .map(|(_, x, _)| f(*x))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sobolev_index_examples() {
        assert_eq!(sobolev_index(4, 2), Some(2));
        assert_eq!(sobolev_index(2, 3), Some(0));
        assert_eq!(sobolev_index(1, 2), None);
        assert_eq!(sobolev_index(0, 1), None);
        assert_eq!(sobolev_index(3, 1), Some(2));
    }

    #[test]
    fn digest_is_stable() {
        let a = digest(&(1.0, "x"));
        assert_eq!(a, digest(&(1.0, "x")));
        assert_ne!(a, digest(&(1.0 + 1e-16 * 2.0, "x")));
        assert_eq!(a.len(), 64);
    }
}
