//! Floating-point cross-checks. Nothing here feeds back into symbolic verdicts.

pub mod galerkin;
pub mod quadrature;
pub mod sampling;
pub mod symfun;
pub mod trig;
pub mod verify;

use serde::{Deserialize, Serialize};

pub use galerkin::{Basis, BlockModel};
pub use quadrature::QuadratureRule;
pub use symfun::SymbolicFunction;
pub use verify::{
    estimate_relative_bound, factorization_residual, numeric_evidence, pairing_residual, sa_numeric_evidence,
    schur_pairing, FactorizationCheck, NumericEvidence, RelBoundEstimate,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub seed: u64,
    /// Galerkin basis size.
    pub galerkin: usize,
    pub quad_nodes: usize,
    /// Symbolic pairing tolerance.
    pub tol_pairing: f64,
    /// Tolerance for anything that goes through a Galerkin resolvent.
    pub tol_resolvent: f64,
    /// Number of random test vectors or pairs.
    pub tests: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self { seed: 1, galerkin: 200, quad_nodes: 64, tol_pairing: 1e-10, tol_resolvent: 1e-8, tests: 25 }
    }
}
