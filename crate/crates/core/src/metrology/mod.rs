//! Quantum Fisher information, symmetric logarithmic derivatives, classical
//! Fisher information, Bures distance, the (g, κ) QFI matrix, and the scalar
//! maximisations over time and drive strength.

mod bures;
mod fisher;
mod optimize;
mod qfi;
mod qfim;

use crate::qmat::ComplexMatrix;

pub use bures::{bures_distance, bures_qfi_estimate};
pub use fisher::{classical_fisher, projective_povm, ClassicalFiResult, PROBABILITY_TOL};
pub use optimize::{
    golden_section_max, maximize_qfi_over_time, optimal_drive, qfi_time_series, steady_qfi, DriveOptimum,
    FmResult, QfiSample, DEFAULT_GRID_POINTS,
};
pub use qfi::{qfi, qfi_closed_2x2, qfi_spectral, sld, sld_residual, Sld};
pub use qfim::{qfi_matrix, qfi_matrix_steady, QfiMatrix};

/// Eigenvalues (or eigenvalue sums) at or below this are treated as zero:
/// the closed 2×2 formula hands over to the spectral one when `det ρ` drops
/// to this level, and the spectral sums skip such terms.
pub const RANK_TOL: f64 = 1e-15;
/// Eigenvalue gap below which first-order eigen-derivatives are unreliable.
pub const DEGENERATE_GAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfiMethod {
    Closed2x2,
    Spectral,
    /// Bures small-increment estimate used for degenerate spectra.
    BuresFiniteDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfiResult {
    pub value: f64,
    pub sld: ComplexMatrix,
    /// Quantum Cramér-Rao bound `1/F` (infinite when `F = 0`).
    pub precision_bound: f64,
    pub method: QfiMethod,
    /// The closed 2×2 route was requested but `ρ` was rank deficient.
    pub rank_fallback: bool,
    /// Terms with `λ_k + λ_k' ≤ RANK_TOL` were dropped from the SLD.
    pub sld_truncated: bool,
}

impl QfiResult {
    pub(crate) fn new(value: f64, sld: Sld, method: QfiMethod) -> Self {
        let value = value.max(0.0);
        Self {
            value,
            sld: sld.matrix,
            precision_bound: if value > 0.0 { 1.0 / value } else { f64::INFINITY },
            method,
            rank_fallback: false,
            sld_truncated: sld.truncated,
        }
    }
}
