//! Time evolution of density matrices and their parameter sensitivities,
//! steady states, exponential decay fits, and the qubit+cavity population
//! decay.

mod adiabatic;
mod fit;
mod integrate;
mod steady;

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::qmat::{c, eig_hermitian, ComplexMatrix};

pub use adiabatic::{default_population_window, population_decay, PopulationDecay};
pub use fit::{fit_decay_rate, DecayFit, DecayModel, DEFAULT_FIT_TOL};
pub use integrate::{
    propagate, propagate_with_sensitivity, JointState, Propagator, StepConfig, POSITIVITY_ABORT,
};
pub use steady::{kernel_dimension, steady_state, steady_state_sensitivity, KERNEL_GAP_TOL};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-POSITIVITY_TOL, 0)` are treated as round-off and
/// reported as zero by derived quantities.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Hermitian, unit-trace, positive-semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let herm = m.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr - c(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        if m.dim() >= 2 {
            let min = eig_hermitian(&m)?.eigenvalues[0];
            if min < -POSITIVITY_TOL {
                return Err(Error::NotPositive { min_eigenvalue: min });
            }
        }
        Ok(Self(m))
    }

    /// Wraps integrator or solver output that has already been checked.
    pub(crate) fn from_trusted(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ|` for a normalised state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (n - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("state vector norm² is {n}")));
        }
        Ok(Self(ComplexMatrix::outer(psi, psi)))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0.get(i, j)
    }

    pub fn purity(&self) -> f64 {
        self.0.trace_product(&self.0).re
    }

    /// Ascending eigenvalues with round-off negatives clipped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let vals = eig_hermitian(&self.0)?.eigenvalues;
        Ok(vals.into_iter().map(clip_roundoff).collect())
    }

    /// Smallest raw eigenvalue, without clipping.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eig_hermitian(&self.0)?.eigenvalues[0])
    }

    /// Qubit state tensored with the cavity vacuum.
    pub fn with_vacuum(&self, n_max: usize) -> Self {
        let mut vac = ComplexMatrix::zeros(n_max + 1);
        vac.set(0, 0, c(1.0, 0.0));
        Self(self.0.kron(&vac))
    }
}

pub(crate) fn clip_roundoff(l: f64) -> f64 {
    if (-POSITIVITY_TOL..0.0).contains(&l) {
        0.0
    } else {
        l
    }
}

/// Initial qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialStateSpec {
    /// `cos θ|e⟩ + sin θ|g⟩`
    Pure { theta: f64 },
    /// `ε|e⟩⟨e| + (1−ε)|g⟩⟨g|`
    Mixed { epsilon: f64 },
}

impl InitialStateSpec {
    /// The equal-weight superposition used throughout the analysis.
    pub fn equal_superposition() -> Self {
        Self::Pure { theta: FRAC_PI_4 }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match *self {
            Self::Pure { theta } => {
                if !theta.is_finite() {
                    return Err(invalid("theta", "must be finite"));
                }
                let (s, co) = theta.sin_cos();
                DensityMatrix::pure(&[c(co, 0.0), c(s, 0.0)])
            }
            Self::Mixed { epsilon } => {
                if !(0.0..1.0).contains(&epsilon) {
                    return Err(invalid("epsilon", format!("must lie in [0, 1), got {epsilon}")));
                }
                Ok(DensityMatrix(ComplexMatrix::from_real_diag(&[epsilon, 1.0 - epsilon])))
            }
        }
    }
}

/// A state together with its derivative with respect to the estimated
/// parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityPair {
    pub rho: DensityMatrix,
    pub drho: ComplexMatrix,
}

impl SensitivityPair {
    /// Checks that `drho` is Hermitian and traceless (relative to its size).
    pub fn new(rho: DensityMatrix, drho: ComplexMatrix) -> Result<Self> {
        if drho.dim() != rho.dim() {
            return Err(Error::DimensionMismatch { expected: rho.dim(), got: drho.dim() });
        }
        let scale = drho.frobenius_norm().max(1.0);
        if drho.hermiticity_defect() > HERMITIAN_TOL * scale {
            return Err(Error::InvalidState("derivative is not Hermitian".into()));
        }
        if drho.trace().norm() > TRACE_TOL * scale {
            return Err(Error::InvalidState(format!(
                "derivative trace {} is not zero",
                drho.trace()
            )));
        }
        Ok(Self { rho, drho })
    }

    pub(crate) fn from_trusted(rho: DensityMatrix, drho: ComplexMatrix) -> Self {
        Self { rho, drho }
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
}

/// Default "long-time" horizon `40/γ_q` with `γ_q = γ cos²A`. Near `A = π/2`
/// the population decay `γ_q` vanishes, so it is floored at `γ/20`.
pub fn long_time_horizon(gamma: f64, a: f64) -> f64 {
    let gamma_q = gamma * a.cos().powi(2);
    40.0 / gamma_q.max(gamma / 20.0)
}
