//! Steady states from the augmented linear system
//! `[L with row 0 replaced by the trace functional] · vec(ρ) = e₀`.

use num_complex::Complex64 as C64;

use super::{DensityMatrix, SensitivityPair, POSITIVITY_TOL};
use crate::error::{Error, Result};
use crate::model::{unvectorize, vectorize, Liouvillian};
use crate::qmat::{eig_hermitian, lu_solve, singular_values, ComplexMatrix};

/// Singular values below `KERNEL_GAP_TOL · σ_max` count towards the kernel.
pub const KERNEL_GAP_TOL: f64 = 1e-10;

pub fn kernel_dimension(l: &Liouvillian) -> usize {
    let sv = singular_values(l.generator());
    let smax = sv[0];
    if smax == 0.0 {
        return sv.len();
    }
    sv.iter().filter(|&&s| s <= KERNEL_GAP_TOL * smax).count()
}

fn augmented(l: &Liouvillian) -> ComplexMatrix {
    let d = l.dim();
    let mut m = l.generator().clone();
    for j in 0..d * d {
        m.set(0, j, C64::new(0.0, 0.0));
    }
    for i in 0..d {
        m.set(0, i + i * d, C64::new(1.0, 0.0));
    }
    m
}

/// The unique trace-one fixed point of `L`.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let kd = kernel_dimension(l);
    if kd != 1 {
        return Err(Error::DegenerateKernel { kernel_dim: kd });
    }
    solve_steady(l, &augmented(l))
}

fn solve_steady(l: &Liouvillian, aug: &ComplexMatrix) -> Result<DensityMatrix> {
    let d = l.dim();
    let mut rhs = vec![C64::new(0.0, 0.0); d * d];
    rhs[0] = C64::new(1.0, 0.0);
    let rho = unvectorize(d, &lu_solve(aug, &rhs)?).hermitian_part();
    let min = eig_hermitian(&rho)?.eigenvalues[0];
    if min < -POSITIVITY_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(DensityMatrix::from_trusted(rho))
}

/// Steady state and its derivative, from `L ∂ρ_s = −(∂L) ρ_s` with
/// `Tr ∂ρ_s = 0`, sharing the augmented matrix with the steady-state solve.
pub fn steady_state_sensitivity(l: &Liouvillian, dl: &Liouvillian) -> Result<SensitivityPair> {
    if dl.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), got: dl.dim() });
    }
    let kd = kernel_dimension(l);
    if kd != 1 {
        return Err(Error::DegenerateKernel { kernel_dim: kd });
    }
    let aug = augmented(l);
    let rho = solve_steady(l, &aug)?;
    let mut rhs: Vec<C64> = dl.generator().matvec(&vectorize(rho.matrix())).into_iter().map(|z| -z).collect();
    rhs[0] = C64::new(0.0, 0.0);
    let drho = unvectorize(l.dim(), &lu_solve(&aug, &rhs)?).hermitian_part();
    Ok(SensitivityPair::from_trusted(rho, drho))
}
