use crate::dynamics::{DensityMatrix, SensitivityPair};
use crate::error::{Error, Result};
use crate::qmat::{eig_hermitian, psd_sqrt, ComplexMatrix};

/// `D_B(ρ, σ) = [2(1 − Tr√(√ρ σ √ρ))]^{1/2}`
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma.dim() });
    }
    bures_raw(rho.matrix(), sigma.matrix())
}

fn bures_raw(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let sr = psd_sqrt(rho)?;
    let inner = sr.matmul(sigma).matmul(&sr).hermitian_part();
    let root_fidelity = psd_sqrt(&inner)?.trace().re;
    Ok((2.0 * (1.0 - root_fidelity)).max(0.0).sqrt())
}

/// QFI from the infinitesimal Bures distance along the first-order path
/// `ρ ± h∂ρ`. The symmetric estimate `E(h) = 2[D²(ρ, ρ+h∂ρ) + D²(ρ, ρ−h∂ρ)]/h²`
/// has error `O(h²)`, which one Richardson step `(4E(h/2) − E(h))/3` removes.
pub fn bures_qfi_estimate(pair: &SensitivityPair) -> Result<f64> {
    let rho = pair.rho.matrix();
    let sr = clipped_sqrt(rho)?;
    let h = 1e-3 / pair.drho.frobenius_norm().max(1.0);
    let d2 = |sigma: ComplexMatrix| -> Result<f64> {
        let inner = sr.matmul(&sigma).matmul(&sr).hermitian_part();
        Ok(2.0 * (1.0 - clipped_sqrt(&inner)?.trace().re))
    };
    let estimate = |h: f64| -> Result<f64> {
        let step = pair.drho.scale_real(h);
        Ok(2.0 * (d2(rho + &step)? + d2(rho - &step)?) / (h * h))
    };
    Ok((4.0 * estimate(h / 2.0)? - estimate(h)?) / 3.0)
}

/// Square root with every negative eigenvalue treated as zero; the shifted
/// states `ρ ± h∂ρ` of a rank-deficient `ρ` may dip below zero at `O(h²)`.
fn clipped_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eig_hermitian(&m.hermitian_part())?.reconstruct_with(|l| l.max(0.0).sqrt()))
}
