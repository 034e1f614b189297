use super::{bures_qfi_estimate, QfiMethod, QfiResult, DEGENERATE_GAP, RANK_TOL};
use crate::dynamics::{clip_roundoff, SensitivityPair};
use crate::error::{invalid, Result};
use crate::qmat::{eig_hermitian, ComplexMatrix, EigenSystem};

#[derive(Debug, Clone, PartialEq)]
pub struct Sld {
    pub matrix: ComplexMatrix,
    pub truncated: bool,
}

struct Spectrum {
    lambda: Vec<f64>,
    sys: EigenSystem,
    /// `⟨k|∂ρ|k'⟩`
    d: ComplexMatrix,
}

fn spectrum(pair: &SensitivityPair) -> Result<Spectrum> {
    let sys = eig_hermitian(pair.rho.matrix())?;
    let lambda: Vec<f64> = sys.eigenvalues.iter().map(|&l| clip_roundoff(l).max(0.0)).collect();
    let v = &sys.eigenvectors;
    let d = v.dagger().matmul(&pair.drho.hermitian_part()).matmul(v);
    Ok(Spectrum { lambda, sys, d })
}

fn sld_from(sp: &Spectrum) -> Sld {
    let n = sp.lambda.len();
    let mut truncated = false;
    let mut in_eigenbasis = ComplexMatrix::zeros(n);
    for k in 0..n {
        for kp in 0..n {
            let s = sp.lambda[k] + sp.lambda[kp];
            if s > RANK_TOL {
                in_eigenbasis.set(k, kp, sp.d.get(k, kp) * (2.0 / s));
            } else {
                truncated = true;
            }
        }
    }
    let v = &sp.sys.eigenvectors;
    let matrix = v.matmul(&in_eigenbasis).matmul(&v.dagger()).hermitian_part();
    Sld { matrix, truncated }
}

/// `L = Σ 2⟨k|∂ρ|k'⟩/(λ_k + λ_k') |k⟩⟨k'|` over `λ_k + λ_k' > RANK_TOL`.
/// When pairs are dropped the result is the minimal-support solution and
/// `truncated` is set.
pub fn sld(pair: &SensitivityPair) -> Result<Sld> {
    Ok(sld_from(&spectrum(pair)?))
}

/// `‖∂ρ − (ρL + Lρ)/2‖_F`
pub fn sld_residual(pair: &SensitivityPair, l: &ComplexMatrix) -> f64 {
    let sym = pair.rho.matrix().anticommutator(l).scale_real(0.5);
    (&pair.drho - &sym).frobenius_norm()
}

/// Spectral QFI: classical term `Σ (∂λ_k)²/λ_k` plus quantum term
/// `Σ 2(λ_k − λ_k')²/(λ_k + λ_k') |⟨k|∂k'⟩|²`, with eigen-derivatives from
/// first-order perturbation theory. Degenerate levels that couple through
/// `∂ρ` switch to the Bures finite-difference estimate.
pub fn qfi_spectral(pair: &SensitivityPair) -> Result<QfiResult> {
    let sp = spectrum(pair)?;
    let n = sp.lambda.len();
    let coupling_floor = 1e-12 * pair.drho.frobenius_norm().max(1e-300);

    let mut degenerate = false;
    for k in 0..n {
        for kp in k + 1..n {
            let gap = (sp.sys.eigenvalues[k] - sp.sys.eigenvalues[kp]).abs();
            if gap < DEGENERATE_GAP && sp.d.get(k, kp).norm() > coupling_floor {
                degenerate = true;
            }
        }
    }
    let sld = sld_from(&sp);
    if degenerate {
        let value = bures_qfi_estimate(pair)?;
        return Ok(QfiResult::new(value, sld, QfiMethod::BuresFiniteDifference));
    }

    let mut classical = 0.0;
    let mut quantum = 0.0;
    for k in 0..n {
        let lk = sp.lambda[k];
        if lk > RANK_TOL {
            let dl = sp.d.get(k, k).re;
            classical += dl * dl / lk;
        }
        for kp in 0..n {
            if kp == k {
                continue;
            }
            let lkp = sp.lambda[kp];
            let s = lk + lkp;
            if s <= RANK_TOL {
                continue;
            }
            let gap = sp.sys.eigenvalues[kp] - sp.sys.eigenvalues[k];
            // |⟨k|∂k'⟩|² = |⟨k|∂ρ|k'⟩|² / (λ_k' − λ_k)²
            let overlap = sp.d.get(k, kp).norm_sqr() / (gap * gap);
            quantum += 2.0 * (lk - lkp).powi(2) / s * overlap;
        }
    }
    Ok(QfiResult::new(classical + quantum, sld, QfiMethod::Spectral))
}

/// Closed form for qubits, `Tr[(∂ρ)²] + Tr[(ρ∂ρ)²]/det ρ`. Rank-deficient
/// states (`det ρ ≤ RANK_TOL`) are handed to [`qfi_spectral`] and the result
/// carries `rank_fallback = true`.
pub fn qfi_closed_2x2(pair: &SensitivityPair) -> Result<QfiResult> {
    if pair.dim() != 2 {
        return Err(invalid("rho", format!("closed 2x2 QFI needs dim 2, got {}", pair.dim())));
    }
    let rho = pair.rho.matrix();
    let det = rho.get(0, 0).re * rho.get(1, 1).re - rho.get(0, 1).norm_sqr();
    if det <= RANK_TOL {
        let mut res = qfi_spectral(pair)?;
        res.rank_fallback = true;
        return Ok(res);
    }
    let d = pair.drho.hermitian_part();
    let rd = rho.matmul(&d);
    let value = d.trace_product(&d).re + rd.trace_product(&rd).re / det;
    let sld = sld(pair)?;
    Ok(QfiResult::new(value, sld, QfiMethod::Closed2x2))
}

/// Closed form for qubits, spectral form otherwise.
pub fn qfi(pair: &SensitivityPair) -> Result<QfiResult> {
    if pair.dim() == 2 {
        qfi_closed_2x2(pair)
    } else {
        qfi_spectral(pair)
    }
}
