use super::{qfi, sld};
use crate::dynamics::{steady_state_sensitivity, DensityMatrix, SensitivityPair};
use crate::error::{invalid, Result};
use crate::model::{qubit_liouvillian, qubit_liouvillian_gamma_derivative, FeedbackParams, QubitModelParams};
use crate::qmat::ComplexMatrix;

/// QFI matrix over `(g, κ)` for the driven steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiMatrix {
    pub entries: [[f64; 2]; 2],
    pub det: f64,
    /// Single-parameter QFI with respect to `γ = g²/κ`.
    pub f_gamma: f64,
}

impl QfiMatrix {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let [[a, b], [_, d]] = self.entries;
        let m = 0.5 * (a + d);
        let r = (0.5 * (a - d)).hypot(b);
        [m - r, m + r]
    }
}

/// `F_ij = Tr[ρ{L_i, L_j}]/2` from per-parameter derivatives of one state.
pub fn qfi_matrix(rho: &DensityMatrix, derivatives: &[ComplexMatrix]) -> Result<Vec<Vec<f64>>> {
    let slds = derivatives
        .iter()
        .map(|d| sld(&SensitivityPair::new(rho.clone(), d.clone())?).map(|s| s.matrix))
        .collect::<Result<Vec<_>>>()?;
    let n = slds.len();
    let mut f = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let anti = slds[i].anticommutator(&slds[j]);
            let v = 0.5 * rho.matrix().trace_product(&anti).re;
            f[i][j] = v;
            f[j][i] = v;
        }
    }
    Ok(f)
}

/// The steady state depends on `(g, κ)` only through `γ = g²/κ`, so
/// `∂_g = (2g/κ)∂_γ` and `∂_κ = −(g²/κ²)∂_γ`.
pub fn qfi_matrix_steady(g: f64, kappa: f64, omega: f64, fb: &FeedbackParams) -> Result<QfiMatrix> {
    if !(g.is_finite() && g > 0.0) {
        return Err(invalid("g", "must be finite and > 0"));
    }
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(invalid("kappa", "must be finite and > 0"));
    }
    let m = QubitModelParams::new(g * g / kappa, omega)?;
    let pair = steady_state_sensitivity(&qubit_liouvillian(&m, fb), &qubit_liouvillian_gamma_derivative(fb))?;
    let dg = pair.drho.scale_real(2.0 * g / kappa);
    let dk = pair.drho.scale_real(-g * g / (kappa * kappa));
    let f = qfi_matrix(&pair.rho, &[dg, dk])?;
    let entries = [[f[0][0], f[0][1]], [f[1][0], f[1][1]]];
    Ok(QfiMatrix {
        entries,
        det: entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0],
        f_gamma: qfi(&pair)?.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_3;

    #[test]
    fn rank_one_chain_rule_structure() {
        let fb = FeedbackParams::new(FRAC_PI_3, 0.0).unwrap();
        let q = qfi_matrix_steady(0.1, 0.1, 0.1, &fb).unwrap();
        // F_γ = 11.2874779541446 (closed form at γ = Ω = 0.1), chain factor (2g/κ)² = 4.
        assert!((q.f_gamma - 11.287_477_954_144_62).abs() < 1e-6 * 11.3);
        assert!((q.entries[0][0] - 45.149_911_816_578_48).abs() < 1e-6 * 45.2);
        assert!((q.entries[1][1] - q.f_gamma).abs() < 1e-9 * q.f_gamma);
        assert!(q.det.abs() <= 1e-8 * q.entries[0][0] * q.entries[1][1]);
        let [lo, hi] = q.eigenvalues();
        assert!(lo.abs() <= 1e-8 * hi);
    }

    #[test]
    fn diagonal_entries_follow_chain_rule() {
        let fb = FeedbackParams::new(1.2, 0.3).unwrap();
        let (g, kappa) = (0.3, 0.5);
        let q = qfi_matrix_steady(g, kappa, 0.07, &fb).unwrap();
        assert!((q.entries[0][0] - (2.0 * g / kappa).powi(2) * q.f_gamma).abs() < 1e-8 * q.entries[0][0]);
        assert!((q.entries[1][1] - (g * g / (kappa * kappa)).powi(2) * q.f_gamma).abs() < 1e-8 * q.entries[1][1]);
        assert!(q.entries[0][1] < 0.0);
    }
}
