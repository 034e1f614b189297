//! Excited-state population decay of the full qubit+cavity model, used to
//! compare against the reduced qubit description.

use super::{fit_decay_rate, propagate, DecayFit, DecayModel, DensityMatrix, StepConfig, DEFAULT_FIT_TOL};
use crate::error::{invalid, Result};
use crate::model::{cavity_qubit_liouvillian, excited_projector, CavityQubitParams};
use crate::qmat::ComplexMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationDecay {
    /// `(t, P_e(t))` on a uniform grid from 0.
    pub series: Vec<(f64, f64)>,
    pub fit: DecayFit,
    pub window: (f64, f64),
}

/// Default fit window `[10/κ, 2κ/g²]`: after the cavity transient and
/// before the population becomes tiny.
pub fn default_population_window(p: &CavityQubitParams) -> (f64, f64) {
    (10.0 / p.kappa, 2.0 / p.effective_rate())
}

/// Propagates `|e⟩⟨e| ⊗ |0⟩⟨0|` and fits `P_e(t) = Tr[(|e⟩⟨e| ⊗ I)ρ(t)]`
/// to a pure exponential over `window` (default
/// [`default_population_window`]).
pub fn population_decay(
    p: &CavityQubitParams,
    window: Option<(f64, f64)>,
    grid_points: usize,
) -> Result<PopulationDecay> {
    if p.g == 0.0 {
        return Err(invalid("g", "must be > 0 for a decaying population"));
    }
    if grid_points < 2 {
        return Err(invalid("grid_points", "need at least 2 points"));
    }
    let window = window.unwrap_or_else(|| default_population_window(p));
    let (_, hi) = window;
    let t_grid: Vec<f64> = (0..grid_points).map(|k| hi * k as f64 / (grid_points - 1) as f64).collect();
    let excited = DensityMatrix::new(ComplexMatrix::from_real_diag(&[1.0, 0.0]))?.with_vacuum(p.n_max);
    let states = propagate(&cavity_qubit_liouvillian(p), &excited, &t_grid, StepConfig::for_cavity(p))?;
    let pe = excited_projector(p.n_max);
    let series: Vec<(f64, f64)> =
        t_grid.iter().zip(&states).map(|(&t, rho)| (t, pe.trace_product(rho.matrix()).re)).collect();
    let fit = fit_decay_rate(&series, window, DecayModel::PureExponential, DEFAULT_FIT_TOL)?;
    Ok(PopulationDecay { series, fit, window })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_starts_excited_and_decays() {
        let p = CavityQubitParams::new(0.2, 5.0, 0.0, 2).unwrap();
        let d = population_decay(&p, None, 120).unwrap();
        assert_eq!(d.series[0], (0.0, 1.0));
        assert!(d.series.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12));
        assert!(d.fit.reliable);
    }

    #[test]
    fn zero_coupling_is_rejected() {
        let p = CavityQubitParams::new(0.0, 5.0, 0.0, 2).unwrap();
        assert!(population_decay(&p, None, 100).is_err());
    }
}
