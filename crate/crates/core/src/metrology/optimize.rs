use super::{qfi, QfiResult};
use crate::dynamics::{
    long_time_horizon, steady_state_sensitivity, InitialStateSpec, JointState, Propagator, SensitivityPair,
    StepConfig,
};
use crate::error::{invalid, Error, Result};
use crate::model::{qubit_liouvillian, qubit_liouvillian_gamma_derivative, FeedbackParams, QubitModelParams};

/// Grid size used to bracket maxima before golden-section refinement.
pub const DEFAULT_GRID_POINTS: usize = 400;
const TIME_TOL: f64 = 1e-4;
const DRIVE_REL_TOL: f64 = 1e-8;

/// Maximum over time of the QFI for a given feedback setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmResult {
    pub f_max: f64,
    pub t_star: f64,
    /// The grid maximum sat on the window boundary, so no interior
    /// refinement was done.
    pub at_edge: bool,
}

/// Maximum over drive strength of the steady-state QFI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveOptimum {
    pub omega_m: f64,
    pub f_max: f64,
    /// The sampled curve rises then falls with no interior dip.
    pub unimodal: bool,
    pub at_edge: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfiSample {
    pub t: f64,
    pub pair: SensitivityPair,
    pub qfi: QfiResult,
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`,
/// stopping once the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

fn check_window(name: &'static str, lo: f64, hi: f64, n: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
        return Err(invalid(name, format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
    }
    if n < 3 {
        return Err(invalid("grid_points", "need at least 3 points"));
    }
    Ok(())
}

fn qubit_propagator(m: &QubitModelParams, fb: &FeedbackParams) -> Result<Propagator> {
    Propagator::with_sensitivity(
        &qubit_liouvillian(m, fb),
        &qubit_liouvillian_gamma_derivative(fb),
        StepConfig::for_qubit(m),
    )
}

/// `F_γ(t)` on an ascending time grid.
pub fn qfi_time_series(
    m: &QubitModelParams,
    fb: &FeedbackParams,
    init: &InitialStateSpec,
    t_grid: &[f64],
) -> Result<Vec<QfiSample>> {
    let prop = qubit_propagator(m, fb)?;
    let mut state = prop.initial(&init.to_density()?)?;
    let mut out = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t.is_finite() && t >= state.t) {
            return Err(invalid("t_grid", "times must be finite, >= 0 and ascending"));
        }
        prop.advance_to(&mut state, t);
        let pair = prop.pair(&state)?;
        let qfi = qfi(&pair)?;
        out.push(QfiSample { t, pair, qfi });
    }
    Ok(out)
}

/// `F_M = max_t F_γ(t)` over `window` (default `[0, long_time_horizon]`):
/// a uniform grid brackets the maximum, then golden-section search
/// restarted from the stored grid state refines `t*` to `1e-4`.
pub fn maximize_qfi_over_time(
    m: &QubitModelParams,
    fb: &FeedbackParams,
    init: &InitialStateSpec,
    window: Option<(f64, f64)>,
    grid_points: usize,
) -> Result<FmResult> {
    let (lo, hi) = window.unwrap_or((0.0, long_time_horizon(m.gamma, fb.a)));
    check_window("window", lo, hi, grid_points)?;
    let prop = qubit_propagator(m, fb)?;
    let value_at = |s: &JointState| -> Result<f64> { Ok(qfi(&prop.pair(s)?)?.value) };

    let mut state = prop.initial(&init.to_density()?)?;
    let mut states = Vec::with_capacity(grid_points);
    let mut values = Vec::with_capacity(grid_points);
    for t in uniform_grid(lo, hi, grid_points) {
        prop.advance_to(&mut state, t);
        values.push(value_at(&state)?);
        states.push(state.clone());
    }
    let best = argmax(&values);
    if best == 0 || best == grid_points - 1 {
        return Ok(FmResult { f_max: values[best], t_star: states[best].t, at_edge: true });
    }

    let start = &states[best - 1];
    let mut failure: Option<Error> = None;
    let objective = |t: f64| {
        let mut s = start.clone();
        prop.advance_to(&mut s, t);
        value_at(&s).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::NEG_INFINITY
        })
    };
    let (t_star, f_max) = golden_section_max(objective, start.t, states[best + 1].t, TIME_TOL);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(if f_max >= values[best] {
        FmResult { f_max, t_star, at_edge: false }
    } else {
        FmResult { f_max: values[best], t_star: states[best].t, at_edge: false }
    })
}

/// Steady state, its γ-derivative and the resulting QFI.
pub fn steady_qfi(gamma: f64, omega: f64, fb: &FeedbackParams) -> Result<(SensitivityPair, QfiResult)> {
    let m = QubitModelParams::new(gamma, omega)?;
    let pair = steady_state_sensitivity(&qubit_liouvillian(&m, fb), &qubit_liouvillian_gamma_derivative(fb))?;
    let q = qfi(&pair)?;
    Ok((pair, q))
}

/// `Ω_m = argmax_Ω F_γ^s(Ω)` over `[lo, hi]`, by grid then golden section.
pub fn optimal_drive(
    gamma: f64,
    fb: &FeedbackParams,
    (lo, hi): (f64, f64),
    grid_points: usize,
) -> Result<DriveOptimum> {
    check_window("omega range", lo, hi, grid_points)?;
    let grid = uniform_grid(lo, hi, grid_points);
    let values = grid
        .iter()
        .map(|&w| steady_qfi(gamma, w, fb).map(|(_, q)| q.value))
        .collect::<Result<Vec<_>>>()?;
    let unimodal = is_unimodal(&values);
    let best = argmax(&values);
    if best == 0 || best == grid_points - 1 {
        return Ok(DriveOptimum { omega_m: grid[best], f_max: values[best], unimodal, at_edge: true });
    }
    let mut failure: Option<Error> = None;
    let objective = |w: f64| {
        steady_qfi(gamma, w, fb).map(|(_, q)| q.value).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            f64::NEG_INFINITY
        })
    };
    let (omega_m, f_max) = golden_section_max(objective, grid[best - 1], grid[best + 1], DRIVE_REL_TOL * hi);
    if let Some(e) = failure {
        return Err(e);
    }
    let (omega_m, f_max) = if f_max >= values[best] { (omega_m, f_max) } else { (grid[best], values[best]) };
    Ok(DriveOptimum { omega_m, f_max, unimodal, at_edge: false })
}

/// First index of the largest value.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// True when the sequence never rises again after it starts to fall,
/// ignoring steps below `1e-12` of the peak.
fn is_unimodal(values: &[f64]) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())) * 1e-12;
    let mut falling = false;
    for w in values.windows(2) {
        let d = w[1] - w[0];
        if d < -scale {
            falling = true;
        } else if d > scale && falling {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, PI};

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3).powi(2) + 2.0, 0.0, 1.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((fx - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unimodality_detection() {
        assert!(is_unimodal(&[0.0, 1.0, 2.0, 1.5, 1.0]));
        assert!(is_unimodal(&[3.0, 2.0, 1.0]));
        assert!(!is_unimodal(&[0.0, 2.0, 1.0, 1.5, 0.5]));
    }

    #[test]
    fn no_feedback_maximum_matches_closed_form() {
        // Closed-form F for the equal superposition without feedback, maximised
        // numerically on a fine grid: F_M ≈ 29.4301 at γt* ≈ 1.807.
        let m = QubitModelParams::new(0.1, 0.0).unwrap();
        let r = maximize_qfi_over_time(&m, &FeedbackParams::off(), &InitialStateSpec::equal_superposition(), None, 400)
            .unwrap();
        assert!(!r.at_edge);
        assert!((r.f_max - 29.4301).abs() < 1e-3, "{r:?}");
        assert!((r.t_star - 18.07).abs() < 0.02, "{r:?}");
    }

    #[test]
    fn series_starts_at_zero_information() {
        let m = QubitModelParams::new(0.1, 0.0).unwrap();
        let fb = FeedbackParams::new(FRAC_PI_3, 0.0).unwrap();
        let s = qfi_time_series(&m, &fb, &InitialStateSpec::equal_superposition(), &[0.0, 1.0, 5.0]).unwrap();
        assert_eq!(s[0].qfi.value, 0.0);
        assert!(s[1].qfi.value > 0.0 && s[2].qfi.value > s[1].qfi.value);
        assert!(qfi_time_series(&m, &fb, &InitialStateSpec::equal_superposition(), &[2.0, 1.0]).is_err());
    }

    #[test]
    fn steady_drive_optimum_is_interior() {
        let fb = FeedbackParams::new(FRAC_PI_3, 0.0).unwrap();
        let d = optimal_drive(0.1, &fb, (0.0, 0.5), 200).unwrap();
        assert!(d.unimodal && !d.at_edge);
        assert!((d.omega_m - 0.032358).abs() < 1e-4, "{d:?}");
        assert!((d.f_max - 45.0516).abs() < 1e-3, "{d:?}");
    }

    #[test]
    fn bad_windows_are_rejected() {
        let m = QubitModelParams::new(0.1, 0.0).unwrap();
        let fb = FeedbackParams::new(PI, 0.0).unwrap();
        let init = InitialStateSpec::equal_superposition();
        assert!(maximize_qfi_over_time(&m, &fb, &init, Some((5.0, 1.0)), 100).is_err());
        assert!(maximize_qfi_over_time(&m, &fb, &init, Some((0.0, 1.0)), 2).is_err());
    }
}
