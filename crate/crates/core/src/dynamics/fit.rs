//! Least-squares exponential decay fits on a time window.

use crate::error::{Error, Result};

/// Default bound on the largest |ln y − line| residual for a fit to count as
/// reliable.
pub const DEFAULT_FIT_TOL: f64 = 5e-2;
const MIN_POINTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `y ≈ c·e^{−rt}`
    PureExponential,
    /// `y ≈ c·t²·e^{−rt}`
    TSquaredExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub log_amplitude: f64,
    pub max_residual: f64,
    pub points: usize,
    pub reliable: bool,
}

pub fn fit_decay_rate(
    series: &[(f64, f64)],
    window: (f64, f64),
    model: DecayModel,
    tol: f64,
) -> Result<DecayFit> {
    let (lo, hi) = window;
    let pts: Vec<(f64, f64)> = series.iter().copied().filter(|(t, _)| *t >= lo && *t <= hi).collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::Fit(format!(
            "{} points in window [{lo}, {hi}], need at least {MIN_POINTS}",
            pts.len()
        )));
    }
    if let Some((t, y)) = pts.iter().find(|(_, y)| y.is_nan() || *y <= 0.0) {
        return Err(Error::Fit(format!("nonpositive value {y} at t = {t}")));
    }
    let xy: Vec<(f64, f64)> = pts
        .iter()
        .map(|&(t, y)| match model {
            DecayModel::PureExponential => (t, y.ln()),
            DecayModel::TSquaredExponential => (t, (y / (t * t)).ln()),
        })
        .collect();
    if xy.iter().any(|(_, v)| !v.is_finite()) {
        return Err(Error::Fit("non-finite logarithm in window".into()));
    }

    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate time window".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = xy.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok(DecayFit {
        rate: -slope,
        log_amplitude: intercept,
        max_residual,
        points: xy.len(),
        reliable: max_residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_t_squared_model() {
        let series: Vec<(f64, f64)> = (0..=40)
            .map(|k| {
                let t = 100.0 + 5.0 * k as f64;
                (t, t * t * (-0.1 * t).exp() / 2.0)
            })
            .collect();
        let fit = fit_decay_rate(&series, (100.0, 300.0), DecayModel::TSquaredExponential, DEFAULT_FIT_TOL).unwrap();
        assert!((fit.rate - 0.1).abs() < 1e-10);
        assert!((fit.log_amplitude - 0.5f64.ln()).abs() < 1e-8);
        assert!(fit.reliable);
    }

    #[test]
    fn pure_exponential_and_reliability_flag() {
        let series: Vec<(f64, f64)> = (0..20).map(|k| (k as f64, 3.0 * (-0.25 * k as f64).exp())).collect();
        let fit = fit_decay_rate(&series, (0.0, 19.0), DecayModel::PureExponential, 1e-9).unwrap();
        assert!((fit.rate - 0.25).abs() < 1e-12 && fit.reliable);

        let wiggly: Vec<(f64, f64)> =
            (0..20).map(|k| (k as f64, (-0.25 * k as f64 + 0.2 * (k as f64).sin()).exp())).collect();
        assert!(!fit_decay_rate(&wiggly, (0.0, 19.0), DecayModel::PureExponential, 1e-3).unwrap().reliable);
    }

    #[test]
    fn rejects_bad_windows() {
        let series: Vec<(f64, f64)> = (0..20).map(|k| (k as f64, 1.0)).collect();
        assert!(fit_decay_rate(&series, (0.0, 5.0), DecayModel::PureExponential, 1.0).is_err());
        let mut neg = series.clone();
        neg[3].1 = 0.0;
        assert!(matches!(
            fit_decay_rate(&neg, (0.0, 19.0), DecayModel::PureExponential, 1.0),
            Err(Error::Fit(_))
        ));
    }
}
