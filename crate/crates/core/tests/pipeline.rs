//! Cross-module checks: propagated states and sensitivities against closed
//! forms, and the metrology identities on pipeline output.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

use qfl_core::dynamics::{
    fit_decay_rate, propagate_with_sensitivity, DecayModel, DensityMatrix, InitialStateSpec, SensitivityPair,
    StepConfig,
};
use qfl_core::metrology::{
    bures_distance, classical_fisher, maximize_qfi_over_time, projective_povm, qfi, qfi_time_series, sld,
    sld_residual,
};
use qfl_core::model::{qubit_liouvillian, qubit_liouvillian_gamma_derivative, FeedbackParams, QubitModelParams};
use qfl_core::oracles::{qfi_dephasing_case, qfi_no_feedback};
use qfl_core::qmat::eig_hermitian;

const GAMMA: f64 = 0.1;

fn series(a: f64, times: &[f64]) -> Vec<SensitivityPair> {
    let m = QubitModelParams::new(GAMMA, 0.0).unwrap();
    let fb = FeedbackParams::new(a, 0.0).unwrap();
    let rho0 = InitialStateSpec::equal_superposition().to_density().unwrap();
    propagate_with_sensitivity(
        &qubit_liouvillian(&m, &fb),
        &qubit_liouvillian_gamma_derivative(&fb),
        &rho0,
        times,
        StepConfig::for_qubit(&m),
    )
    .unwrap()
}

fn state_at(gamma: f64, t: f64) -> DensityMatrix {
    let m = QubitModelParams::new(gamma, 0.0).unwrap();
    let fb = FeedbackParams::off();
    let rho0 = InitialStateSpec::equal_superposition().to_density().unwrap();
    let l = qubit_liouvillian(&m, &fb);
    qfl_core::dynamics::propagate(&l, &rho0, &[t], StepConfig::for_qubit(&m)).unwrap().remove(0)
}

#[test]
fn no_feedback_qfi_matches_closed_form() {
    let times = [1.0, 5.0, 10.0, 20.0, 50.0];
    for (t, pair) in times.iter().zip(series(PI, &times)) {
        let f = qfi(&pair).unwrap().value;
        let o = qfi_no_feedback(*t, GAMMA).unwrap();
        assert!((f - o).abs() <= 1e-6 * o, "t={t}: {f} vs {o}");
    }
}

#[test]
fn dephasing_case_matches_closed_form() {
    let pair = series(FRAC_PI_2, &[10.0]).remove(0);
    let f = qfi(&pair).unwrap().value;
    assert!((f - qfi_dephasing_case(10.0, GAMMA).unwrap()).abs() <= 1e-6 * f);
}

#[test]
fn long_time_decay_rates() {
    for (a, lo, hi, expect) in [(PI, 100.0, 300.0, GAMMA), (FRAC_PI_3, 150.0, 400.0, GAMMA / 4.0)] {
        let times: Vec<f64> = (0..=100).map(|k| lo + (hi - lo) * k as f64 / 100.0).collect();
        let pts: Vec<(f64, f64)> = times.iter().zip(series(a, &times)).map(|(&t, p)| (t, qfi(&p).unwrap().value)).collect();
        let fit = fit_decay_rate(&pts, (lo, hi), DecayModel::TSquaredExponential, 5e-2).unwrap();
        assert!((fit.rate - expect).abs() <= 0.02 * expect, "A={a}: {fit:?}");
    }
}

#[test]
fn sld_identities_on_propagated_states() {
    let m = QubitModelParams::new(GAMMA, 0.05).unwrap();
    let init = InitialStateSpec::Pure { theta: 0.3 };
    for a in [0.4, FRAC_PI_3, 2.5] {
        let fb = FeedbackParams::new(a, 0.2).unwrap();
        for s in qfi_time_series(&m, &fb, &init, &[2.0, 15.0, 60.0]).unwrap() {
            let l = sld(&s.pair).unwrap();
            assert!(sld_residual(&s.pair, &l.matrix) <= 1e-9);
            let basis = eig_hermitian(&l.matrix).unwrap().eigenvectors;
            let cfi = classical_fisher(&projective_povm(&basis), &s.pair).unwrap().value;
            assert!((cfi - s.qfi.value).abs() <= 1e-8 * s.qfi.value, "{cfi} vs {}", s.qfi.value);
        }
    }
}

#[test]
fn bures_distance_between_neighbouring_rates() {
    let (t, dg) = (10.0, 1e-4);
    // Centred pair: the one-sided distance carries an O(dγ) bias from ∂F/∂γ.
    let d = bures_distance(&state_at(GAMMA - dg / 2.0, t), &state_at(GAMMA + dg / 2.0, t)).unwrap();
    let f = qfi_no_feedback(t, GAMMA).unwrap();
    assert!((4.0 * d * d / (dg * dg) - f).abs() <= 1e-4 * f, "{} vs {f}", 4.0 * d * d / (dg * dg));
}

#[test]
fn feedback_near_third_pi_beats_no_feedback() {
    let m = QubitModelParams::new(GAMMA, 0.0).unwrap();
    let init = InitialStateSpec::equal_superposition();
    let fm = |a: f64| maximize_qfi_over_time(&m, &FeedbackParams::new(a, 0.0).unwrap(), &init, None, 400).unwrap();
    let off = fm(PI).f_max;
    assert!(fm(FRAC_PI_3).f_max > off);
    assert!(fm(FRAC_PI_2 - 0.05).f_max < off);
}
