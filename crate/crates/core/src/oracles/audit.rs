//! Oracle-versus-pipeline comparison. Each entry evaluates one closed form
//! and the corresponding master-equation result at fixed parameters, and
//! records whether they agree within the entry's tolerance.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use super::{
    inline_chi_rho11, qfi_dephasing_case, qfi_longtime_feedback, qfi_mixed_as_printed, qfi_mixed_limits,
    qfi_no_feedback, qfi_steady_closed_form, rho_with_feedback, steady_closed_form, MixedLimit,
};
use crate::dynamics::{steady_state, InitialStateSpec};
use crate::error::Result;
use crate::metrology::{qfi_time_series, steady_qfi, QfiSample};
use crate::model::{qubit_liouvillian, FeedbackParams, QubitModelParams};

const EXACT_TOL: f64 = 1e-6;
const SMALL_T_TOL: f64 = 1e-2;
const ASYMPTOTIC_TOL: f64 = 5e-2;
const GAMMA: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expectation {
    Verified,
    Erratum,
    /// Informational; never affects the overall outcome.
    Note,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {
    Agrees,
    Disagrees,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditEntry {
    pub id: &'static str,
    pub formula: &'static str,
    /// Worst-case point when several are checked.
    pub oracle: f64,
    pub pipeline: f64,
    pub rel_err: f64,
    pub tol: f64,
    pub expected: Expectation,
    pub observed: Observation,
}

impl AuditEntry {
    pub fn as_expected(&self) -> bool {
        match self.expected {
            Expectation::Verified => self.observed == Observation::Agrees,
            Expectation::Erratum => self.observed == Observation::Disagrees,
            Expectation::Note => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub entries: Vec<AuditEntry>,
}

impl AuditReport {
    /// Entries observed to disagree, other than notes.
    pub fn errata(&self) -> Vec<&AuditEntry> {
        self.entries
            .iter()
            .filter(|e| e.expected != Expectation::Note && e.observed == Observation::Disagrees)
            .collect()
    }

    pub fn all_as_expected(&self) -> bool {
        self.entries.iter().all(AuditEntry::as_expected)
    }
}

fn rel_err(oracle: f64, pipeline: f64) -> f64 {
    let scale = oracle.abs().max(pipeline.abs());
    if scale == 0.0 {
        0.0
    } else {
        (oracle - pipeline).abs() / scale
    }
}

struct Builder {
    id: &'static str,
    formula: &'static str,
    tol: f64,
    expected: Expectation,
    worst: Option<(f64, f64, f64)>,
}

impl Builder {
    fn new(id: &'static str, formula: &'static str, tol: f64, expected: Expectation) -> Self {
        Self { id, formula, tol, expected, worst: None }
    }

    fn compare(mut self, oracle: f64, pipeline: f64) -> Self {
        let e = rel_err(oracle, pipeline);
        if self.worst.is_none_or(|(_, _, w)| e > w) {
            self.worst = Some((oracle, pipeline, e));
        }
        self
    }

    fn finish(self) -> AuditEntry {
        let (oracle, pipeline, rel_err) = self.worst.unwrap_or((0.0, 0.0, 0.0));
        AuditEntry {
            id: self.id,
            formula: self.formula,
            oracle,
            pipeline,
            rel_err,
            tol: self.tol,
            expected: self.expected,
            observed: if rel_err <= self.tol { Observation::Agrees } else { Observation::Disagrees },
        }
    }
}

fn sample(a: f64, init: InitialStateSpec, t: f64) -> Result<QfiSample> {
    let m = QubitModelParams::new(GAMMA, 0.0)?;
    let fb = FeedbackParams::new(a, 0.0)?;
    Ok(qfi_time_series(&m, &fb, &init, &[t])?.remove(0))
}

fn mixed(epsilon: f64) -> InitialStateSpec {
    InitialStateSpec::Mixed { epsilon }
}

/// Runs every comparison at its default parameters and tolerances.
pub fn audit() -> Result<AuditReport> {
    use Expectation::*;
    let plus = InitialStateSpec::equal_superposition();
    let mut entries = Vec::new();

    let mut b = Builder::new("no_feedback_state", "rho11 = e^{-tγ}/2, rho12 = e^{-tγ/2}/2", EXACT_TOL, Verified);
    for t in [1.0, 10.0, 50.0] {
        let s = sample(PI, plus, t)?;
        let o = rho_with_feedback(t, GAMMA, PI)?;
        b = b.compare(o.rho11, s.pair.rho.get(0, 0).re).compare(o.rho12, s.pair.rho.get(0, 1).re);
    }
    entries.push(b.finish());

    let mut b = Builder::new(
        "no_feedback_qfi",
        "F = t^2 e^{-tγ}(2e^{tγ}-1)/(4(e^{tγ}-1))",
        EXACT_TOL,
        Verified,
    );
    for t in [1.0, 5.0, 10.0, 20.0, 50.0] {
        b = b.compare(qfi_no_feedback(t, GAMMA)?, sample(PI, plus, t)?.qfi.value);
    }
    entries.push(b.finish());

    let mut b = Builder::new(
        "feedback_state",
        "rho11 = e^{-tγcos²A}/2, rho12 = rho12_off (1 + Y)",
        EXACT_TOL,
        Verified,
    );
    for a in [FRAC_PI_3, FRAC_PI_4, 0.3, 2.0] {
        let s = sample(a, plus, 10.0)?;
        let o = rho_with_feedback(10.0, GAMMA, a)?;
        b = b.compare(o.rho11, s.pair.rho.get(0, 0).re).compare(o.rho12, s.pair.rho.get(0, 1).re);
    }
    entries.push(b.finish());

    entries.push(
        Builder::new("dephasing_qfi", "F = t^2/(4(e^{tγ}-1)) at A = π/2", EXACT_TOL, Verified)
            .compare(qfi_dephasing_case(10.0, GAMMA)?, sample(FRAC_PI_2, plus, 10.0)?.qfi.value)
            .finish(),
    );

    entries.push(
        Builder::new("longtime_feedback_qfi", "F ≈ e^{-tγ/4} t^2/32 at A = π/3, t = 200", ASYMPTOTIC_TOL, Verified)
            .compare(qfi_longtime_feedback(200.0, GAMMA)?, sample(FRAC_PI_3, plus, 200.0)?.qfi.value)
            .finish(),
    );

    let eps = 0.5;
    entries.push(
        Builder::new("mixed_small_t", "F ≈ ζ(ε) t^2 at A = π/3, ε = 0.5, t = 0.01", SMALL_T_TOL, Verified)
            .compare(
                qfi_mixed_limits(0.01, GAMMA, eps, MixedLimit::SmallT)?,
                sample(FRAC_PI_3, mixed(eps), 0.01)?.qfi.value,
            )
            .finish(),
    );
    entries.push(
        Builder::new("mixed_long_t", "F ≈ ε e^{-tγ/4} t^2/16 at A = π/3, ε = 0.5, t = 200", ASYMPTOTIC_TOL, Verified)
            .compare(
                qfi_mixed_limits(200.0, GAMMA, eps, MixedLimit::LongT)?,
                sample(FRAC_PI_3, mixed(eps), 200.0)?.qfi.value,
            )
            .finish(),
    );
    entries.push(
        Builder::new("mixed_no_feedback", "F = ε t^2/(e^{tγ} - ε) at A = π, ε = 0.5, t = 10", EXACT_TOL, Verified)
            .compare(
                qfi_mixed_limits(10.0, GAMMA, eps, MixedLimit::NoFeedback)?,
                sample(PI, mixed(eps), 10.0)?.qfi.value,
            )
            .finish(),
    );
    entries.push(
        Builder::new(
            "mixed_qfi_as_printed",
            "F = (η1ε + η2ε^2 + η3ε^3)/(η4ε + η5) at A = π/3, ε = 0.5, t = 10",
            EXACT_TOL,
            Erratum,
        )
        .compare(qfi_mixed_as_printed(10.0, GAMMA, eps)?.value, sample(FRAC_PI_3, mixed(eps), 10.0)?.qfi.value)
        .finish(),
    );

    let mut b = Builder::new("steady_state", "rho11 = Ω^2/M, rho12 = N/M", EXACT_TOL, Verified);
    for (omega, gamma, a, beta) in [(0.1, 0.1, FRAC_PI_3, 0.0), (0.3, 0.05, FRAC_PI_3, 0.0), (0.2, 0.3, 1.0, 0.4)] {
        let o = steady_closed_form(omega, gamma, a, beta)?;
        let rho = steady_state(&qubit_liouvillian(&QubitModelParams::new(gamma, omega)?, &FeedbackParams::new(a, beta)?))?;
        let p = rho.get(0, 1);
        b = b
            .compare(o.rho11, rho.get(0, 0).re)
            .compare(o.rho12.re, p.re)
            .compare(o.rho12.im, p.im);
    }
    entries.push(b.finish());

    let fb = FeedbackParams::new(FRAC_PI_3, 0.0)?;
    let mut b = Builder::new(
        "steady_qfi",
        "F = 16Ω^2(3γ^2+Ω^2)/((3γ^2+4Ω^2)(γ^2+8Ω^2)^2) at A = π/3",
        EXACT_TOL,
        Verified,
    );
    for (omega, gamma) in [(0.1, 0.1), (0.032, 0.1), (0.5, 0.2)] {
        b = b.compare(qfi_steady_closed_form(omega, gamma), steady_qfi(gamma, omega, &fb)?.1.value);
    }
    entries.push(b.finish());

    let mut b = Builder::new("steady_rho11_chi", "rho11 = Ω^2/χ with χ = γ^2/2 + 4Ω^2 at A = π/3", EXACT_TOL, Erratum);
    for (omega, gamma) in [(0.1, 0.1), (100.0, 0.1)] {
        let (pair, _) = steady_qfi(gamma, omega, &fb)?;
        b = b.compare(inline_chi_rho11(omega, gamma), pair.rho.get(0, 0).re);
    }
    entries.push(b.finish());

    let (strong, _) = steady_qfi(GAMMA, 100.0, &fb)?;
    entries.push(
        Builder::new("strong_drive_coherence", "rho12 -> 0 as Ω -> ∞ at A = π/3", EXACT_TOL, Note)
            .compare(0.0, strong.rho.get(0, 1).re)
            .finish(),
    );

    Ok(AuditReport { entries })
}
