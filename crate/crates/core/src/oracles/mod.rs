//! Closed-form expressions for the feedback qubit, kept exactly as derived
//! analytically (including the ones that turn out to be wrong), and the
//! [`audit`] that checks each against the numeric pipeline.
//!
//! Rewrites are limited to algebraically identical forms that avoid
//! cancellation, such as `e^{tγ} − 1 = expm1(tγ)`.

mod audit;

use crate::error::{invalid, Result};
use crate::C64;

pub use audit::{audit, AuditEntry, AuditReport, Expectation, Observation};

/// Intermediate quantities shared by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTerms {
    /// `γ cos²A`, the population decay rate under feedback.
    pub gamma_q: f64,
    /// Coherence factor `Y = (1 − e^{−tγcos(2A)/2}) tan(2A)`.
    pub y_factor: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    pub eta4: f64,
    pub eta5: f64,
    /// Small-time enhancement `ζ(ε)`; infinite at `ε = 1`.
    pub zeta: f64,
    /// `γ²/2 + 4Ω²`
    pub chi: f64,
    pub n_num: C64,
    pub m_den: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub t: f64,
    pub gamma: f64,
    pub a: f64,
    pub beta: f64,
    pub omega: f64,
    pub epsilon: f64,
}

impl ClosedFormTerms {
    pub fn evaluate(p: &Params) -> Self {
        let Params { t, gamma, a, beta, omega, epsilon: e } = *p;
        let ca2 = a.cos().powi(2);
        let s2a = (2.0 * a).sin();
        let tg = t * gamma;
        Self {
            gamma_q: gamma * ca2,
            y_factor: y_factor(t, gamma, a).0,
            eta1: -(1.5 * tg).exp() * t * t / 2.0,
            eta2: (-12.0 * (0.75 * tg).exp() + 6.0 * tg.exp()) * t * t,
            eta3: 6.0 * (0.5 * tg).exp() * t * t,
            eta4: 8.0 * ((1.5 * tg).exp() + 3.0 * (tg.exp() - 2.0 * (1.25 * tg).exp() + (3.0 * tg).exp() / 2.0)),
            eta5: -8.0 * (1.75 * tg).exp(),
            zeta: e * (-1.0 - 12.0 * e + 12.0 * e * e) / (16.0 * (e - 1.0)),
            chi: gamma * gamma / 2.0 + 4.0 * omega * omega,
            n_num: C64::new(omega * omega * s2a * beta.cos(), -omega * ca2 * gamma),
            m_den: omega * s2a * gamma * beta.sin() + 2.0 * omega * omega + ca2 * gamma * gamma,
        }
    }
}

fn check_time(t: f64, gamma: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", "must be finite and >= 0"));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(invalid("gamma", "must be finite and > 0"));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(invalid("epsilon", format!("must lie in [0, 1), got {epsilon}")));
    }
    Ok(())
}

/// `Y` and whether the `A = π/4` limit was used. Written as
/// `−expm1(−tγc/2)·sin(2A)/c` with `c = cos 2A`, which is the printed form
/// with `tan 2A` expanded and tends to `tγ sin(2A)/2` as `c → 0`.
fn y_factor(t: f64, gamma: f64, a: f64) -> (f64, bool) {
    let c = (2.0 * a).cos();
    let s = (2.0 * a).sin();
    if c.abs() < 1e-12 {
        (t * gamma / 2.0 * s, true)
    } else {
        (-(-t * gamma * c / 2.0).exp_m1() / c * s, false)
    }
}

/// `F = t²e^{−tγ}(2e^{tγ} − 1)/(4(e^{tγ} − 1))` for the equal-weight
/// superposition without feedback, as `t²x(2 − x)/(4(1 − x))` with
/// `x = e^{−tγ}`. Zero at `t = 0`.
pub fn qfi_no_feedback(t: f64, gamma: f64) -> Result<f64> {
    check_time(t, gamma)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = (-t * gamma).exp();
    Ok(t * t * x * (2.0 - x) / (4.0 * -(-t * gamma).exp_m1()))
}

/// `t/(4γ) + t²/8`, the small-time expansion of [`qfi_no_feedback`].
pub fn qfi_no_feedback_small_t(t: f64, gamma: f64) -> f64 {
    t / (4.0 * gamma) + t * t / 8.0
}

/// Qubit elements under feedback with `β = 0` and no drive, starting from
/// the equal-weight superposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackState {
    pub rho11: f64,
    pub rho12: f64,
    /// `A = π/4`, where `tan 2A` diverges and the continuous limit of `Y`
    /// was used.
    pub singular_limit: bool,
}

/// `ρ₁₁ = e^{−tγcos²A}/2`, `ρ₁₂ = (e^{−tγ/2}/2)(1 + Y)`.
pub fn rho_with_feedback(t: f64, gamma: f64, a: f64) -> Result<FeedbackState> {
    check_time(t, gamma)?;
    let (y, singular_limit) = y_factor(t, gamma, a);
    Ok(FeedbackState {
        rho11: (-t * gamma * a.cos().powi(2)).exp() / 2.0,
        rho12: (-t * gamma / 2.0).exp() / 2.0 * (1.0 + y),
        singular_limit,
    })
}

/// `t²/(4(e^{tγ} − 1))` at `A = π/2`.
pub fn qfi_dephasing_case(t: f64, gamma: f64) -> Result<f64> {
    check_time(t, gamma)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(t * t / (4.0 * (t * gamma).exp_m1()))
}

/// `e^{−tγ/4}t²/32`, the long-time QFI at `A = π/3`.
pub fn qfi_longtime_feedback(t: f64, gamma: f64) -> Result<f64> {
    check_time(t, gamma)?;
    Ok((-t * gamma / 4.0).exp() * t * t / 32.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsPrinted {
    pub value: f64,
    /// A Fisher information cannot be negative; a negative value marks the
    /// expression as unreliable at this point.
    pub negative: bool,
}

/// `(η₁ε + η₂ε² + η₃ε³)/(η₄ε + η₅)` for a mixed initial state at `A = π/3`,
/// with the coefficients exactly as originally published.
pub fn qfi_mixed_as_printed(t: f64, gamma: f64, epsilon: f64) -> Result<AsPrinted> {
    check_time(t, gamma)?;
    check_epsilon(epsilon)?;
    let k = ClosedFormTerms::evaluate(&Params { t, gamma, a: 0.0, beta: 0.0, omega: 0.0, epsilon });
    let e = epsilon;
    let value = (k.eta1 * e + k.eta2 * e * e + k.eta3 * e * e * e) / (k.eta4 * e + k.eta5);
    Ok(AsPrinted { value, negative: value < 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixedLimit {
    /// `ζ(ε)t²` at `A = π/3`.
    SmallT,
    /// `εe^{−tγ/4}t²/16` at `A = π/3`.
    LongT,
    /// `εt²/(e^{tγ} − ε)` at `A = π`, exact for all `t`.
    NoFeedback,
}

pub fn qfi_mixed_limits(t: f64, gamma: f64, epsilon: f64, which: MixedLimit) -> Result<f64> {
    check_time(t, gamma)?;
    check_epsilon(epsilon)?;
    let e = epsilon;
    Ok(match which {
        MixedLimit::SmallT => {
            let k = ClosedFormTerms::evaluate(&Params { t, gamma, a: 0.0, beta: 0.0, omega: 0.0, epsilon });
            if !k.zeta.is_finite() {
                return Err(invalid("epsilon", "small-time factor diverges"));
            }
            k.zeta * t * t
        }
        MixedLimit::LongT => e * (-t * gamma / 4.0).exp() * t * t / 16.0,
        MixedLimit::NoFeedback => e * t * t / ((t * gamma).exp() - e),
    })
}

/// Driven steady state `ρ₁₁ = Ω²/M`, `ρ₁₂ = N/M` and its γ-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyClosedForm {
    pub rho11: f64,
    pub rho12: C64,
    pub drho11: f64,
    pub drho12: C64,
}

/// `N = Ω[Ω sin(2A) cos β − i cos²A γ]`,
/// `M = Ω sin(2A) γ sin β + 2Ω² + cos²A γ²`.
pub fn steady_closed_form(omega: f64, gamma: f64, a: f64, beta: f64) -> Result<SteadyClosedForm> {
    let k = ClosedFormTerms::evaluate(&Params { t: 0.0, gamma, a, beta, omega, epsilon: 0.0 });
    if k.m_den.is_nan() || k.m_den <= 0.0 {
        return Err(invalid("omega", format!("denominator M = {} must be > 0", k.m_den)));
    }
    let m = k.m_den;
    let ca2 = a.cos().powi(2);
    let dm = omega * (2.0 * a).sin() * beta.sin() + 2.0 * ca2 * gamma;
    let dn = C64::new(0.0, -omega * ca2);
    Ok(SteadyClosedForm {
        rho11: omega * omega / m,
        rho12: k.n_num / m,
        drho11: -omega * omega * dm / (m * m),
        drho12: (dn * m - k.n_num * dm) / (m * m),
    })
}

/// `16Ω²(3γ² + Ω²)/((3γ² + 4Ω²)(γ² + 8Ω²)²)`, the steady-state QFI at
/// `A = π/3`, `β = 0`.
pub fn qfi_steady_closed_form(omega: f64, gamma: f64) -> f64 {
    let (w2, g2) = (omega * omega, gamma * gamma);
    16.0 * w2 * (3.0 * g2 + w2) / ((3.0 * g2 + 4.0 * w2) * (g2 + 8.0 * w2).powi(2))
}

/// `Ω²/χ`, the population stated alongside the `A = π/3` steady state.
pub fn inline_chi_rho11(omega: f64, gamma: f64) -> f64 {
    let k = ClosedFormTerms::evaluate(&Params { t: 0.0, gamma, a: 0.0, beta: 0.0, omega, epsilon: 0.0 });
    omega * omega / k.chi
}
