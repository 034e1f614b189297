//! Physical operators and Lindblad generators.
//!
//! Vectorisation is column stacking: `vec(ρ)[i + j·d] = ρ[i, j]`, so that
//! `A·ρ·B ↦ (Bᵀ ⊗ A)·vec(ρ)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::qmat::{c, ComplexMatrix};

/// Feedback unitary parameters. The feedback duration `δt` is the unit of
/// time, so every rate and time in the crate is expressed in units of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackParams {
    pub a: f64,
    pub beta: f64,
}

impl FeedbackParams {
    pub const DELTA_T: f64 = 1.0;

    pub fn new(a: f64, beta: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(invalid("A", "must be finite"));
        }
        if !beta.is_finite() {
            return Err(invalid("beta", "must be finite"));
        }
        Ok(Self { a, beta })
    }

    /// `A = π`, i.e. `U = −I`: the jump operator is the bare `σ₋`.
    pub fn off() -> Self {
        Self { a: PI, beta: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitModelParams {
    pub gamma: f64,
    pub omega: f64,
}

impl QubitModelParams {
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(invalid("gamma", format!("must be finite and >= 0, got {gamma}")));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(invalid("omega", format!("must be finite and >= 0, got {omega}")));
        }
        Ok(Self { gamma, omega })
    }
}

/// Qubit resonantly coupled to a damped, Fock-truncated cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityQubitParams {
    pub g: f64,
    pub kappa: f64,
    pub gamma0: f64,
    pub omega: f64,
    pub n_max: usize,
}

impl CavityQubitParams {
    pub fn new(g: f64, kappa: f64, omega: f64, n_max: usize) -> Result<Self> {
        Self::with_spontaneous_emission(g, kappa, 0.0, omega, n_max)
    }

    pub fn with_spontaneous_emission(
        g: f64,
        kappa: f64,
        gamma0: f64,
        omega: f64,
        n_max: usize,
    ) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(invalid("g", "must be finite and >= 0"));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(invalid("kappa", "must be finite and > 0"));
        }
        if !(gamma0.is_finite() && gamma0 >= 0.0) {
            return Err(invalid("gamma0", "must be finite and >= 0"));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(invalid("omega", "must be finite and >= 0"));
        }
        if n_max < 1 {
            return Err(invalid("n_max", "must be >= 1"));
        }
        if !(g * g / kappa).is_finite() {
            return Err(invalid("kappa", "effective rate g²/κ is not finite"));
        }
        Ok(Self { g, kappa, gamma0, omega, n_max })
    }

    /// Adiabatic-elimination rate `g²/κ`.
    pub fn effective_rate(&self) -> f64 {
        self.g * self.g / self.kappa
    }

    pub fn hilbert_dim(&self) -> usize {
        2 * (self.n_max + 1)
    }
}

/// Linear generator acting on column-stacked density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    dim: usize,
    generator: ComplexMatrix,
}

impl Liouvillian {
    pub fn zero(dim: usize) -> Self {
        Self { dim, generator: ComplexMatrix::zeros(dim * dim) }
    }

    pub fn from_generator(dim: usize, generator: ComplexMatrix) -> Result<Self> {
        if generator.dim() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, got: generator.dim() });
        }
        Ok(Self { dim, generator })
    }

    /// `X ↦ −i[H, X]`
    pub fn hamiltonian(h: &ComplexMatrix) -> Self {
        let d = h.dim();
        let id = ComplexMatrix::identity(d);
        let minus_i = c(0.0, -1.0);
        let left = id.kron(h);
        let right = h.transpose().kron(&id);
        Self { dim: d, generator: (&left - &right).scale(minus_i) }
    }

    /// `X ↦ rate·(c X c† − ½{c†c, X})`
    pub fn dissipator(rate: f64, op: &ComplexMatrix) -> Self {
        let d = op.dim();
        let id = ComplexMatrix::identity(d);
        let cdc = op.dagger().matmul(op);
        // c X c† ↦ (c̄ ⊗ c)
        let jump = op.conj().kron(op);
        let anti = &id.kron(&cdc) + &cdc.transpose().kron(&id);
        let gen = &jump - &anti.scale_real(0.5);
        Self { dim: d, generator: gen.scale_real(rate) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(x.dim(), self.dim);
        unvectorize(self.dim, &self.generator.matvec(&vectorize(x)))
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, generator: &self.generator + &other.generator }
    }

    pub fn scaled(&self, x: f64) -> Self {
        Self { dim: self.dim, generator: self.generator.scale_real(x) }
    }
}

pub fn vectorize(x: &ComplexMatrix) -> Vec<C64> {
    let d = x.dim();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(x.get(i, j));
        }
    }
    v
}

pub fn unvectorize(dim: usize, v: &[C64]) -> ComplexMatrix {
    assert_eq!(v.len(), dim * dim);
    ComplexMatrix::from_fn(dim, |i, j| v[i + j * dim])
}

/// `σ₋ = |g⟩⟨e|` in the `(|e⟩, |g⟩)` basis.
pub fn sigma_minus() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m.set(1, 0, c(1.0, 0.0));
    m
}

pub fn sigma_plus() -> ComplexMatrix {
    sigma_minus().dagger()
}

pub fn sigma_x() -> ComplexMatrix {
    &sigma_minus() + &sigma_plus()
}

/// `σ_y = −i(σ₊ − σ₋)`
pub fn sigma_y() -> ComplexMatrix {
    (&sigma_plus() - &sigma_minus()).scale(c(0.0, -1.0))
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// Cavity annihilation operator truncated at `n_max` photons.
pub fn annihilation(n_max: usize) -> ComplexMatrix {
    let d = n_max + 1;
    let mut a = ComplexMatrix::zeros(d);
    for n in 1..d {
        a.set(n - 1, n, c((n as f64).sqrt(), 0.0));
    }
    a
}

/// `U = cos A·I + i sin A·(σ_x sin β + σ_y cos β)`, which in the `(|e⟩, |g⟩)`
/// basis is `[[cos A, sin A·e^{iβ}], [−sin A·e^{−iβ}, cos A]]`.
pub fn feedback_unitary(fb: &FeedbackParams) -> ComplexMatrix {
    let (sa, ca) = fb.a.sin_cos();
    let phase = C64::from_polar(1.0, fb.beta);
    ComplexMatrix::from_rows(&[[c(ca, 0.0), phase * sa], [-phase.conj() * sa, c(ca, 0.0)]])
}

/// Jump operator `U σ₋` of the feedback master equation.
pub fn feedback_jump(fb: &FeedbackParams) -> ComplexMatrix {
    feedback_unitary(fb).matmul(&sigma_minus())
}

/// `dρ/dt = −i(Ω/2)[σ_x, ρ] + γ 𝒟[Uσ₋]ρ`
pub fn qubit_liouvillian(m: &QubitModelParams, fb: &FeedbackParams) -> Liouvillian {
    let h = sigma_x().scale_real(0.5 * m.omega);
    Liouvillian::hamiltonian(&h).plus(&Liouvillian::dissipator(m.gamma, &feedback_jump(fb)))
}

/// `∂L/∂γ = 𝒟[Uσ₋]`; the qubit generator is linear in γ.
pub fn qubit_liouvillian_gamma_derivative(fb: &FeedbackParams) -> Liouvillian {
    Liouvillian::dissipator(1.0, &feedback_jump(fb))
}

/// `dρ/dt = −i[H, ρ] + κ𝒟[a]ρ + γ₀𝒟[σ₋]ρ` with
/// `H = (Ω/2)σ_x + g(σ₊a + σ₋a†)` on `qubit ⊗ cavity`.
pub fn cavity_qubit_liouvillian(p: &CavityQubitParams) -> Liouvillian {
    let id_q = ComplexMatrix::identity(2);
    let id_c = ComplexMatrix::identity(p.n_max + 1);
    let a = id_q.kron(&annihilation(p.n_max));
    let sm = sigma_minus().kron(&id_c);
    let sp = sm.dagger();
    let coupling = &sp.matmul(&a) + &sm.matmul(&a.dagger());
    let drive = sigma_x().kron(&id_c).scale_real(0.5 * p.omega);
    let h = &drive + &coupling.scale_real(p.g);
    Liouvillian::hamiltonian(&h)
        .plus(&Liouvillian::dissipator(p.kappa, &a))
        .plus(&Liouvillian::dissipator(p.gamma0, &sm))
}

/// `|e⟩⟨e| ⊗ I_cavity`
pub fn excited_projector(n_max: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, 0.0]).kron(&ComplexMatrix::identity(n_max + 1))
}

/// Photon number `I ⊗ a†a`.
pub fn photon_number(n_max: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
    ComplexMatrix::identity(2).kron(&ComplexMatrix::from_real_diag(&diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    fn random_matrix(dim: usize, seed: &[f64]) -> ComplexMatrix {
        let mut it = seed.iter().cycle();
        ComplexMatrix::from_fn(dim, |_, _| c(*it.next().unwrap(), *it.next().unwrap()))
    }

    #[test]
    fn vectorization_convention_round_trips() {
        let a = random_matrix(3, &[0.3, -1.2, 0.7, 2.0, -0.4, 1.1, 0.9]);
        let b = random_matrix(3, &[1.5, 0.2, -0.8, 0.6, -1.9]);
        let x = random_matrix(3, &[0.1, 0.4, -0.3, 1.7, -0.2, 0.5, 0.8, -1.0]);
        assert_eq!(unvectorize(3, &vectorize(&x)), x);
        // A X B ↦ (Bᵀ ⊗ A) vec(X)
        let lhs = vectorize(&a.matmul(&x).matmul(&b));
        let rhs = b.transpose().kron(&a).matvec(&vectorize(&x));
        for (l, r) in lhs.iter().zip(&rhs) {
            assert!((l - r).norm() < 1e-13);
        }
        assert_eq!(vectorize(&x)[1], x.get(1, 0));
    }

    #[test]
    fn pauli_algebra_in_excited_first_basis() {
        let prod = sigma_x().matmul(&sigma_y());
        assert!(close(&prod, &sigma_z().scale(c(0.0, 1.0)), 1e-15));
        let spsm = sigma_plus().matmul(&sigma_minus());
        assert!(close(&spsm, &ComplexMatrix::from_real_diag(&[1.0, 0.0]), 0.0));
    }

    #[test]
    fn feedback_unitary_examples() {
        let id = ComplexMatrix::identity(2);
        assert!(close(&feedback_unitary(&FeedbackParams::new(0.0, 0.7).unwrap()), &id, 0.0));
        for beta in [0.0, 0.3, 2.0] {
            let u = feedback_unitary(&FeedbackParams::new(PI, beta).unwrap());
            assert!(close(&u, &id.scale_real(-1.0), 1e-15));
        }
        let u = feedback_unitary(&FeedbackParams::new(FRAC_PI_3, 0.0).unwrap());
        let s3 = 3f64.sqrt() / 2.0;
        let expect = ComplexMatrix::from_rows(&[[c(0.5, 0.0), c(s3, 0.0)], [c(-s3, 0.0), c(0.5, 0.0)]]);
        assert!(close(&u, &expect, 1e-15));
    }

    #[test]
    fn feedback_unitary_matches_pauli_form() {
        for (a, beta) in [(0.4, 0.0), (FRAC_PI_3, 1.3), (2.5, -0.6)] {
            let fb = FeedbackParams::new(a, beta).unwrap();
            let gen = &sigma_x().scale_real(beta.sin()) + &sigma_y().scale_real(beta.cos());
            let expect = &ComplexMatrix::identity(2).scale_real(a.cos()) + &gen.scale(c(0.0, a.sin()));
            assert!(close(&feedback_unitary(&fb), &expect, 1e-15));
        }
    }

    #[test]
    fn bare_decay_of_excited_state() {
        let m = QubitModelParams::new(0.1, 0.0).unwrap();
        let l = qubit_liouvillian(&m, &FeedbackParams::off());
        let out = l.apply(&ComplexMatrix::from_real_diag(&[1.0, 0.0]));
        assert!(close(&out, &ComplexMatrix::from_real_diag(&[-0.1, 0.1]), 1e-16));
    }

    #[test]
    fn feedback_generator_on_maximally_mixed_state() {
        // c = sinA|e⟩⟨e| + cosA|g⟩⟨e|, cI/2c† − ½c†c = (γ/2)[[−1/4, √3/4], [√3/4, 1/4]].
        let gamma = 0.1;
        let m = QubitModelParams::new(gamma, 0.0).unwrap();
        let l = qubit_liouvillian(&m, &FeedbackParams::new(FRAC_PI_3, 0.0).unwrap());
        let out = l.apply(&ComplexMatrix::identity(2).scale_real(0.5));
        let q = 3f64.sqrt() / 4.0;
        let expect = ComplexMatrix::from_rows(&[[c(-0.25, 0.0), c(q, 0.0)], [c(q, 0.0), c(0.25, 0.0)]])
            .scale_real(gamma / 2.0);
        assert!(close(&out, &expect, 1e-16));
    }

    #[test]
    fn jump_operator_norm_is_excited_projector() {
        for (a, beta) in [(0.2, 0.0), (FRAC_PI_4, 0.5), (FRAC_PI_2, 1.0)] {
            let cj = feedback_jump(&FeedbackParams::new(a, beta).unwrap());
            let cdc = cj.dagger().matmul(&cj);
            assert!(close(&cdc, &ComplexMatrix::from_real_diag(&[1.0, 0.0]), 1e-15));
        }
    }

    #[test]
    fn feedback_off_equals_bare_decay() {
        let m = QubitModelParams::new(0.37, 0.0).unwrap();
        let bare = Liouvillian::dissipator(0.37, &sigma_minus());
        for a in [0.0, PI] {
            let l = qubit_liouvillian(&m, &FeedbackParams::new(a, 0.9).unwrap());
            assert!(close(l.generator(), bare.generator(), 1e-14));
        }
    }

    #[test]
    fn cavity_vacuum_is_stationary_without_coupling() {
        let p = CavityQubitParams::new(0.0, 1.0, 0.0, 3).unwrap();
        let l = cavity_qubit_liouvillian(&p);
        assert_eq!(l.generator().dim(), 4 * 16);
        let mut rho = ComplexMatrix::zeros(8);
        rho.set(0, 0, c(1.0, 0.0));
        assert!(l.apply(&rho).max_abs() < 1e-16);
    }

    #[test]
    fn cavity_photon_number_decays_at_kappa() {
        let kappa = 0.7;
        let p = CavityQubitParams::new(0.0, kappa, 0.0, 2).unwrap();
        let l = cavity_qubit_liouvillian(&p);
        // |g⟩⊗|1⟩ has index 1·3 + 1.
        let mut rho = ComplexMatrix::zeros(6);
        rho.set(4, 4, c(1.0, 0.0));
        let n_op = photon_number(2);
        let n = n_op.trace_product(&rho).re;
        let dn = n_op.trace_product(&l.apply(&rho)).re;
        assert!((dn + kappa * n).abs() < 1e-15);
    }

    #[test]
    fn cavity_generator_shapes() {
        for n_max in 1..5 {
            let p = CavityQubitParams::new(0.1, 2.0, 0.3, n_max).unwrap();
            let l = cavity_qubit_liouvillian(&p);
            assert_eq!(l.generator().dim(), 4 * (n_max + 1) * (n_max + 1));
            assert_eq!(l.dim(), p.hilbert_dim());
        }
        assert!(CavityQubitParams::new(0.1, 0.0, 0.0, 2).is_err());
        assert!(CavityQubitParams::new(0.1, 1.0, 0.0, 0).is_err());
    }

    proptest! {
        #[test]
        fn period_pi_generator_equality(
            a in -4.0f64..4.0, beta in -4.0f64..4.0, gamma in 0.0f64..2.0, omega in 0.0f64..2.0,
        ) {
            let m = QubitModelParams::new(gamma, omega).unwrap();
            let l0 = qubit_liouvillian(&m, &FeedbackParams::new(a, beta).unwrap());
            let l1 = qubit_liouvillian(&m, &FeedbackParams::new(a + PI, beta).unwrap());
            prop_assert!(close(l0.generator(), l1.generator(), 1e-14));
        }

        #[test]
        fn generators_preserve_trace_and_hermiticity(
            a in -4.0f64..4.0, beta in -4.0f64..4.0, gamma in 0.0f64..2.0, omega in 0.0f64..2.0,
            seed in proptest::collection::vec(-1.0f64..1.0, 8),
        ) {
            let m = QubitModelParams::new(gamma, omega).unwrap();
            let l = qubit_liouvillian(&m, &FeedbackParams::new(a, beta).unwrap());
            let x = random_matrix(2, &seed);
            let lx = l.apply(&x);
            prop_assert!(lx.trace().norm() <= 1e-12);
            prop_assert!((&l.apply(&x.dagger()) - &lx.dagger()).max_abs() <= 1e-12);

            let cav = cavity_qubit_liouvillian(&CavityQubitParams::with_spontaneous_emission(
                gamma, 1.0 + omega, 0.1, omega, 2).unwrap());
            let y = random_matrix(6, &seed);
            let ly = cav.apply(&y);
            prop_assert!(ly.trace().norm() <= 1e-12);
            prop_assert!((&cav.apply(&y.dagger()) - &ly.dagger()).max_abs() <= 1e-12);
        }
    }
}
