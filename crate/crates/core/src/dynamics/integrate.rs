//! Classical fixed-step RK4 for `dρ/dt = L(ρ)` and for the joint forward
//! sensitivity system `d(∂ρ)/dt = L(∂ρ) + (∂L)(ρ)`.

use num_complex::Complex64 as C64;

use super::{DensityMatrix, SensitivityPair};
use crate::error::{invalid, Error, Result};
use crate::model::{unvectorize, vectorize, CavityQubitParams, Liouvillian, QubitModelParams};
use crate::qmat::{eig_hermitian, ComplexMatrix};

/// Propagation aborts when an output state has an eigenvalue below this.
pub const POSITIVITY_ABORT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub dt: f64,
}

impl StepConfig {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        Ok(Self { dt })
    }

    /// `1e-2 · min(1, 1/r)` over the positive rates supplied.
    pub fn for_rates(rates: &[f64]) -> Self {
        let fastest = rates.iter().copied().filter(|r| *r > 0.0).fold(1.0, f64::max);
        Self { dt: 1e-2 / fastest }
    }

    pub fn for_qubit(m: &QubitModelParams) -> Self {
        Self::for_rates(&[m.gamma, m.omega])
    }

    pub fn for_cavity(p: &CavityQubitParams) -> Self {
        Self::for_rates(&[p.effective_rate(), p.g, p.kappa, p.gamma0, p.omega])
    }

    pub fn halved(&self) -> Self {
        Self { dt: self.dt / 2.0 }
    }
}

/// Compressed sparse row copy of a generator; the qubit and cavity
/// generators are mostly zeros.
#[derive(Debug, Clone)]
struct Csr {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl Csr {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let n = m.dim();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            row_start.push(cols.len());
            for j in 0..n {
                let z = m.get(i, j);
                if z.re != 0.0 || z.im != 0.0 {
                    cols.push(j);
                    vals.push(z);
                }
            }
        }
        row_start.push(cols.len());
        Self { row_start, cols, vals }
    }

    /// `out = A·x` (or `out += A·x` when `accumulate`).
    #[inline]
    fn apply(&self, x: &[C64], out: &mut [C64], accumulate: bool) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            if accumulate {
                *o += acc;
            } else {
                *o = acc;
            }
        }
    }
}

/// Joint `(vec ρ, vec ∂ρ)` state. Without a derivative generator only the
/// first half is used.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    pub t: f64,
    rho: Vec<C64>,
    drho: Option<Vec<C64>>,
}

impl JointState {
    pub fn rho_matrix(&self, dim: usize) -> ComplexMatrix {
        unvectorize(dim, &self.rho)
    }

    pub fn drho_matrix(&self, dim: usize) -> Option<ComplexMatrix> {
        self.drho.as_ref().map(|d| unvectorize(dim, d))
    }
}

/// Fixed-step RK4 propagator bound to one generator (and optionally its
/// parameter derivative).
#[derive(Debug, Clone)]
pub struct Propagator {
    dim: usize,
    gen: Csr,
    dgen: Option<Csr>,
    step: StepConfig,
}

impl Propagator {
    pub fn new(l: &Liouvillian, step: StepConfig) -> Self {
        Self { dim: l.dim(), gen: Csr::from_dense(l.generator()), dgen: None, step }
    }

    pub fn with_sensitivity(l: &Liouvillian, dl: &Liouvillian, step: StepConfig) -> Result<Self> {
        if dl.dim() != l.dim() {
            return Err(Error::DimensionMismatch { expected: l.dim(), got: dl.dim() });
        }
        Ok(Self {
            dim: l.dim(),
            gen: Csr::from_dense(l.generator()),
            dgen: Some(Csr::from_dense(dl.generator())),
            step,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> StepConfig {
        self.step
    }

    /// State at `t = 0`; the initial state does not depend on the parameter,
    /// so `∂ρ(0) = 0`.
    pub fn initial(&self, rho0: &DensityMatrix) -> Result<JointState> {
        if rho0.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: rho0.dim() });
        }
        let rho = vectorize(rho0.matrix());
        let drho = self.dgen.as_ref().map(|_| vec![C64::new(0.0, 0.0); rho.len()]);
        Ok(JointState { t: 0.0, rho, drho })
    }

    fn rhs(&self, rho: &[C64], drho: Option<&[C64]>, k_rho: &mut [C64], k_drho: Option<&mut [C64]>) {
        self.gen.apply(rho, k_rho, false);
        if let (Some(d), Some(kd), Some(dg)) = (drho, k_drho, self.dgen.as_ref()) {
            self.gen.apply(d, kd, false);
            dg.apply(rho, kd, true);
        }
    }

    /// Advances `state` by `duration` using `ceil(duration/dt)` equal steps.
    pub fn advance(&self, state: &mut JointState, duration: f64) {
        if duration <= 0.0 {
            return;
        }
        let n = ((duration / self.step.dt) - 1e-9).ceil().max(1.0) as usize;
        let h = duration / n as f64;
        let len = state.rho.len();
        let sens = state.drho.is_some();
        let mut k = [(); 4].map(|_| vec![C64::new(0.0, 0.0); len]);
        let mut kd = [(); 4].map(|_| vec![C64::new(0.0, 0.0); if sens { len } else { 0 }]);
        let mut tmp = vec![C64::new(0.0, 0.0); len];
        let mut tmpd = vec![C64::new(0.0, 0.0); if sens { len } else { 0 }];

        for _ in 0..n {
            {
                let (k0, kd0) = (&mut k[0], &mut kd[0]);
                self.rhs(&state.rho, state.drho.as_deref(), k0, sens.then_some(kd0.as_mut_slice()));
            }
            for stage in 1..4 {
                let coef = if stage == 3 { h } else { 0.5 * h };
                for i in 0..len {
                    tmp[i] = state.rho[i] + k[stage - 1][i] * coef;
                }
                if let Some(d) = &state.drho {
                    for i in 0..len {
                        tmpd[i] = d[i] + kd[stage - 1][i] * coef;
                    }
                }
                let (ks, kds) = (&mut k[stage], &mut kd[stage]);
                self.rhs(&tmp, sens.then_some(tmpd.as_slice()), ks, sens.then_some(kds.as_mut_slice()));
            }
            let w = h / 6.0;
            for (i, r) in state.rho.iter_mut().enumerate() {
                *r += (k[0][i] + (k[1][i] + k[2][i]) * 2.0 + k[3][i]) * w;
            }
            if let Some(d) = state.drho.as_mut() {
                for i in 0..len {
                    d[i] += (kd[0][i] + (kd[1][i] + kd[2][i]) * 2.0 + kd[3][i]) * w;
                }
            }
        }
        state.t += duration;
    }

    /// Advances to absolute time `t` (no-op when `t` is not ahead) and pins
    /// `state.t` to exactly `t`.
    pub fn advance_to(&self, state: &mut JointState, t: f64) {
        let duration = t - state.t;
        if duration > 0.0 {
            self.advance(state, duration);
            state.t = t;
        }
    }

    /// Validates positivity and packages the state.
    pub fn density(&self, state: &JointState) -> Result<DensityMatrix> {
        let m = state.rho_matrix(self.dim);
        let min = eig_hermitian(&m.hermitian_part())?.eigenvalues[0];
        if min < -POSITIVITY_ABORT {
            return Err(Error::PositivityViolation { t: state.t, min_eigenvalue: min, step: self.step.dt });
        }
        Ok(DensityMatrix::from_trusted(m))
    }

    pub fn pair(&self, state: &JointState) -> Result<SensitivityPair> {
        let rho = self.density(state)?;
        let drho = state
            .drho_matrix(self.dim)
            .ok_or_else(|| invalid("propagator", "no derivative generator configured"))?;
        Ok(SensitivityPair::from_trusted(rho, drho))
    }

    fn walk<T>(
        &self,
        rho0: &DensityMatrix,
        t_grid: &[f64],
        mut emit: impl FnMut(&Self, &JointState) -> Result<T>,
    ) -> Result<Vec<T>> {
        check_grid(t_grid)?;
        let mut state = self.initial(rho0)?;
        let mut out = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            self.advance_to(&mut state, t);
            out.push(emit(self, &state)?);
        }
        Ok(out)
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if let Some(&t0) = t_grid.first() {
        if !(t0.is_finite() && t0 >= 0.0) {
            return Err(invalid("t_grid", "first time must be finite and >= 0"));
        }
    }
    if t_grid.windows(2).any(|w| !(w[0].is_finite() && w[1].is_finite()) || w[1] < w[0]) {
        return Err(invalid("t_grid", "times must be finite and ascending"));
    }
    Ok(())
}

/// States on `t_grid`; the initial state is taken at `t = 0`.
pub fn propagate(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    step: StepConfig,
) -> Result<Vec<DensityMatrix>> {
    let p = Propagator::new(l, step);
    p.walk(rho0, t_grid, |p, s| p.density(s))
}

/// `(ρ, ∂ρ)` on `t_grid`, integrated with one shared step sequence.
pub fn propagate_with_sensitivity(
    l: &Liouvillian,
    dl: &Liouvillian,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    step: StepConfig,
) -> Result<Vec<SensitivityPair>> {
    let p = Propagator::with_sensitivity(l, dl, step)?;
    p.walk(rho0, t_grid, |p, s| p.pair(s))
}
