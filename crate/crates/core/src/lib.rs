//! Dissipative-qubit dynamics under direct photodetection feedback, together
//! with the quantum Fisher information machinery used to quantify how well the
//! effective decay rate can be estimated.
//!
//! The crate is organised bottom-up:
//!
//! * [`qmat`]: small dense complex matrices and Hermitian eigensolvers.
//! * [`model`]: feedback unitary, qubit and qubit+cavity Liouvillians.
//! * [`dynamics`]: RK4 propagation (optionally with forward sensitivities),
//!   steady states and exponential decay fits.
//! * [`metrology`]: QFI (closed 2×2 and spectral forms), SLD, classical
//!   Fisher information, Bures distance, QFI matrix and scalar maximisations.
//! * [`oracles`]: closed-form expressions and the oracle/pipeline audit.
//!
//! Basis convention: qubit states are ordered `(|e⟩, |g⟩)`; composite spaces
//! are `qubit ⊗ cavity` with the Fock index varying fastest. Density matrices
//! are vectorised by column stacking.

pub mod dynamics;
pub mod error;
pub mod metrology;
pub mod model;
pub mod oracles;
pub mod qmat;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
