use crate::dynamics::SensitivityPair;
use crate::error::{Error, Result};
use crate::qmat::{eig_hermitian, ComplexMatrix};

/// Outcomes with probability at or below this are skipped.
pub const PROBABILITY_TOL: f64 = 1e-12;
const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalFiResult {
    pub value: f64,
}

/// Rank-one projectors onto the columns of an orthonormal basis.
pub fn projective_povm(basis: &ComplexMatrix) -> Vec<ComplexMatrix> {
    (0..basis.dim())
        .map(|k| {
            let v = basis.column(k);
            ComplexMatrix::outer(&v, &v)
        })
        .collect()
}

/// `H = Σ_i (Tr E_i∂ρ)² / Tr E_iρ` over outcomes with non-negligible
/// probability.
pub fn classical_fisher(povm: &[ComplexMatrix], pair: &SensitivityPair) -> Result<ClassicalFiResult> {
    let dim = pair.dim();
    if povm.is_empty() {
        return Err(Error::InvalidPovm("no effects".into()));
    }
    let mut total = ComplexMatrix::zeros(dim);
    for (i, e) in povm.iter().enumerate() {
        if e.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: e.dim() });
        }
        let min = eig_hermitian(e).map_err(|_| Error::InvalidPovm(format!("effect {i} is not Hermitian")))?
            .eigenvalues[0];
        if min < -COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!("effect {i} has negative eigenvalue {min:.3e}")));
        }
        total += e;
    }
    let defect = (&total - &ComplexMatrix::identity(dim)).frobenius_norm();
    if defect > COMPLETENESS_TOL {
        return Err(Error::InvalidPovm(format!("effects sum to identity only within {defect:.3e}")));
    }

    let value = povm
        .iter()
        .filter_map(|e| {
            let p = e.trace_product(pair.rho.matrix()).re;
            (p > PROBABILITY_TOL).then(|| e.trace_product(&pair.drho).re.powi(2) / p)
        })
        .sum();
    Ok(ClassicalFiResult { value })
}
