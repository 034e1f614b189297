use num_complex::Complex64 as C64;

use super::{c, inner, vec_norm, ComplexMatrix, ZERO};
use crate::error::{invalid, Error, Result};

/// Relative Hermiticity tolerance accepted by [`eig_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Jacobi sweeps stop once the off-diagonal Frobenius norm falls below this
/// fraction of `max(1, ‖H‖_F)`.
const JACOBI_OFF_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this (relative to `max(1, ‖H‖_F)`) form a
/// degenerate block whose eigenvectors are re-orthonormalised.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Largest negative eigenvalue tolerated (and clipped) by [`psd_sqrt`].
pub const PSD_TOL: f64 = 1e-10;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenSystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `Σ_k f(λ_k) |v_k⟩⟨v_k|`
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v.get(i, k) * v.get(j, k).conj() * f(self.eigenvalues[k])).sum()
        })
    }
}

/// Hermitian eigendecomposition.
///
/// 2×2 inputs use the closed-form quadratic solution (the smaller-magnitude
/// root is recovered as `det/λ_big` so tiny eigenvalues keep their relative
/// accuracy); larger inputs use cyclic complex Jacobi rotations.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<EigenSystem> {
    let n = h.dim();
    if n < 2 {
        return Err(invalid("dim", "eigensolver requires dim >= 2"));
    }
    if !h.is_finite() {
        return Err(invalid("matrix", "non-finite entries"));
    }
    let scale = h.frobenius_norm().max(1.0);
    let defect = h.hermiticity_defect();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let h = h.hermitian_part();
    let mut sys = if n == 2 { eig2(&h) } else { jacobi(&h) };
    orthonormalize_degenerate(&mut sys, DEGENERACY_TOL * scale);
    Ok(sys)
}

fn eig2(h: &ComplexMatrix) -> EigenSystem {
    let a = h.get(0, 0).re;
    let d = h.get(1, 1).re;
    let b = h.get(0, 1);
    let mean = 0.5 * (a + d);
    let half_diff = 0.5 * (a - d);
    let r = half_diff.hypot(b.norm());
    let det = a * d - b.norm_sqr();

    let (lo, hi) = if mean >= 0.0 {
        let hi = mean + r;
        (if hi != 0.0 { det / hi } else { 0.0 }, hi)
    } else {
        let lo = mean - r;
        (lo, if lo != 0.0 { det / lo } else { 0.0 })
    };

    if b.norm() == 0.0 {
        // Already diagonal.
        let (vals, swap) = if a <= d { ([a, d], false) } else { ([d, a], true) };
        let v = if swap {
            ComplexMatrix::from_rows(&[[ZERO, c(1.0, 0.0)], [c(1.0, 0.0), ZERO]])
        } else {
            ComplexMatrix::identity(2)
        };
        return EigenSystem { eigenvalues: vals.to_vec(), eigenvectors: v };
    }

    // Two algebraically equivalent eigenvector candidates for `lo`; keep the
    // better-conditioned one.
    let cand1 = [b, c(lo - a, 0.0)];
    let cand2 = [c(lo - d, 0.0), b.conj()];
    let pick = if vec_norm(&cand1) >= vec_norm(&cand2) { cand1 } else { cand2 };
    let nrm = vec_norm(&pick);
    let v0 = [pick[0] / nrm, pick[1] / nrm];
    let v1 = [-v0[1].conj(), v0[0].conj()];
    let vecs = ComplexMatrix::from_rows(&[[v0[0], v1[0]], [v0[1], v1[1]]]);
    EigenSystem { eigenvalues: vec![lo, hi], eigenvectors: vecs }
}

fn jacobi(h: &ComplexMatrix) -> EigenSystem {
    let n = h.dim();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_OFF_TOL * h.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_norm(&a) <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq / mag;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                // Unitary acting on the (p, q) plane: diag(1, e^{-iφ})·R(θ).
                let vpp = c(cs, 0.0);
                let vpq = c(sn, 0.0);
                let vqp = -phase.conj() * sn;
                let vqq = phase.conj() * cs;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * vpp + akq * vqp);
                    a.set(k, q, akp * vpq + akq * vqq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, vpp.conj() * apk + vqp.conj() * aqk);
                    a.set(q, k, vpq.conj() * apk + vqq.conj() * aqk);
                }
                a.set(p, q, ZERO);
                a.set(q, p, ZERO);
                a.set(p, p, c(a.get(p, p).re, 0.0));
                a.set(q, q, c(a.get(q, q).re, 0.0));

                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, vkp * vpp + vkq * vqp);
                    v.set(k, q, vkp * vpq + vkq * vqq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps ties in index order, so output is deterministic.
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
    let eigenvalues = order.iter().map(|&k| a.get(k, k).re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, |i, j| v.get(i, order[j]));
    EigenSystem { eigenvalues, eigenvectors }
}

fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Modified Gram-Schmidt within each block of (near-)equal eigenvalues, in
/// column order.
fn orthonormalize_degenerate(sys: &mut EigenSystem, tol: f64) {
    let n = sys.eigenvalues.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && sys.eigenvalues[end] - sys.eigenvalues[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let mut cols: Vec<Vec<C64>> = (start..end).map(|k| sys.vector(k)).collect();
            for i in 0..cols.len() {
                for j in 0..i {
                    let proj = inner(&cols[j], &cols[i]);
                    let (head, tail) = cols.split_at_mut(i);
                    for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                        *x -= proj * y;
                    }
                }
                let nrm = vec_norm(&cols[i]);
                for x in cols[i].iter_mut() {
                    *x /= nrm;
                }
            }
            for (off, col) in cols.iter().enumerate() {
                for (i, &z) in col.iter().enumerate() {
                    sys.eigenvectors.set(i, start + off, z);
                }
            }
        }
        start = end;
    }
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-1e-10, 0)` are clipped to zero; anything more negative is rejected.
pub fn psd_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sys = eig_hermitian(p)?;
    let min = sys.eigenvalues[0];
    if min < -PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(sys.reconstruct_with(|l| l.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_hermitian(dim: usize, seed: &[f64]) -> ComplexMatrix {
        let mut it = seed.iter().cycle();
        let mut m = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, c(*it.next().unwrap(), 0.0));
            for j in i + 1..dim {
                let z = c(*it.next().unwrap(), *it.next().unwrap());
                m.set(i, j, z);
                m.set(j, i, z.conj());
            }
        }
        m
    }

    fn check_system(h: &ComplexMatrix, sys: &EigenSystem) {
        let n = h.dim();
        let hn = h.frobenius_norm().max(1.0);
        for k in 0..n {
            let v = sys.vector(k);
            let hv = h.matvec(&v);
            let res: f64 = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * sys.eigenvalues[k]).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-12 * hn, "residual {res:e} for pair {k}");
            for j in 0..n {
                let ip = inner(&sys.vector(j), &v);
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((ip - c(expect, 0.0)).norm() <= 1e-12);
            }
        }
        for w in sys.eigenvalues.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let rec = sys.reconstruct_with(|l| l);
        assert!((&rec - h).frobenius_norm() <= 1e-12 * hn);
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let sys = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(sys.eigenvalues, vec![1.0, 1.0]);
        let sys = eig_hermitian(&ComplexMatrix::identity(4)).unwrap();
        assert_eq!(sys.eigenvalues, vec![1.0; 4]);
    }

    #[test]
    fn sigma_z_eigenvalues_ascending() {
        let sz = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
        let sys = eig_hermitian(&sz).unwrap();
        assert_eq!(sys.eigenvalues, vec![-1.0, 1.0]);
        check_system(&sz, &sys);
    }

    #[test]
    fn equal_weight_pure_state_has_eigenvalues_zero_and_one() {
        // cos(π/4)|e⟩ + sin(π/4)|g⟩; quadratic formula gives 1/2 ± √(0 + 1/4).
        let h = c(0.5, 0.0);
        let rho = ComplexMatrix::from_rows(&[[h, h], [h, h]]);
        let sys = eig_hermitian(&rho).unwrap();
        assert!(sys.eigenvalues[0].abs() < 1e-16);
        assert!((sys.eigenvalues[1] - 1.0).abs() < 1e-15);
        check_system(&rho, &sys);
    }

    #[test]
    fn tiny_eigenvalue_keeps_relative_accuracy() {
        // diag-dominant state with det ≈ 2.3e-14, typical of long-time decay.
        let x = (-30.0f64).exp();
        let rho = ComplexMatrix::from_rows(&[
            [c(x / 2.0, 0.0), c((-15.0f64).exp() / 2.0, 0.0)],
            [c((-15.0f64).exp() / 2.0, 0.0), c(1.0 - x / 2.0, 0.0)],
        ]);
        let sys = eig_hermitian(&rho).unwrap();
        let det = x / 2.0 * (1.0 - x / 2.0) - (-30.0f64).exp() / 4.0;
        let expect = det / sys.eigenvalues[1];
        assert!(((sys.eigenvalues[0] - expect) / expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[[c(1.0, 0.0), c(1.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]);
        match eig_hermitian(&m) {
            Err(Error::NotHermitian { deviation }) => assert!((deviation - 2f64.sqrt()).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn jacobi_handles_degenerate_block() {
        // Projector onto a 2D subspace of C^4, eigenvalues (0, 0, 1, 1).
        let u = [c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)];
        let w = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        let p = &ComplexMatrix::outer(&u, &u) + &ComplexMatrix::outer(&w, &w);
        let sys = eig_hermitian(&p).unwrap();
        check_system(&p, &sys);
        assert!(sys.eigenvalues[0].abs() < 1e-14 && (sys.eigenvalues[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigendecomposition_is_deterministic() {
        let seed: Vec<f64> = (0..40).map(|k| ((k * 37 % 17) as f64 - 8.0) / 5.0).collect();
        let h = random_hermitian(6, &seed);
        let a = eig_hermitian(&h).unwrap();
        let b = eig_hermitian(&h).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let id = ComplexMatrix::identity(2);
        assert!((&psd_sqrt(&id).unwrap() - &id).frobenius_norm() < 1e-15);
        let r = psd_sqrt(&ComplexMatrix::from_real_diag(&[4.0, 9.0])).unwrap();
        assert!((&r - &ComplexMatrix::from_real_diag(&[2.0, 3.0])).frobenius_norm() < 1e-14);
        assert!(matches!(
            psd_sqrt(&ComplexMatrix::from_real_diag(&[1.0, -1e-6])),
            Err(Error::NotPositive { .. })
        ));
        let clipped = psd_sqrt(&ComplexMatrix::from_real_diag(&[1.0, -1e-12])).unwrap();
        assert_eq!(clipped.get(1, 1), ZERO);
    }

    proptest! {
        #[test]
        fn hermitian_eigensystems_are_accurate(
            dim in 2usize..7,
            seed in proptest::collection::vec(-3.0f64..3.0, 64),
        ) {
            let h = random_hermitian(dim, &seed);
            let sys = eig_hermitian(&h).unwrap();
            check_system(&h, &sys);
            let tr: f64 = sys.eigenvalues.iter().sum();
            prop_assert!((tr - h.trace().re).abs() <= 1e-12 * dim as f64 * h.frobenius_norm().max(1.0));
        }

        #[test]
        fn psd_sqrt_squares_back(
            dim in 2usize..6,
            seed in proptest::collection::vec(-2.0f64..2.0, 64),
        ) {
            let a = random_hermitian(dim, &seed);
            let p = a.matmul(&a);
            let r = psd_sqrt(&p).unwrap();
            prop_assert!(r.hermiticity_defect() < 1e-12);
            prop_assert!((&r.matmul(&r) - &p).frobenius_norm() <= 1e-10 * p.frobenius_norm().max(1.0));
        }

        #[test]
        fn fourth_power_of_nested_sqrt_reconstructs(
            diag in proptest::collection::vec(1e-6f64..1.0, 3),
            seed in proptest::collection::vec(-1.0f64..1.0, 32),
        ) {
            // Rotate a well-conditioned diagonal (cond ≤ 1e6) by a random unitary.
            let u = eig_hermitian(&random_hermitian(3, &seed)).unwrap().eigenvectors;
            let p = u.matmul(&ComplexMatrix::from_real_diag(&diag)).matmul(&u.dagger());
            let q = psd_sqrt(&psd_sqrt(&p).unwrap()).unwrap();
            let q2 = q.matmul(&q);
            let q4 = q2.matmul(&q2);
            prop_assert!((&q4 - &p).frobenius_norm() <= 1e-8);
        }
    }
}
