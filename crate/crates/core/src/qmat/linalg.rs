use num_complex::Complex64 as C64;

use super::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

/// Solves `A x = b` by LU factorisation with partial pivoting.
pub fn lu_solve(a: &ComplexMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut m = a.as_slice().to_vec();
    let mut x = b.to_vec();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(Error::Singular);
    }

    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, m[r * n + col].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv_abs <= f64::EPSILON * scale {
            return Err(Error::Singular);
        }
        if piv != col {
            for k in 0..n {
                m.swap(col * n + k, piv * n + k);
            }
            x.swap(col, piv);
        }
        let d = m[col * n + col];
        for r in col + 1..n {
            let f = m[r * n + col] / d;
            if f == ZERO {
                continue;
            }
            m[r * n + col] = ZERO;
            for k in col + 1..n {
                let v = m[col * n + k];
                m[r * n + k] -= f * v;
            }
            let xc = x[col];
            x[r] -= f * xc;
        }
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for k in r + 1..n {
            acc -= m[r * n + k] * x[k];
        }
        x[r] = acc / m[r * n + r];
    }
    Ok(x)
}

/// Singular values in descending order, by one-sided (Hestenes) Jacobi
/// orthogonalisation of the columns. Small singular values are resolved to
/// roughly `ε·σ_max` absolute accuracy.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    let n = a.dim();
    // Column-major working copy.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    const TOL: f64 = 1e-15;

    for _ in 0..60 {
        let mut rotated = false;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum();
                let gamma: C64 = cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let (left, right) = cols.split_at_mut(j);
                let (ci, cj) = (&mut left[i], &mut right[0]);
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let yp = *y * phase.conj();
                    let xi = *x;
                    *x = xi * cs - yp * sn;
                    *y = xi * sn + yp * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> =
        cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::super::c;
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = ComplexMatrix::from_rows(&[
            [c(0.0, 0.0), c(2.0, 1.0), c(1.0, 0.0)],
            [c(1.0, 0.0), c(1.0, 0.0), c(0.0, -1.0)],
            [c(3.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)],
        ]);
        let x = [c(1.0, -1.0), c(0.5, 0.0), c(-2.0, 3.0)];
        let b = a.matvec(&x);
        let sol = lu_solve(&a, &b).unwrap();
        for (s, e) in sol.iter().zip(&x) {
            assert!((s - e).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_system_is_rejected() {
        let a = ComplexMatrix::from_rows(&[[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]]);
        assert_eq!(lu_solve(&a, &[c(1.0, 0.0), c(0.0, 0.0)]), Err(Error::Singular));
    }

    #[test]
    fn singular_values_of_diagonal_and_rank_one() {
        let d = ComplexMatrix::from_real_diag(&[-3.0, 1.0, 2.0]);
        let sv = singular_values(&d);
        assert!((sv[0] - 3.0).abs() < 1e-15 && (sv[1] - 2.0).abs() < 1e-15 && (sv[2] - 1.0).abs() < 1e-15);

        let u = [c(1.0, 0.0), c(0.0, 1.0), c(1.0, 1.0)];
        let r1 = ComplexMatrix::outer(&u, &u);
        let sv = singular_values(&r1);
        assert!((sv[0] - 4.0).abs() < 1e-14);
        assert!(sv[1] < 1e-14 * sv[0] && sv[2] < 1e-14 * sv[0]);
    }
}
