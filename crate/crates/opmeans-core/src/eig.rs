//! Cyclic Jacobi eigendecomposition for complex Hermitian matrices.
//!
//! Each sweep visits every strict upper-triangle entry once and annihilates
//! it with a complex plane rotation. Quadratic convergence sets in after a
//! couple of sweeps; at the dimensions this crate targets (n ≤ a few dozen)
//! the scheme is simple, dependency-free, and accurate to machine precision,
//! which together outweigh the O(n³)-per-sweep cost.

use crate::cmatrix::{C64, CMatrix};
use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition A = V · diag(values) · V*.
#[derive(Clone, Debug)]
pub struct EigDecomposition {
    /// Eigenvalues sorted non-increasing.
    pub values: Vec<f64>,
    /// Unitary matrix whose i-th column is the eigenvector for `values[i]`.
    pub vectors: CMatrix,
}

impl EigDecomposition {
    /// Rebuild V · diag(values) · V* (mostly useful for accuracy checks).
    pub fn reconstruct(&self) -> Result<HermitianMatrix> {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        let m = scaled.mul(&self.vectors.adjoint())?;
        HermitianMatrix::from_cmatrix(&m)
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Terminates when the off-diagonal Frobenius mass falls below
/// 1e-12 · ||A||_F; fails with [`CoreError::NonConvergence`] if that does
/// not happen within 100 sweeps (which would indicate corrupted input —
/// Jacobi on Hermitian matrices converges unconditionally).
pub fn eigh(a: &HermitianMatrix) -> Result<EigDecomposition> {
    let n = a.dim();
    let norm = a.frobenius_norm();
    let mut work = a.as_cmatrix().clone();
    let mut v = CMatrix::identity(n);

    if n <= 1 || norm == 0.0 {
        let values = (0..n).map(|i| work[(i, i)].re).collect();
        return Ok(EigDecomposition { values, vectors: v });
    }

    let target = 1e-12 * norm;
    let mut converged = false;
    let mut last_off = off_diagonal_norm(&work);
    for _ in 0..MAX_SWEEPS {
        if last_off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = work[(p, q)];
                let r = apq.norm();
                // Entries far below the termination threshold contribute
                // nothing; rotating on them just churns round-off.
                if r <= target / (n * n) as f64 {
                    continue;
                }
                let phase = apq / r; // e^{iφ}
                let app = work[(p, p)].re;
                let aqq = work[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let spq = phase * s; // J[p][q]
                let sqp = -phase.conj() * s; // J[q][p]

                // Columns: B = A·J touches only columns p and q.
                for i in 0..n {
                    let aip = work[(i, p)];
                    let aiq = work[(i, q)];
                    work[(i, p)] = aip * c + aiq * sqp;
                    work[(i, q)] = aip * spq + aiq * c;
                }
                // Rows: J*·B touches only rows p and q.
                for j in 0..n {
                    let apj = work[(p, j)];
                    let aqj = work[(q, j)];
                    work[(p, j)] = apj * c + aqj * sqp.conj();
                    work[(q, j)] = apj * spq.conj() + aqj * c;
                }
                // The rotation annihilates (p,q) exactly in exact arithmetic;
                // pin the entry and the diagonal to kill residual round-off.
                work[(p, q)] = C64::new(0.0, 0.0);
                work[(q, p)] = C64::new(0.0, 0.0);
                work[(p, p)] = C64::new(work[(p, p)].re, 0.0);
                work[(q, q)] = C64::new(work[(q, q)].re, 0.0);

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * sqp;
                    v[(i, q)] = vip * spq + viq * c;
                }
            }
        }
        last_off = off_diagonal_norm(&work);
    }
    if !converged && last_off > target {
        return Err(CoreError::NonConvergence {
            sweeps: MAX_SWEEPS,
            off: last_off,
            target,
        });
    }

    // Stable non-increasing sort, permuting eigenvector columns alongside.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(j, j)].re.partial_cmp(&work[(i, i)].re).expect("finite"));
    let values: Vec<f64> = order.iter().map(|&i| work[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigDecomposition { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Closed-form spectrum of a 2×2 Hermitian matrix.
    fn eig2_oracle(a: f64, b: f64, z: C64) -> [f64; 2] {
        let mean = (a + b) / 2.0;
        let rad = ((a - b) * (a - b) / 4.0 + z.norm_sqr()).sqrt();
        [mean + rad, mean - rad]
    }

    /// Closed-form spectrum of a 3×3 Hermitian matrix via the trigonometric
    /// solution of the characteristic cubic.
    fn eig3_oracle(m: &HermitianMatrix) -> [f64; 3] {
        let q = m.trace() / 3.0;
        let mut p2 = 0.0;
        for i in 0..3 {
            p2 += (m.get(i, i).re - q).powi(2);
            for j in 0..3 {
                if i != j {
                    p2 += m.get(i, j).norm_sqr();
                }
            }
        }
        if p2 == 0.0 {
            return [q, q, q];
        }
        let p = (p2 / 6.0).sqrt();
        let b = |i: usize, j: usize| {
            let shift = if i == j { C64::new(q, 0.0) } else { C64::new(0.0, 0.0) };
            (m.get(i, j) - shift) / p
        };
        let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
            - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
            + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
        let r = (det_b.re / 2.0).clamp(-1.0, 1.0);
        let phi = r.acos() / 3.0;
        let e1 = q + 2.0 * p * phi.cos();
        let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
        let e2 = 3.0 * q - e1 - e3;
        [e1, e2, e3]
    }

    #[test]
    fn matches_two_by_two_closed_form() {
        let z = C64::new(0.7, -1.3);
        let mut h = HermitianMatrix::zeros(2);
        h.set_sym(0, 0, C64::new(2.0, 0.0));
        h.set_sym(1, 1, C64::new(-1.0, 0.0));
        h.set_sym(0, 1, z);
        let d = eigh(&h).unwrap();
        let oracle = eig2_oracle(2.0, -1.0, z);
        assert_abs_diff_eq!(d.values[0], oracle[0], epsilon = 1e-13);
        assert_abs_diff_eq!(d.values[1], oracle[1], epsilon = 1e-13);
    }

    #[test]
    fn matches_three_by_three_closed_form() {
        let mut h = HermitianMatrix::zeros(3);
        h.set_sym(0, 0, C64::new(1.0, 0.0));
        h.set_sym(1, 1, C64::new(2.0, 0.0));
        h.set_sym(2, 2, C64::new(3.0, 0.0));
        h.set_sym(0, 1, C64::new(0.5, 0.25));
        h.set_sym(0, 2, C64::new(-0.1, 0.6));
        h.set_sym(1, 2, C64::new(0.3, -0.2));
        let d = eigh(&h).unwrap();
        let oracle = eig3_oracle(&h);
        for k in 0..3 {
            assert_abs_diff_eq!(d.values[k], oracle[k], epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_and_scalar_matrices() {
        let d = eigh(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(d.values, vec![0.0, 0.0, 0.0]);
        let d = eigh(&HermitianMatrix::from_diag(&[4.0])).unwrap();
        assert_eq!(d.values, vec![4.0]);
    }

    #[test]
    fn degenerate_spectrum_still_unitary() {
        // Projection with a double eigenvalue.
        let h = HermitianMatrix::from_real_rows(&[
            &[0.5, 0.5, 0.0],
            &[0.5, 0.5, 0.0],
            &[0.0, 0.0, 1.0],
        ])
        .unwrap();
        let d = eigh(&h).unwrap();
        assert_abs_diff_eq!(d.values[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d.values[1], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(d.values[2], 0.0, epsilon = 1e-13);
        let vtv = d.vectors.adjoint().mul(&d.vectors).unwrap();
        let dev = vtv.sub(&CMatrix::identity(3)).unwrap().frobenius_norm();
        assert!(dev < 1e-13, "V*V deviates from I by {dev:.3e}");
    }

    fn arb_hermitian(max_dim: usize) -> impl Strategy<Value = HermitianMatrix> {
        (1..=max_dim)
            .prop_flat_map(|n| {
                proptest::collection::vec(-10.0f64..10.0, 2 * n * n).prop_map(move |xs| {
                    let m = CMatrix::from_fn(n, n, |i, j| {
                        C64::new(xs[2 * (i * n + j)], xs[2 * (i * n + j) + 1])
                    });
                    HermitianMatrix::from_cmatrix(&m).unwrap()
                })
            })
    }

    proptest! {
        #[test]
        fn reconstructs_and_sorts(h in arb_hermitian(6)) {
            let n = h.dim();
            let d = eigh(&h).unwrap();
            prop_assert_eq!(d.values.len(), n);
            for k in 1..n {
                prop_assert!(d.values[k - 1] >= d.values[k]);
            }
            let rebuilt = d.reconstruct().unwrap();
            let err = rebuilt.sub(&h).unwrap().frobenius_norm();
            let scale = 1.0 + h.frobenius_norm();
            prop_assert!(err <= 1e-11 * scale, "reconstruction error {} vs scale {}", err, scale);
            let vtv = d.vectors.adjoint().mul(&d.vectors).unwrap();
            let dev = vtv.sub(&CMatrix::identity(n)).unwrap().frobenius_norm();
            prop_assert!(dev <= 1e-12 * n as f64, "unitarity defect {}", dev);
        }

        #[test]
        fn trace_equals_eigenvalue_sum(h in arb_hermitian(5)) {
            let d = eigh(&h).unwrap();
            let sum: f64 = d.values.iter().sum();
            let scale = 1.0 + h.frobenius_norm();
            prop_assert!((sum - h.trace()).abs() <= 1e-12 * scale);
        }
    }
}
