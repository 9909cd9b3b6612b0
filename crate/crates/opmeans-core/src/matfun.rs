//! Matrix functions of Hermitian matrices via the spectral theorem:
//! f(A) = U f(Λ) U*.
//!
//! Eigenvalues that fall slightly outside the declared domain of f — the
//! inevitable fate of zero eigenvalues under round-off — are clamped back
//! in when they are within `clamp_eps = 1e-10 · (1 + ||A||_F)` of it.
//! Anything further out is a genuine domain violation and is reported as
//! an error rather than silently repaired.

use crate::eig::eigh;
use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;
use crate::scalar::Interval;

pub fn clamp_eps_for(a: &HermitianMatrix) -> f64 {
    1e-10 * (1.0 + a.frobenius_norm())
}

fn clamp_into(x: f64, domain: &Interval, eps: f64) -> Result<f64> {
    if domain.contains(x) {
        return Ok(x);
    }
    let dist = domain.distance(x);
    // Written so that a NaN distance also lands in the error branch.
    if !(dist <= eps) {
        return Err(CoreError::DomainViolation {
            value: x,
            domain: domain.to_string(),
        });
    }
    // Open endpoints clamp to an interior point eps inside; closed ones to
    // the endpoint itself.
    Ok(domain.nearest_inside(x, eps))
}

/// Apply a scalar function to the spectrum: f(A) = U f(Λ) U*.
pub fn matrix_function(
    a: &HermitianMatrix,
    domain: &Interval,
    f: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    let n = a.dim();
    let eps = clamp_eps_for(a);
    let d = eigh(a)?;
    let mut scaled = d.vectors.clone();
    for j in 0..n {
        let fx = f(clamp_into(d.values[j], domain, eps)?);
        for i in 0..n {
            scaled[(i, j)] *= fx;
        }
    }
    let m = scaled.mul(&d.vectors.adjoint())?;
    HermitianMatrix::from_cmatrix(&m)
}

pub fn sqrtm(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(a, &Interval::NONNEGATIVE, f64::sqrt)
}

pub fn inv_sqrtm(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(a, &Interval::POSITIVE, |x| 1.0 / x.sqrt())
}

pub fn logm(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(a, &Interval::POSITIVE, f64::ln)
}

pub fn expm(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(a, &Interval::ALL, f64::exp)
}

pub fn invm(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_function(a, &Interval::POSITIVE, |x| 1.0 / x)
}

/// A^p on the positive cone. Nonnegative powers tolerate zero eigenvalues;
/// negative powers require them strictly positive (modulo clamping).
pub fn powm(a: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    let domain = if p >= 0.0 {
        Interval::NONNEGATIVE
    } else {
        Interval::POSITIVE
    };
    matrix_function(a, &domain, |x| x.powf(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::{C64, CMatrix};
    use approx::assert_abs_diff_eq;

    fn sample() -> HermitianMatrix {
        let mut h = HermitianMatrix::zeros(3);
        h.set_sym(0, 0, C64::new(2.0, 0.0));
        h.set_sym(1, 1, C64::new(3.0, 0.0));
        h.set_sym(2, 2, C64::new(5.0, 0.0));
        h.set_sym(0, 1, C64::new(0.4, 0.3));
        h.set_sym(0, 2, C64::new(-0.2, 0.1));
        h.set_sym(1, 2, C64::new(0.6, -0.5));
        h
    }

    #[test]
    fn sqrt_of_diagonal_is_entrywise() {
        let a = HermitianMatrix::from_diag(&[4.0, 9.0]);
        let s = sqrtm(&a).unwrap();
        assert_abs_diff_eq!(s.get(0, 0).re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.get(1, 1).re, 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.get(0, 1).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = sample();
        let s = sqrtm(&a).unwrap();
        let sq = HermitianMatrix::from_cmatrix(&s.as_cmatrix().mul(s.as_cmatrix()).unwrap()).unwrap();
        let err = sq.sub(&a).unwrap().frobenius_norm();
        assert!(err < 1e-12 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn exp_log_round_trip() {
        let a = sample();
        let back = expm(&logm(&a).unwrap()).unwrap();
        let err = back.sub(&a).unwrap().frobenius_norm();
        assert!(err < 1e-11 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn inverse_multiplies_to_identity() {
        let a = sample();
        let inv = invm(&a).unwrap();
        let prod = a.as_cmatrix().mul(inv.as_cmatrix()).unwrap();
        let err = prod.sub(&CMatrix::identity(3)).unwrap().frobenius_norm();
        assert!(err < 1e-12);
    }

    #[test]
    fn clamps_roundoff_negative_eigenvalue() {
        // A nominally PSD matrix whose smallest eigenvalue went slightly
        // negative: sqrt should clamp it to zero rather than produce NaN.
        let a = HermitianMatrix::from_diag(&[1.0, -1e-13]);
        let s = sqrtm(&a).unwrap();
        assert_abs_diff_eq!(s.get(1, 1).re, 0.0, epsilon = 1e-7);
        assert!(s.get(1, 1).re.is_finite());
    }

    #[test]
    fn rejects_genuinely_negative_input() {
        let a = HermitianMatrix::from_diag(&[1.0, -1.0]);
        match sqrtm(&a) {
            Err(CoreError::DomainViolation { value, .. }) => {
                assert_abs_diff_eq!(value, -1.0, epsilon = 1e-12)
            }
            other => panic!("expected domain violation, got {other:?}"),
        }
    }

    #[test]
    fn zero_power_on_open_domain_clamps_inward() {
        // log needs (0, ∞): an exact zero eigenvalue is clamped to an
        // interior point, giving a large-but-finite logarithm.
        let a = HermitianMatrix::from_diag(&[1.0, 0.0]);
        let l = logm(&a).unwrap();
        assert!(l.get(1, 1).re.is_finite());
        assert!(l.get(1, 1).re < -20.0);
    }
}
