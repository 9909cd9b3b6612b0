//! Majorization-type preorders on spectra, reported as signed margins.
//!
//! Every predicate returns a [`MajorizationVerdict`] whose `worst_margin`
//! is the minimum slack over all partial-sum (or partial-product)
//! constraints; the relation holds when that minimum is ≥ −tol. Additive
//! relations normalize margins by 1 + ||A||_F + ||B||_F so one tolerance
//! works across scales; multiplicative relations report differences of
//! k-th-root products, which live on the same scale as the eigenvalues
//! themselves.

use crate::eig::eigh;
use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;

const LOG_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MajorizationVerdict {
    pub holds: bool,
    /// Minimum signed slack over all constraints; ≥ −tol means `holds`.
    pub worst_margin: f64,
    /// 1-based partial-sum length (or eigenvalue index) attaining the worst margin.
    pub worst_k: usize,
}

fn verdict(margins: &[f64], tol: f64) -> MajorizationVerdict {
    let mut worst_margin = f64::INFINITY;
    let mut worst_k = 1;
    for (i, &m) in margins.iter().enumerate() {
        if m < worst_margin {
            worst_margin = m;
            worst_k = i + 1;
        }
    }
    MajorizationVerdict {
        holds: worst_margin >= -tol,
        worst_margin,
        worst_k,
    }
}

fn check_dims(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

fn spectra(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    check_dims(a, b)?;
    let sa = eigh(a)?.values;
    let sb = eigh(b)?.values;
    let scale = 1.0 + a.frobenius_norm() + b.frobenius_norm();
    Ok((sa, sb, scale))
}

/// k-th root of the product of the first k entries. Positive factors are
/// handled in the log domain (floored at 1e-300 against underflow); a zero
/// or negative factor forces the direct-product path with a signed root.
fn root_product(vals: &[f64], k: usize) -> f64 {
    let head = &vals[..k];
    if head.iter().all(|&x| x > 0.0) {
        let s: f64 = head.iter().map(|&x| x.max(LOG_FLOOR).ln()).sum();
        (s / k as f64).exp()
    } else {
        let p: f64 = head.iter().product();
        if p == 0.0 {
            0.0
        } else {
            p.signum() * p.abs().powf(1.0 / k as f64)
        }
    }
}

/// Σ_{j≤k} of the k smallest eigenvalues of A dominates that of B, for all k.
pub fn supermajorizes(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let (sa, sb, scale) = spectra(a, b)?;
    let n = sa.len();
    let mut margins = Vec::with_capacity(n);
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..n {
        // Ascending order = walk the non-increasing spectrum from the back.
        pa += sa[n - 1 - k];
        pb += sb[n - 1 - k];
        margins.push((pa - pb) / scale);
    }
    Ok(verdict(&margins, tol))
}

/// Supermajorization together with trace equality — the classical
/// "spectrum of A is an average of permutations of the spectrum of B".
pub fn majorizes(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let (sa, sb, scale) = spectra(a, b)?;
    let n = sa.len();
    let mut margins = Vec::with_capacity(n + 1);
    let (mut pa, mut pb) = (0.0, 0.0);
    for k in 0..n {
        pa += sa[n - 1 - k];
        pb += sb[n - 1 - k];
        margins.push((pa - pb) / scale);
    }
    // Trace equality enters as a constraint of its own, attributed to k = n.
    margins[n - 1] = margins[n - 1].min(-(pa - pb).abs() / scale);
    Ok(verdict(&margins, tol))
}

/// Π_{j≤k} of the k smallest eigenvalues of A dominates that of B, for all
/// k, compared through k-th roots.
pub fn log_supermajorizes(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let (sa, sb, _) = spectra(a, b)?;
    let n = sa.len();
    let asc_a: Vec<f64> = sa.iter().rev().copied().collect();
    let asc_b: Vec<f64> = sb.iter().rev().copied().collect();
    let margins: Vec<f64> = (1..=n)
        .map(|k| root_product(&asc_a, k) - root_product(&asc_b, k))
        .collect();
    Ok(verdict(&margins, tol))
}

/// Π_{j≤k} of the k largest eigenvalues of A stays below that of B for all
/// k, with equality of the full products at k = n.
pub fn log_majorizes(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let (sa, sb, _) = spectra(a, b)?;
    let n = sa.len();
    let mut margins: Vec<f64> = (1..=n)
        .map(|k| root_product(&sb, k) - root_product(&sa, k))
        .collect();
    let gap = (root_product(&sa, n) - root_product(&sb, n)).abs();
    margins[n - 1] = margins[n - 1].min(-gap);
    Ok(verdict(&margins, tol))
}

/// Π_{j≤k} of the k largest eigenvalues of A stays below that of B for all
/// k (no terminal equality).
pub fn log_submajorizes(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let (sa, sb, _) = spectra(a, b)?;
    let n = sa.len();
    let margins: Vec<f64> = (1..=n)
        .map(|k| root_product(&sb, k) - root_product(&sa, k))
        .collect();
    Ok(verdict(&margins, tol))
}

/// λ_j(A) ≥ λ_j(B) for every j — equivalent to the existence of a unitary V
/// with A ≥ V B V*.
pub fn eigenvalue_dominates(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let (sa, sb, scale) = spectra(a, b)?;
    let margins: Vec<f64> = sa
        .iter()
        .zip(&sb)
        .map(|(x, y)| (x - y) / scale)
        .collect();
    Ok(verdict(&margins, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{haar_unitary, sample_psd, PsdSamplerConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-10;

    fn d(vals: &[f64]) -> HermitianMatrix {
        HermitianMatrix::from_diag(vals)
    }

    #[test]
    fn supermajorization_hand_checks() {
        let v = supermajorizes(&d(&[1.0, 1.0]), &d(&[1.0, 1.0]), TOL).unwrap();
        assert!(v.holds);
        assert_eq!(v.worst_margin, 0.0);

        assert!(supermajorizes(&d(&[1.0, 1.0]), &d(&[2.0, 0.0]), TOL).unwrap().holds);

        let v = supermajorizes(&d(&[2.0, 0.0]), &d(&[1.0, 1.0]), TOL).unwrap();
        assert!(!v.holds);
        assert_eq!(v.worst_k, 1);
    }

    #[test]
    fn majorization_requires_equal_traces() {
        assert!(majorizes(&d(&[1.0, 2.0]), &d(&[1.0, 2.0]), TOL).unwrap().holds);
        assert!(!majorizes(&d(&[1.0, 1.0]), &d(&[3.0, 0.0]), TOL).unwrap().holds);
        // Diagonal part of a Hermitian matrix is majorized by the matrix.
        let z = HermitianMatrix::from_real_rows(&[&[1.0, 0.5], &[0.5, 0.0]]).unwrap();
        let diag = d(&[1.0, 0.0]);
        assert!(majorizes(&diag, &z, TOL).unwrap().holds);
    }

    #[test]
    fn log_supermajorization_fails_on_smallest_eigenvalue() {
        let v = log_supermajorizes(&d(&[4.0, 1.0]), &d(&[2.0, 2.0]), TOL).unwrap();
        assert!(!v.holds, "1 ≥ 2 must fail at k=1");
        assert_eq!(v.worst_k, 1);
        assert!(log_supermajorizes(&d(&[4.0, 1.0]), &d(&[4.0, 1.0]), TOL).unwrap().holds);
    }

    #[test]
    fn log_majorization_needs_terminal_equality() {
        assert!(log_majorizes(&d(&[2.0, 2.0]), &d(&[4.0, 1.0]), TOL).unwrap().holds);
        // Same leading products but determinants 4 vs 2: submajorizes only.
        assert!(!log_majorizes(&d(&[2.0, 1.0]), &d(&[4.0, 1.0]), 1e-6).unwrap().holds);
        assert!(log_submajorizes(&d(&[2.0, 1.0]), &d(&[4.0, 1.0]), TOL).unwrap().holds);
        assert!(log_submajorizes(&d(&[1.0, 1.0]), &d(&[4.0, 1.0]), TOL).unwrap().holds);
    }

    #[test]
    fn zero_eigenvalues_use_direct_products() {
        // Singular A against invertible B: 0 ≥ λ_min(B) fails at k=1.
        let v = log_supermajorizes(&d(&[3.0, 0.0]), &d(&[2.0, 1.0]), TOL).unwrap();
        assert!(!v.holds);
        // Both singular: equal zero products at k=1, then 0 ≥ 0 at k=2.
        assert!(log_supermajorizes(&d(&[3.0, 0.0]), &d(&[2.0, 0.0]), TOL).unwrap().holds);
    }

    #[test]
    fn eigenvalue_dominance_hand_checks() {
        assert!(eigenvalue_dominates(&d(&[2.0, 2.0]), &d(&[1.0, 1.0]), TOL).unwrap().holds);
        let v = eigenvalue_dominates(&d(&[3.0, 1.0]), &d(&[2.0, 2.0]), TOL).unwrap();
        assert!(!v.holds);
        assert_eq!(v.worst_k, 2);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(supermajorizes(&d(&[1.0]), &d(&[1.0, 2.0]), TOL).is_err());
    }

    fn psd_pair(seed: u64, dim: usize) -> (HermitianMatrix, HermitianMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = PsdSamplerConfig::new(dim).with_condition(30.0);
        let a = sample_psd(&mut rng, &cfg).unwrap().matrix;
        let b = sample_psd(&mut rng, &cfg).unwrap().matrix;
        (a, b)
    }

    proptest! {
        #[test]
        fn dominance_implies_both_super_orders(seed in 0u64..500, dim in 2usize..5) {
            let (a, b) = psd_pair(seed, dim);
            // Force dominance by shifting A up.
            let a = a.add(&HermitianMatrix::identity(dim).scale(40.0)).unwrap();
            prop_assert!(eigenvalue_dominates(&a, &b, TOL).unwrap().holds);
            prop_assert!(supermajorizes(&a, &b, TOL).unwrap().holds);
            prop_assert!(log_supermajorizes(&a, &b, TOL).unwrap().holds);
        }

        #[test]
        fn supermajorization_is_transitive(seed in 0u64..200, dim in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
            let cfg = PsdSamplerConfig::new(dim).with_condition(10.0);
            let a = sample_psd(&mut rng, &cfg).unwrap().matrix;
            let b = sample_psd(&mut rng, &cfg).unwrap().matrix;
            let c = sample_psd(&mut rng, &cfg).unwrap().matrix;
            let ab = supermajorizes(&a, &b, TOL).unwrap();
            let bc = supermajorizes(&b, &c, TOL).unwrap();
            if ab.holds && bc.holds {
                let ac = supermajorizes(&a, &c, TOL).unwrap();
                prop_assert!(ac.worst_margin >= -2.0 * TOL);
            }
        }

        #[test]
        fn additive_implies_multiplicative_for_psd(seed in 0u64..200, dim in 2usize..5) {
            let (a, b) = psd_pair(seed, dim);
            // Tilt the odds toward the hypothesis without forcing entrywise
            // dominance, so the implication is exercised non-trivially.
            let a = a.scale(1.3);
            if supermajorizes(&a, &b, TOL).unwrap().holds {
                prop_assert!(log_supermajorizes(&a, &b, 1e-9).unwrap().holds);
            }
        }

        #[test]
        fn verdicts_are_unitarily_invariant(seed in 0u64..200, dim in 2usize..5) {
            let (a, b) = psd_pair(seed, dim);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234);
            let u = haar_unitary(&mut rng, dim);
            let ua = a.congruence(&u).unwrap();
            let ub = b.congruence(&u).unwrap();
            let before = supermajorizes(&a, &b, TOL).unwrap();
            let after = supermajorizes(&ua, &ub, TOL).unwrap();
            prop_assert_eq!(before.holds, after.holds);
            prop_assert!((before.worst_margin - after.worst_margin).abs() < 1e-9);
        }
    }
}
