//! Positive linear maps and their power companions.
//!
//! The catalog covers the shapes the inequality campaign needs: Kraus sums
//! Σ C_i* Z C_i, Schur multipliers A ∘ Z, pinchings onto a block partition,
//! and the two-block average (A ⊕ B) ↦ (A + B)/2. Construction enforces
//! sub-unitality, so E(I) ≤ I can be relied on downstream. For p ∈ (0, 1]
//! the power companion is E_p(Z) = E(Z^p)^{1/p}; its p → 0 limit
//! exp(E(log Z)) exists for unital E and invertible Z and is implemented
//! exactly under those hypotheses (no silent regularization).

use crate::cmatrix::CMatrix;
use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;
use crate::matfun::{clamp_eps_for, expm, inv_sqrtm, logm, powm};
use crate::sample::haar_unitary;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum MapKind {
    Kraus { ops: Vec<CMatrix> },
    Schur { multiplier: HermitianMatrix },
    Pinching { blocks: Vec<Vec<usize>>, dim: usize },
    TwoBlockAverage { half: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PositiveMap {
    #[serde(flatten)]
    kind: MapKind,
}

const UNITALITY_TOL: f64 = 1e-10;

impl PositiveMap {
    /// Kraus map Z ↦ Σ C_i* Z C_i. All C_i must share one shape n×m and
    /// satisfy Σ C_i* C_i ≤ I (sub-unital) within 1e-10.
    pub fn kraus(ops: Vec<CMatrix>) -> Result<Self> {
        if ops.is_empty() {
            return Err(CoreError::InvalidParameter(
                "kraus map needs at least one operator".into(),
            ));
        }
        let (n, m) = (ops[0].rows(), ops[0].cols());
        if ops.iter().any(|c| c.rows() != n || c.cols() != m) {
            return Err(CoreError::InvalidParameter(
                "kraus operators must all have the same shape".into(),
            ));
        }
        let mut gram = CMatrix::zeros(m, m);
        for c in &ops {
            gram = gram.add(&c.adjoint().mul(c)?)?;
        }
        let gram = HermitianMatrix::from_cmatrix(&gram)?;
        let excess = gram.sub(&HermitianMatrix::identity(m))?.eigenvalues()?[0];
        if excess > UNITALITY_TOL {
            return Err(CoreError::InvalidParameter(format!(
                "kraus operators exceed sub-unitality by {excess:.3e}"
            )));
        }
        Ok(PositiveMap {
            kind: MapKind::Kraus { ops },
        })
    }

    /// Schur multiplier Z ↦ A ∘ Z for PSD A with diagonal entries in (0, 1].
    pub fn schur(multiplier: HermitianMatrix) -> Result<Self> {
        let lam_min = multiplier.min_eigenvalue()?;
        if lam_min < -1e-10 * (1.0 + multiplier.frobenius_norm()) {
            return Err(CoreError::InvalidParameter(format!(
                "schur multiplier must be PSD (min eigenvalue {lam_min:.3e})"
            )));
        }
        for d in multiplier.diagonal() {
            if d <= 0.0 || d > 1.0 + UNITALITY_TOL {
                return Err(CoreError::InvalidParameter(format!(
                    "schur multiplier diagonal must lie in (0, 1], got {d}"
                )));
            }
        }
        Ok(PositiveMap {
            kind: MapKind::Schur { multiplier },
        })
    }

    /// Pinching onto a partition of {0, …, n−1}: entries between different
    /// blocks are zeroed.
    pub fn pinching(blocks: Vec<Vec<usize>>) -> Result<Self> {
        let dim: usize = blocks.iter().map(Vec::len).sum();
        let mut seen = vec![false; dim];
        for idx in blocks.iter().flatten() {
            if *idx >= dim || seen[*idx] {
                return Err(CoreError::InvalidParameter(
                    "pinching blocks must partition 0..n".into(),
                ));
            }
            seen[*idx] = true;
        }
        if blocks.iter().any(Vec::is_empty) {
            return Err(CoreError::InvalidParameter(
                "pinching blocks must be non-empty".into(),
            ));
        }
        Ok(PositiveMap {
            kind: MapKind::Pinching { blocks, dim },
        })
    }

    /// The full pinching onto the diagonal.
    pub fn pinch_diag(n: usize) -> Self {
        PositiveMap::pinching((0..n).map(|i| vec![i]).collect()).expect("valid partition")
    }

    /// (A ⊕ B) ↦ (A + B)/2 on 2h × 2h inputs.
    pub fn two_block_average(half: usize) -> Self {
        PositiveMap {
            kind: MapKind::TwoBlockAverage { half },
        }
    }

    pub fn in_dim(&self) -> usize {
        match &self.kind {
            MapKind::Kraus { ops } => ops[0].rows(),
            MapKind::Schur { multiplier } => multiplier.dim(),
            MapKind::Pinching { dim, .. } => *dim,
            MapKind::TwoBlockAverage { half } => 2 * half,
        }
    }

    pub fn out_dim(&self) -> usize {
        match &self.kind {
            MapKind::Kraus { ops } => ops[0].cols(),
            MapKind::TwoBlockAverage { half } => *half,
            _ => self.in_dim(),
        }
    }

    /// Short label for reports ("pinch-diag", "schur", …).
    pub fn describe(&self) -> String {
        match &self.kind {
            MapKind::Kraus { ops } => format!("kraus({})", ops.len()),
            MapKind::Schur { .. } => "schur".into(),
            MapKind::Pinching { blocks, dim } => {
                if blocks.len() == *dim {
                    "pinch-diag".into()
                } else {
                    format!("pinch({})", blocks.len())
                }
            }
            MapKind::TwoBlockAverage { .. } => "two-block".into(),
        }
    }

    pub fn apply(&self, z: &HermitianMatrix) -> Result<HermitianMatrix> {
        if z.dim() != self.in_dim() {
            return Err(CoreError::DimensionMismatch {
                left: self.in_dim(),
                right: z.dim(),
            });
        }
        match &self.kind {
            MapKind::Kraus { ops } => {
                let m = self.out_dim();
                let mut acc = CMatrix::zeros(m, m);
                for c in ops {
                    acc = acc.add(&c.adjoint().mul(z.as_cmatrix())?.mul(c)?)?;
                }
                HermitianMatrix::from_cmatrix(&acc)
            }
            MapKind::Schur { multiplier } => z.schur_product(multiplier),
            MapKind::Pinching { blocks, dim } => {
                let mut block_of = vec![0usize; *dim];
                for (b, idx) in blocks.iter().enumerate() {
                    for &i in idx {
                        block_of[i] = b;
                    }
                }
                let mut out = HermitianMatrix::zeros(*dim);
                for i in 0..*dim {
                    for j in i..*dim {
                        if block_of[i] == block_of[j] {
                            out.set_sym(i, j, z.get(i, j));
                        }
                    }
                }
                Ok(out)
            }
            MapKind::TwoBlockAverage { half } => {
                let a = z.principal_block(0, *half);
                let b = z.principal_block(*half, *half);
                Ok(a.add(&b)?.scale(0.5))
            }
        }
    }

    fn image_of_identity(&self) -> Result<HermitianMatrix> {
        self.apply(&HermitianMatrix::identity(self.in_dim()))
    }

    /// E(I) = I within `tol` (Frobenius).
    pub fn is_unital(&self, tol: f64) -> Result<bool> {
        let dev = self
            .image_of_identity()?
            .sub(&HermitianMatrix::identity(self.out_dim()))?
            .frobenius_norm();
        Ok(dev <= tol * self.out_dim() as f64)
    }

    /// E(I) ≤ I within `tol` on the largest eigenvalue.
    pub fn is_sub_unital(&self, tol: f64) -> Result<bool> {
        let excess = self
            .image_of_identity()?
            .sub(&HermitianMatrix::identity(self.out_dim()))?
            .eigenvalues()?[0];
        Ok(excess <= tol)
    }

    /// Structural trace-preservation check (exact, not sampled).
    pub fn is_trace_preserving(&self, tol: f64) -> Result<bool> {
        match &self.kind {
            MapKind::Kraus { ops } => {
                // tr Σ C*ZC = tr(Z Σ CC*): preservation ⇔ Σ C_i C_i* = I.
                let n = self.in_dim();
                let mut acc = CMatrix::zeros(n, n);
                for c in ops {
                    acc = acc.add(&c.mul(&c.adjoint())?)?;
                }
                let dev = HermitianMatrix::from_cmatrix(&acc)?
                    .sub(&HermitianMatrix::identity(n))?
                    .frobenius_norm();
                Ok(dev <= tol * n as f64)
            }
            MapKind::Schur { multiplier } => Ok(multiplier
                .diagonal()
                .iter()
                .all(|d| (d - 1.0).abs() <= tol)),
            MapKind::Pinching { .. } => Ok(true),
            MapKind::TwoBlockAverage { .. } => Ok(false),
        }
    }
}

/// E_p(Z) = E(Z^p)^{1/p} for p ∈ (0, 1]. Singular PSD inputs are fine:
/// 0^p = 0 by continuous extension.
pub fn power_map(e: &PositiveMap, z: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(CoreError::InvalidParameter(format!(
            "power parameter must lie in (0,1], got {p}"
        )));
    }
    if p == 1.0 {
        return e.apply(z);
    }
    powm(&e.apply(&powm(z, p)?)?, 1.0 / p)
}

/// The p → 0 limit of E_p: exp(E(log Z)). Requires E unital and Z strictly
/// positive; both hypotheses are enforced, not patched over.
pub fn zero_power_map(e: &PositiveMap, z: &HermitianMatrix) -> Result<HermitianMatrix> {
    let dev = e
        .image_of_identity()?
        .sub(&HermitianMatrix::identity(e.out_dim()))?
        .frobenius_norm();
    if dev > UNITALITY_TOL * e.out_dim() as f64 {
        return Err(CoreError::NotUnital { deviation: dev });
    }
    let lam_min = z.min_eigenvalue()?;
    if lam_min <= clamp_eps_for(z) {
        return Err(CoreError::SingularInput { lambda_min: lam_min });
    }
    expm(&e.apply(&logm(z)?)?)
}

/// Random Kraus map with Σ C_i* C_i = I exactly (up to round-off), built by
/// whitening Gaussian draws.
pub fn random_unital_kraus(
    rng: &mut impl Rng,
    in_dim: usize,
    out_dim: usize,
    operators: usize,
) -> Result<PositiveMap> {
    let draws: Vec<CMatrix> = (0..operators)
        .map(|_| {
            CMatrix::from_fn(in_dim, out_dim, |_, _| {
                crate::cmatrix::C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        })
        .collect();
    let mut gram = CMatrix::zeros(out_dim, out_dim);
    for c in &draws {
        gram = gram.add(&c.adjoint().mul(c)?)?;
    }
    let whitener = inv_sqrtm(&HermitianMatrix::from_cmatrix(&gram)?)?;
    let ops = draws
        .into_iter()
        .map(|c| c.mul(whitener.as_cmatrix()))
        .collect::<Result<Vec<_>>>()?;
    PositiveMap::kraus(ops)
}

/// Random unital Schur map: a correlation matrix (PSD, unit diagonal).
pub fn random_correlation_schur(rng: &mut impl Rng, n: usize) -> Result<PositiveMap> {
    let u = haar_unitary(rng, n);
    let spectrum: Vec<f64> = (0..n).map(|_| 0.2 + rng.gen::<f64>()).collect();
    let mut scaled = u.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= spectrum[j];
        }
    }
    let w = HermitianMatrix::from_cmatrix(&scaled.mul(&u.adjoint())?)?;
    let d: Vec<f64> = w.diagonal().iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut corr = HermitianMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            corr.set_sym(i, j, w.get(i, j) * d[i] * d[j]);
        }
    }
    // Pin the diagonal to exactly 1 so sub-unitality never trips on round-off.
    for i in 0..n {
        corr.set_sym(i, i, crate::cmatrix::C64::new(1.0, 0.0));
    }
    PositiveMap::schur(corr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::majorizes;
    use crate::sample::{sample_psd, PsdSamplerConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(seed: u64, dim: usize) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample_psd(&mut rng, &PsdSamplerConfig::new(dim).with_condition(40.0))
            .unwrap()
            .matrix
    }

    #[test]
    fn identity_kraus_is_identity_map() {
        let e = PositiveMap::kraus(vec![CMatrix::identity(3)]).unwrap();
        let z = sample(1, 3);
        assert_eq!(e.apply(&z).unwrap(), z);
        assert!(e.is_unital(1e-12).unwrap());
        assert!(e.is_trace_preserving(1e-12).unwrap());
    }

    #[test]
    fn all_ones_schur_is_identity_map() {
        let ones = HermitianMatrix::from_real_rows(&[
            &[1.0, 1.0, 1.0],
            &[1.0, 1.0, 1.0],
            &[1.0, 1.0, 1.0],
        ])
        .unwrap();
        let e = PositiveMap::schur(ones).unwrap();
        let z = sample(2, 3);
        let dev = e.apply(&z).unwrap().sub(&z).unwrap().frobenius_norm();
        assert!(dev < 1e-14);
    }

    #[test]
    fn diagonal_pinching_majorization() {
        let e = PositiveMap::pinch_diag(4);
        let z = sample(3, 4);
        let pinched = e.apply(&z).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert_eq!(pinched.get(i, j).norm(), 0.0);
                }
            }
        }
        // The diagonal part is always majorized by the full matrix.
        assert!(majorizes(&pinched, &z, 1e-10).unwrap().holds);
        assert!(e.is_unital(1e-12).unwrap());
        assert!(e.is_trace_preserving(1e-12).unwrap());
    }

    #[test]
    fn two_block_average_matches_hand_computation() {
        let e = PositiveMap::two_block_average(2);
        let z = HermitianMatrix::from_diag(&[1.0, 4.0, 9.0, 16.0]);
        let avg = e.apply(&z).unwrap();
        assert_eq!(avg.diagonal(), vec![5.0, 10.0]);
        assert!(e.is_unital(1e-12).unwrap());
        assert!(!e.is_trace_preserving(1e-12).unwrap());
    }

    #[test]
    fn power_map_two_block_oracle() {
        // Geometric-style block power mean: with Z = diag(1,4) ⊕ diag(9,16)
        // and p = 1/2, E(Z^{1/2}) = diag(2,3) and squaring gives diag(4,9).
        let e = PositiveMap::two_block_average(2);
        let z = HermitianMatrix::from_diag(&[1.0, 4.0, 9.0, 16.0]);
        let out = power_map(&e, &z, 0.5).unwrap();
        assert!((out.get(0, 0).re - 4.0).abs() < 1e-12);
        assert!((out.get(1, 1).re - 9.0).abs() < 1e-12);
        assert!(out.get(0, 1).norm() < 1e-13);
    }

    #[test]
    fn power_map_at_one_is_plain_apply() {
        let z = sample(4, 4);
        let e = PositiveMap::pinch_diag(4);
        let a = power_map(&e, &z, 1.0).unwrap();
        let b = e.apply(&z).unwrap();
        assert!(a.sub(&b).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn identity_map_fixes_z_for_all_powers() {
        let z = sample(5, 3);
        let e = PositiveMap::kraus(vec![CMatrix::identity(3)]).unwrap();
        for p in [0.2, 0.5, 0.9] {
            let out = power_map(&e, &z, p).unwrap();
            let dev = out.sub(&z).unwrap().frobenius_norm();
            assert!(dev < 1e-11 * (1.0 + z.frobenius_norm()), "p={p}: {dev:.3e}");
        }
        let out = zero_power_map(&e, &z).unwrap();
        assert!(out.sub(&z).unwrap().frobenius_norm() < 1e-11 * (1.0 + z.frobenius_norm()));
    }

    #[test]
    fn zero_power_limit_is_linear_in_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = random_unital_kraus(&mut rng, 3, 3, 3).unwrap();
        let z = sample(6, 3);
        let limit = zero_power_map(&e, &z).unwrap();
        let err = |p: f64| {
            power_map(&e, &z, p)
                .unwrap()
                .sub(&limit)
                .unwrap()
                .frobenius_norm()
        };
        let (e1, e2, e3) = (err(1e-1), err(1e-2), err(1e-3));
        assert!(e1 > e2 && e2 > e3);
        // First-order convergence: shrinking p tenfold shrinks the error
        // tenfold (allow generous slack for the O(p²) tail).
        assert!((e2 / e1 - 0.1).abs() < 0.05, "ratio {}", e2 / e1);
        assert!((e3 / e2 - 0.1).abs() < 0.05, "ratio {}", e3 / e2);
    }

    #[test]
    fn zero_power_map_enforces_hypotheses() {
        let shrink = PositiveMap::kraus(vec![CMatrix::identity(2).scale(
            crate::cmatrix::C64::new(0.5, 0.0),
        )])
        .unwrap();
        let z = sample(8, 2);
        assert!(matches!(
            zero_power_map(&shrink, &z),
            Err(CoreError::NotUnital { .. })
        ));
        let e = PositiveMap::pinch_diag(2);
        let singular = HermitianMatrix::from_diag(&[1.0, 0.0]);
        assert!(matches!(
            zero_power_map(&e, &singular),
            Err(CoreError::SingularInput { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_inputs() {
        assert!(PositiveMap::kraus(vec![]).is_err());
        // 2I as a single Kraus operator: Σ C*C = 4I, far from sub-unital.
        let too_big = CMatrix::identity(2).scale(crate::cmatrix::C64::new(2.0, 0.0));
        assert!(PositiveMap::kraus(vec![too_big]).is_err());
        let bad_diag = HermitianMatrix::from_diag(&[1.0, 2.0]);
        assert!(PositiveMap::schur(bad_diag).is_err());
        assert!(PositiveMap::pinching(vec![vec![0, 0], vec![1]]).is_err());
        assert!(PositiveMap::pinching(vec![vec![0], vec![]]).is_err());
    }

    #[test]
    fn random_maps_are_positive_and_sub_unital() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let maps = vec![
            random_unital_kraus(&mut rng, 4, 4, 3).unwrap(),
            random_correlation_schur(&mut rng, 4).unwrap(),
            PositiveMap::pinching(vec![vec![0, 2], vec![1, 3]]).unwrap(),
        ];
        for (k, e) in maps.iter().enumerate() {
            assert!(e.is_sub_unital(1e-9).unwrap(), "map {k} not sub-unital");
            for seed in 0..5 {
                let z = sample(100 + seed, 4);
                let out = e.apply(&z).unwrap();
                let lam = out.min_eigenvalue().unwrap();
                assert!(lam >= -1e-10 * (1.0 + z.frobenius_norm()), "map {k}: λ_min {lam:.3e}");
            }
        }
        let tb = PositiveMap::two_block_average(2);
        let z = sample(200, 4);
        assert!(tb.apply(&z).unwrap().min_eigenvalue().unwrap() >= -1e-10);
    }

    #[test]
    fn trace_preserving_maps_preserve_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let e = random_unital_kraus(&mut rng, 3, 3, 4).unwrap();
        let z = sample(9, 3);
        if e.is_trace_preserving(1e-9).unwrap() {
            assert!((e.apply(&z).unwrap().trace() - z.trace()).abs() < 1e-10);
        }
        let pinch = PositiveMap::pinching(vec![vec![0, 1], vec![2]]).unwrap();
        assert!((pinch.apply(&z).unwrap().trace() - z.trace()).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip_preserves_behaviour() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let e = random_unital_kraus(&mut rng, 3, 3, 2).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        let back: PositiveMap = serde_json::from_str(&text).unwrap();
        assert_eq!(text, serde_json::to_string(&back).unwrap());
        let z = sample(10, 3);
        let dev = e.apply(&z).unwrap().sub(&back.apply(&z).unwrap()).unwrap().frobenius_norm();
        assert_eq!(dev, 0.0);
    }
}
