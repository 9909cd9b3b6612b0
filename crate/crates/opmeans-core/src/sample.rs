//! Random positive semidefinite test matrices with a controlled spectrum.
//!
//! The sampler draws a Haar-random unitary basis and plants an explicit
//! spectrum in it: extreme eigenvalues √c and 1/√c are forced exactly so
//! the condition number is `c` by construction (not merely in expectation),
//! interior eigenvalues are log-uniform between them, and an optional rank
//! deficit pins trailing eigenvalues to exact zeros. Returning the planted
//! spectrum and basis alongside the matrix lets tests assert against the
//! intended decomposition instead of re-deriving it.

use crate::cmatrix::{C64, CMatrix};
use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsdSamplerConfig {
    pub dim: usize,
    /// Ratio λ_max / λ_min of the planted spectrum (≥ 1).
    pub condition_target: f64,
    /// Number of trailing eigenvalues forced to exactly zero.
    pub rank_deficit: usize,
}

impl PsdSamplerConfig {
    pub fn new(dim: usize) -> Self {
        PsdSamplerConfig {
            dim,
            condition_target: 100.0,
            rank_deficit: 0,
        }
    }

    pub fn with_condition(mut self, c: f64) -> Self {
        self.condition_target = c;
        self
    }

    pub fn with_rank_deficit(mut self, r: usize) -> Self {
        self.rank_deficit = r;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(CoreError::InvalidParameter("dim must be positive".into()));
        }
        if !(self.condition_target >= 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "condition_target must be >= 1, got {}",
                self.condition_target
            )));
        }
        if self.rank_deficit >= self.dim {
            return Err(CoreError::InvalidParameter(format!(
                "rank_deficit {} leaves no nonzero eigenvalue in dimension {}",
                self.rank_deficit, self.dim
            )));
        }
        Ok(())
    }
}

/// A sampled matrix together with the spectrum and basis it was built from.
#[derive(Clone, Debug)]
pub struct PsdSample {
    pub matrix: HermitianMatrix,
    /// Planted eigenvalues, sorted non-increasing.
    pub eigenvalues: Vec<f64>,
    /// Unitary whose i-th column is the eigenvector for `eigenvalues[i]`.
    pub basis: CMatrix,
}

fn complex_gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary via modified Gram–Schmidt on a complex Gaussian
/// matrix. MGS produces positive diagonal entries in the triangular factor,
/// which is exactly the phase convention that makes Q Haar-distributed.
pub fn haar_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    let g = complex_gaussian(rng, n, n);
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| g.column(j)) .collect();
    for j in 0..n {
        for k in 0..j {
            let proj: C64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..n {
                let correction = proj * cols[k][i];
                cols[j][i] -= correction;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for i in 0..n {
            cols[j][i] /= norm;
        }
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// The planted spectrum for a sampler configuration, sorted non-increasing.
fn planted_spectrum(rng: &mut impl Rng, cfg: &PsdSamplerConfig) -> Vec<f64> {
    let n = cfg.dim;
    if n == 1 {
        return vec![if cfg.rank_deficit > 0 { 0.0 } else { 1.0 }];
    }
    let hi = cfg.condition_target.sqrt();
    let lo = 1.0 / hi;
    let mut vals = Vec::with_capacity(n);
    vals.push(hi);
    for _ in 0..n - 2 {
        let u: f64 = rng.gen();
        vals.push((lo.ln() + u * (hi.ln() - lo.ln())).exp());
    }
    vals.push(lo);
    vals.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    for k in 0..cfg.rank_deficit {
        vals[n - 1 - k] = 0.0;
    }
    vals
}

pub fn sample_psd(rng: &mut impl Rng, cfg: &PsdSamplerConfig) -> Result<PsdSample> {
    cfg.validate()?;
    let n = cfg.dim;
    let eigenvalues = planted_spectrum(rng, cfg);
    let basis = haar_unitary(rng, n);
    let mut scaled = basis.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= eigenvalues[j];
        }
    }
    let matrix = HermitianMatrix::from_cmatrix(&scaled.mul(&basis.adjoint())?)?;
    Ok(PsdSample {
        matrix,
        eigenvalues,
        basis,
    })
}

/// Gaussian Hermitian matrix (not positive in general): (G + G*)/2, entries
/// scaled by `scale`.
pub fn sample_hermitian(rng: &mut impl Rng, dim: usize, scale: f64) -> Result<HermitianMatrix> {
    let g = complex_gaussian(rng, dim, dim).scale(C64::new(scale, 0.0));
    HermitianMatrix::from_cmatrix(&g)
}
