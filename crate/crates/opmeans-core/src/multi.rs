//! Means of m positive definite matrices: the least-squares (Karcher) mean
//! in the Riemannian trace metric, the inductive mean, Sturm's stochastic
//! approximation, and measure-averaged (geodesic / logarithmic) means over
//! the weight simplex.

use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;
use crate::matfun::{clamp_eps_for, expm, inv_sqrtm, logm, sqrtm};
use crate::opmean::weighted_geometric;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

/// Point on the probability simplex: m non-negative weights summing to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        let w = WeightVector { weights };
        w.validate()?;
        Ok(w)
    }

    pub fn uniform(m: usize) -> Self {
        WeightVector {
            weights: vec![1.0 / m as f64; m],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(CoreError::InvalidParameter(
                "weight vector must be non-empty".into(),
            ));
        }
        if self.weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(CoreError::InvalidParameter(
                "weights must be non-negative".into(),
            ));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidParameter(format!(
                "weights sum to {total}, must be 1"
            )));
        }
        Ok(())
    }
}

/// Probability measure on the weight simplex: either finitely many atoms
/// (total mass 1) or the uniform measure approximated by `mc_uniform`
/// Monte Carlo samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexMeasure {
    pub atoms: Vec<(WeightVector, f64)>,
    pub mc_uniform: Option<usize>,
}

impl SimplexMeasure {
    pub fn from_atoms(atoms: Vec<(WeightVector, f64)>) -> Result<Self> {
        let m = SimplexMeasure {
            atoms,
            mc_uniform: None,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dirac(w: WeightVector) -> Result<Self> {
        SimplexMeasure::from_atoms(vec![(w, 1.0)])
    }

    pub fn uniform(samples: usize) -> Result<Self> {
        let m = SimplexMeasure {
            atoms: Vec::new(),
            mc_uniform: Some(samples),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self.mc_uniform {
            Some(s) => {
                if s == 0 {
                    return Err(CoreError::InvalidParameter(
                        "Monte Carlo sample count must be positive".into(),
                    ));
                }
                if !self.atoms.is_empty() {
                    return Err(CoreError::InvalidParameter(
                        "a simplex measure is either atomic or uniform, not both".into(),
                    ));
                }
            }
            None => {
                if self.atoms.is_empty() {
                    return Err(CoreError::InvalidParameter(
                        "atomic simplex measure needs at least one atom".into(),
                    ));
                }
                for (w, mass) in &self.atoms {
                    w.validate()?;
                    if !(*mass > 0.0) {
                        return Err(CoreError::InvalidParameter(format!(
                            "atom mass {mass} must be positive"
                        )));
                    }
                }
                let total: f64 = self.atoms.iter().map(|(_, m)| m).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(CoreError::InvalidParameter(format!(
                        "atom masses sum to {total}, must be 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Solver knobs for the least-squares mean. `tol_grad = None` selects
/// 1e-10·m·(1 + max‖log A_i‖_F), scaled to the problem.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct KarcherConfig {
    pub tol_grad: Option<f64>,
    pub max_iter: usize,
    /// Initial damping in (0, 1]; halved on residual stagnation, floor 1/16.
    pub step: f64,
}

impl Default for KarcherConfig {
    fn default() -> Self {
        KarcherConfig {
            tol_grad: None,
            max_iter: 500,
            step: 1.0,
        }
    }
}

impl KarcherConfig {
    fn validate(&self) -> Result<()> {
        if let Some(t) = self.tol_grad {
            if !(t > 0.0) {
                return Err(CoreError::InvalidParameter(format!(
                    "tol_grad must be positive, got {t}"
                )));
            }
        }
        if self.max_iter == 0 {
            return Err(CoreError::InvalidParameter("max_iter must be >= 1".into()));
        }
        if !(self.step > 0.0 && self.step <= 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "step must lie in (0,1], got {}",
                self.step
            )));
        }
        Ok(())
    }
}

/// Converged least-squares mean plus solver diagnostics.
#[derive(Clone, Debug)]
pub struct KarcherSolution {
    pub mean: HermitianMatrix,
    /// Fixed-point updates applied before the gradient test passed.
    pub iterations: usize,
    /// Final gradient norm ‖Σ w_i log(X^{−1/2}A_iX^{−1/2})‖_F.
    pub residual: f64,
}

fn require_pd(m: &HermitianMatrix) -> Result<()> {
    let lam_min = m.min_eigenvalue()?;
    if lam_min <= clamp_eps_for(m) {
        return Err(CoreError::SingularInput { lambda_min: lam_min });
    }
    Ok(())
}

fn check_family(mats: &[HermitianMatrix]) -> Result<usize> {
    let Some(first) = mats.first() else {
        return Err(CoreError::InvalidParameter(
            "need at least one matrix".into(),
        ));
    };
    for m in mats {
        if m.dim() != first.dim() {
            return Err(CoreError::DimensionMismatch {
                left: first.dim(),
                right: m.dim(),
            });
        }
        require_pd(m)?;
    }
    Ok(first.dim())
}

/// Geodesic distance δ(A,B) = ‖log A^{−1/2}BA^{−1/2}‖_F
/// = (Σ log²λ_i(A^{−1}B))^{1/2} in the trace metric on positive matrices.
pub fn riemannian_distance(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    require_pd(a)?;
    require_pd(b)?;
    let isa = inv_sqrtm(a)?;
    let inner = HermitianMatrix::from_cmatrix(
        &isa.as_cmatrix().mul(b.as_cmatrix())?.mul(isa.as_cmatrix())?,
    )?;
    let eigs = inner.eigenvalues()?;
    let floor = clamp_eps_for(&inner);
    Ok(eigs
        .iter()
        .map(|&l| l.max(floor).ln().powi(2))
        .sum::<f64>()
        .sqrt())
}

/// δ-diameter of a family: the largest pairwise Riemannian distance.
pub fn riemannian_diameter(mats: &[HermitianMatrix]) -> Result<f64> {
    let mut diam = 0.0f64;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            diam = diam.max(riemannian_distance(&mats[i], &mats[j])?);
        }
    }
    Ok(diam)
}

/// Weighted least-squares mean: the minimizer of Σ w_i δ²(X, A_i), found by
/// the damped fixed-point iteration
/// X ← X^{1/2} exp(step·Σ w_i log(X^{−1/2}A_iX^{−1/2})) X^{1/2}
/// started at the weighted log-Euclidean mean. The step is halved whenever
/// the gradient norm fails to decrease by at least 10% and never grows back;
/// this keeps the iteration out of the period-two cycles the undamped map
/// falls into on ill-conditioned families.
pub fn karcher_mean(
    w: &WeightVector,
    mats: &[HermitianMatrix],
    cfg: &KarcherConfig,
) -> Result<KarcherSolution> {
    w.validate()?;
    cfg.validate()?;
    if w.len() != mats.len() {
        return Err(CoreError::DimensionMismatch {
            left: w.len(),
            right: mats.len(),
        });
    }
    check_family(mats)?;
    // Zero weights contribute nothing to the objective; drop them.
    let active: Vec<(f64, &HermitianMatrix)> = w
        .weights
        .iter()
        .zip(mats)
        .filter(|(&wi, _)| wi > 0.0)
        .map(|(&wi, m)| (wi, m))
        .collect();
    if active.len() == 1 {
        return Ok(KarcherSolution {
            mean: active[0].1.clone(),
            iterations: 0,
            residual: 0.0,
        });
    }

    let logs: Vec<HermitianMatrix> = active
        .iter()
        .map(|(_, m)| logm(m))
        .collect::<Result<_>>()?;
    let tol = cfg.tol_grad.unwrap_or_else(|| {
        let max_log = logs
            .iter()
            .fold(0.0f64, |acc, l| acc.max(l.frobenius_norm()));
        1e-10 * active.len() as f64 * (1.0 + max_log)
    });

    let dim = mats[0].dim();
    let mut x = HermitianMatrix::zeros(dim);
    for ((wi, _), l) in active.iter().zip(&logs) {
        x = x.add(&l.scale(*wi))?;
    }
    let mut x = expm(&x)?;

    let mut step = cfg.step;
    let mut prev_res = f64::INFINITY;
    let mut updates = 0usize;
    loop {
        let xs = sqrtm(&x)?;
        let xis = inv_sqrtm(&x)?;
        let mut grad = HermitianMatrix::zeros(dim);
        for (wi, m) in &active {
            let inner = HermitianMatrix::from_cmatrix(
                &xis.as_cmatrix().mul(m.as_cmatrix())?.mul(xis.as_cmatrix())?,
            )?;
            grad = grad.add(&logm(&inner)?.scale(*wi))?;
        }
        let res = grad.frobenius_norm();
        if res <= tol {
            return Ok(KarcherSolution {
                mean: x,
                iterations: updates,
                residual: res,
            });
        }
        if updates == cfg.max_iter {
            return Err(CoreError::IterationLimit {
                iterations: updates,
                residual: res,
                target: tol,
            });
        }
        if res > 0.9 * prev_res {
            step = (step / 2.0).max(1.0 / 16.0);
        }
        let move_ = expm(&grad.scale(step))?;
        x = HermitianMatrix::from_cmatrix(
            &xs.as_cmatrix().mul(move_.as_cmatrix())?.mul(xs.as_cmatrix())?,
        )?;
        prev_res = res;
        updates += 1;
    }
}

/// Inductive mean: S_1 = A_1, S_k = S_{k−1} #_{1/k} A_k.
pub fn inductive_mean(mats: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    check_family(mats)?;
    let mut s = mats[0].clone();
    for (k, a) in mats.iter().enumerate().skip(1) {
        s = weighted_geometric(&s, a, 1.0 / (k + 1) as f64)?;
    }
    Ok(s)
}

/// Sturm's stochastic approximation of the least-squares mean: run the
/// inductive recursion along k i.i.d. draws from the weight distribution.
/// Deterministic per seed.
pub fn sturm_approximation(
    w: &WeightVector,
    mats: &[HermitianMatrix],
    steps: usize,
    seed: u64,
) -> Result<HermitianMatrix> {
    w.validate()?;
    if w.len() != mats.len() {
        return Err(CoreError::DimensionMismatch {
            left: w.len(),
            right: mats.len(),
        });
    }
    check_family(mats)?;
    if steps == 0 {
        return Err(CoreError::InvalidParameter(
            "need at least one sampling step".into(),
        ));
    }
    let dist = WeightedIndex::new(&w.weights)
        .map_err(|e| CoreError::InvalidParameter(format!("bad weights: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = mats[dist.sample(&mut rng)].clone();
    for k in 2..=steps {
        let pick = &mats[dist.sample(&mut rng)];
        s = weighted_geometric(&s, pick, 1.0 / k as f64)?;
    }
    Ok(s)
}

fn dirichlet_uniform(rng: &mut impl Rng, m: usize) -> WeightVector {
    // Normalized unit-rate exponentials are uniform on the simplex.
    let draws: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    WeightVector {
        weights: draws.iter().map(|&e| e / total).collect(),
    }
}

/// Measure-averaged mean ∫ G_m(w; A) dν(w): a mass-weighted sum of
/// least-squares means over the atoms, or a Monte Carlo average over
/// uniform simplex samples. Samples use one RNG stream each (stream index =
/// sample index), and the average is folded in sample order, so the result
/// depends only on `seed`, never on thread scheduling.
pub fn geodesic_mean_m(
    nu: &SimplexMeasure,
    mats: &[HermitianMatrix],
    cfg: &KarcherConfig,
    seed: u64,
) -> Result<HermitianMatrix> {
    nu.validate()?;
    let dim = check_family(mats)?;
    let m = mats.len();
    match nu.mc_uniform {
        None => {
            let mut acc = HermitianMatrix::zeros(dim);
            for (w, mass) in &nu.atoms {
                if w.len() != m {
                    return Err(CoreError::DimensionMismatch {
                        left: w.len(),
                        right: m,
                    });
                }
                acc = acc.add(&karcher_mean(w, mats, cfg)?.mean.scale(*mass))?;
            }
            Ok(acc)
        }
        Some(samples) => {
            let one_sample = |i: usize| -> Result<HermitianMatrix> {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                let w = dirichlet_uniform(&mut rng, m);
                Ok(karcher_mean(&w, mats, cfg)?.mean)
            };
            #[cfg(feature = "parallel")]
            let means: Vec<HermitianMatrix> = {
                use rayon::prelude::*;
                (0..samples)
                    .into_par_iter()
                    .map(one_sample)
                    .collect::<Result<_>>()?
            };
            #[cfg(not(feature = "parallel"))]
            let means: Vec<HermitianMatrix> = {
                (0..samples).map(one_sample).collect::<Result<_>>()?
            };
            let mut acc = HermitianMatrix::zeros(dim);
            for mean in &means {
                acc = acc.add(mean)?;
            }
            Ok(acc.scale(1.0 / samples as f64))
        }
    }
}
