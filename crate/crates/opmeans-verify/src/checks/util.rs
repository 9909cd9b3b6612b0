//! Shared sampling helpers and margin conventions for the property checkers.
//!
//! Margin convention: every checker maps a trial to a single `f64` slack.
//! Nonnegative slack (up to `-tol`) means the inequality held. Additive
//! inequalities are normalized by `1 + |lhs| + |rhs|` (or the Frobenius
//! analogue); product inequalities are compared on the k-th-root scale so the
//! same normalization applies.

use opmeans_core::antinorm::{AntiNormSpec, NormSpec};
use opmeans_core::hermitian::HermitianMatrix;
use opmeans_core::matfun::powm;
use opmeans_core::opmean::{kubo_ando_default, rf_by_name, scalar_mean, RepresentingFunction};
use opmeans_core::posmap::{power_map, PositiveMap};
use opmeans_core::sample::{sample_psd, PsdSamplerConfig};
use opmeans_core::scalar;
use rand::Rng;

use crate::{Result, SampleCtx, VerifyError};

/// Default condition-number cap for positive-definite samples.
pub const PD_COND: f64 = 100.0;

/// Concave test functions used across the image-of-a-mean checks.
pub const F_CONCAVE: [&str; 3] = ["pow:0.5", "t/(t+1)", "1-exp(-t)"];

/// Normalized slack of the scalar inequality `lhs >= rhs`.
pub fn gap(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs) / (1.0 + lhs.abs() + rhs.abs())
}

/// Normalized slack of the equality `x == y`.
pub fn equality_margin(x: f64, y: f64) -> f64 {
    -(x - y).abs() / (1.0 + x.abs() + y.abs())
}

/// Normalized slack of the ordering `a >= b` in the positive-semidefinite
/// sense: smallest eigenvalue of the difference over the joint scale.
pub fn loewner_margin(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    let d = a.sub(b)?;
    let scale = 1.0 + a.frobenius_norm() + b.frobenius_norm();
    Ok(d.min_eigenvalue()? / scale)
}

/// Natural logs of the spectrum, descending, clamped away from -inf.
pub fn log_spectrum_desc(a: &HermitianMatrix) -> Result<Vec<f64>> {
    let eigs = a.eigenvalues()?;
    Ok(eigs.iter().map(|&x| x.max(1e-300).ln()).collect())
}

/// k-th root of the product of the k largest eigenvalues (logs descending).
pub fn root_top(logs_desc: &[f64], k: usize) -> f64 {
    let s: f64 = logs_desc[..k].iter().sum();
    (s / k as f64).exp()
}

/// k-th root of the product of the k smallest eigenvalues (logs descending).
pub fn root_bottom(logs_desc: &[f64], k: usize) -> f64 {
    let n = logs_desc.len();
    let s: f64 = logs_desc[n - k..].iter().sum();
    (s / k as f64).exp()
}

/// Apply a named scalar function to a matrix through the spectral calculus.
pub fn apply_f(name: &str, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let f = scalar::by_name(name)?;
    Ok(opmeans_core::matfun::matrix_function(
        a,
        &f.domain,
        |t| f.eval(t),
    )?)
}

pub fn scalar_f(name: &str, x: f64) -> Result<f64> {
    let f = scalar::by_name(name)?;
    Ok(f.eval(x))
}

/// Two-matrix mean from a representing-function name, with the library's
/// default regularization for singular operands.
pub fn mean_pair(name: &str, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    let h = rf_by_name(name)?;
    Ok(kubo_ando_default(&h, a, b)?.0)
}

pub fn scalar_mean_name(name: &str, x: f64, y: f64) -> Result<f64> {
    let h = rf_by_name(name)?;
    Ok(scalar_mean(&h, x, y)?)
}

pub fn rf(name: &str) -> Result<RepresentingFunction> {
    Ok(rf_by_name(name)?)
}

/// Scalar binomial (power) mean of order `p in [0,1]`; `p = 0` is geometric.
pub fn scalar_beta(x: f64, y: f64, p: f64) -> f64 {
    if p == 0.0 {
        (x * y).sqrt()
    } else {
        (0.5 * (x.powf(p) + y.powf(p))).powf(1.0 / p)
    }
}

/// Matrix binomial mean for arbitrary order `q > 0` (the library's
/// `power_mean` stops at 1, which is where operator monotony ends).
pub fn beta_q_matrix(a: &HermitianMatrix, b: &HermitianMatrix, q: f64) -> Result<HermitianMatrix> {
    if (0.0..=1.0).contains(&q) {
        return Ok(opmeans_core::opmean::power_mean(a, b, q)?);
    }
    let s = powm(a, q)?.add(&powm(b, q)?)?.scale(0.5);
    Ok(powm(&s, 1.0 / q)?)
}

/// `(E(Z^q))^{1/q}` for arbitrary `q >= 1` (the library's `power_map` stops
/// at 1 for the same reason as above).
pub fn power_map_any(e: &PositiveMap, z: &HermitianMatrix, q: f64) -> Result<HermitianMatrix> {
    if (0.0..=1.0).contains(&q) && q > 0.0 {
        return Ok(power_map(e, z, q)?);
    }
    let inner = e.apply(&powm(z, q)?)?;
    Ok(powm(&inner, 1.0 / q)?)
}

/// Positive-definite sample with spectrum spanning condition `cond`, with a
/// random overall scale so homogeneity bugs cannot hide.
pub fn sample_pd(ctx: &mut SampleCtx, cond: f64) -> Result<HermitianMatrix> {
    let cfg = PsdSamplerConfig::new(ctx.dim).with_condition(cond);
    let s = sample_psd(ctx.rng, &cfg)?;
    let scale: f64 = ctx.rng.gen_range(0.5..2.0);
    Ok(s.matrix.scale(scale))
}

/// Positive-semidefinite sample with one zero eigenvalue.
pub fn sample_singular(ctx: &mut SampleCtx) -> Result<HermitianMatrix> {
    let cfg = PsdSamplerConfig::new(ctx.dim)
        .with_condition(PD_COND)
        .with_rank_deficit(1);
    let s = sample_psd(ctx.rng, &cfg)?;
    Ok(s.matrix)
}

/// Diagonal matrix conjugated by a Haar-random unitary.
pub fn rotated_diag(ctx: &mut SampleCtx, diag: &[f64]) -> Result<HermitianMatrix> {
    let u = opmeans_core::sample::haar_unitary(ctx.rng, diag.len());
    let d = HermitianMatrix::from_diag(diag);
    Ok(d.congruence(&u.adjoint())?)
}

/// Random correlation matrix: PSD with unit diagonal.
pub fn random_correlation(ctx: &mut SampleCtx) -> Result<HermitianMatrix> {
    let w = sample_pd(ctx, 10.0)?;
    let d: Vec<f64> = (0..ctx.dim).map(|i| w.get(i, i).re).collect();
    let mut c = HermitianMatrix::zeros(ctx.dim);
    for i in 0..ctx.dim {
        for j in i..ctx.dim {
            let v = w.get(i, j) / (d[i] * d[j]).sqrt();
            c.set_sym(i, j, v);
        }
    }
    Ok(c)
}

/// Derived anti-norms: the family built from a symmetric norm on inverse
/// powers, plus its closed-form special cases. These are exactly the
/// functionals for which the bottom-spectrum monotonicity lemma holds.
pub fn derived_grid(dim: usize) -> Vec<AntiNormSpec> {
    let k = dim.min(2);
    vec![
        AntiNormSpec::Derived {
            norm: NormSpec::KyFan { k },
            p: 0.5,
        },
        AntiNormSpec::Derived {
            norm: NormSpec::KyFan { k },
            p: 1.0,
        },
        AntiNormSpec::Derived {
            norm: NormSpec::KyFan { k },
            p: 2.0,
        },
        AntiNormSpec::NegSchatten { p: 0.5 },
        AntiNormSpec::NegSchatten { p: 1.0 },
        AntiNormSpec::SchattenKyFan { p: 1.0, k },
        AntiNormSpec::Delta { k },
        AntiNormSpec::Minkowski,
    ]
}

/// A spread of symmetric anti-norms including non-derived ones, for the
/// statements that hold with no restriction on the functional.
pub fn all_antinorm_grid(dim: usize) -> Vec<AntiNormSpec> {
    let k = dim.min(2);
    vec![
        AntiNormSpec::KyFanAnti { k: 1 },
        AntiNormSpec::KyFanAnti { k: dim },
        AntiNormSpec::Schatten { p: 0.5 },
        AntiNormSpec::NegSchatten { p: 1.0 },
        AntiNormSpec::Delta { k },
        AntiNormSpec::Minkowski,
    ]
}

/// Symmetric norms used for the norm-side inequalities.
pub fn norm_grid(dim: usize) -> Vec<NormSpec> {
    vec![
        NormSpec::Trace,
        NormSpec::Operator,
        NormSpec::KyFan { k: dim.min(2) },
        NormSpec::Schatten { p: 2.0 },
    ]
}

pub fn antinorm_name(spec: &AntiNormSpec) -> String {
    spec.to_string()
}

pub fn antinorm_by_name(name: &str) -> Result<AntiNormSpec> {
    name.parse::<AntiNormSpec>()
        .map_err(|e| VerifyError::Eval(format!("bad anti-norm spec '{name}': {e}")))
}

pub fn norm_by_name(name: &str) -> Result<NormSpec> {
    name.parse::<NormSpec>()
        .map_err(|e| VerifyError::Eval(format!("bad norm spec '{name}': {e}")))
}

pub fn evaluate_antinorm(spec: &AntiNormSpec, a: &HermitianMatrix) -> Result<f64> {
    Ok(opmeans_core::antinorm::evaluate_antinorm(spec, a)?)
}

pub fn evaluate_norm(spec: &NormSpec, a: &HermitianMatrix) -> Result<f64> {
    Ok(opmeans_core::antinorm::evaluate_norm(spec, a)?)
}

/// Fold a sequence of sub-margins into the trial margin (their minimum).
pub fn fold_min(margins: impl IntoIterator<Item = f64>) -> f64 {
    margins.into_iter().fold(f64::INFINITY, f64::min)
}
