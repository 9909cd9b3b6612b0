//! Checkers for multivariable geodesic means (Karcher barycenters and
//! measure-weighted means): the `prop-5.2` through `thm-5.5` and `bk-*`
//! properties.

use opmeans_core::hermitian::{sorted_diagonal, HermitianMatrix};
use opmeans_core::majorization::log_majorizes;
use opmeans_core::matfun::invm;
use opmeans_core::multi::{geodesic_mean_m, karcher_mean, KarcherConfig, SimplexMeasure, WeightVector};
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::util::*;
use crate::{Result, SampleCtx, Sampled, TrialInput, VerifyError};

const M: usize = 3;
const MAJ_TOL: f64 = 1e-9;
/// Monte Carlo sample count for the empirical sub-checks.
const MC_SAMPLES: usize = 48;

fn tight_cfg() -> KarcherConfig {
    KarcherConfig {
        tol_grad: Some(1e-10),
        max_iter: 2000,
        step: 1.0,
    }
}

fn random_simplex(ctx: &mut SampleCtx, m: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..m).map(|_| { let e: f64 = Exp1.sample(ctx.rng); e + 1e-12 }).collect();
    let s: f64 = w.iter().sum();
    for v in &mut w {
        *v /= s;
    }
    w
}

fn sample_family(ctx: &mut SampleCtx) -> Result<Vec<HermitianMatrix>> {
    (0..M).map(|_| sample_pd(ctx, PD_COND)).collect()
}

fn store_family(input: &mut TrialInput, mats: &[HermitianMatrix]) {
    for (i, m) in mats.iter().enumerate() {
        input.set_mat(&format!("A{i}"), m.clone());
    }
    input.set_usize("m", mats.len());
}

fn load_family(input: &TrialInput) -> Result<Vec<HermitianMatrix>> {
    let m = input.usizep("m")?;
    (0..m).map(|i| Ok(input.mat(&format!("A{i}"))?.clone())).collect()
}

fn store_weights(input: &mut TrialInput, key: &str, w: &[f64]) {
    input.set_value(key, serde_json::json!(w));
}

fn load_weights(input: &TrialInput, key: &str) -> Result<Vec<f64>> {
    let v = input
        .params
        .get(key)
        .ok_or_else(|| VerifyError::Eval(format!("trial input missing weights '{key}'")))?;
    Ok(serde_json::from_value(v.clone())?)
}

/// Two-atom measure stored as [(weights, mass); 2].
fn store_atoms(input: &mut TrialInput, atoms: &[(Vec<f64>, f64)]) {
    let v: Vec<serde_json::Value> = atoms
        .iter()
        .map(|(w, q)| serde_json::json!({ "w": w, "mass": q }))
        .collect();
    input.set_value("atoms", serde_json::Value::Array(v));
}

fn load_atoms(input: &TrialInput) -> Result<Vec<(Vec<f64>, f64)>> {
    let v = input
        .params
        .get("atoms")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| VerifyError::Eval("trial input missing 'atoms'".into()))?;
    v.iter()
        .map(|entry| {
            let w: Vec<f64> = serde_json::from_value(entry["w"].clone())?;
            let mass = entry["mass"]
                .as_f64()
                .ok_or_else(|| VerifyError::Eval("atom missing mass".into()))?;
            Ok((w, mass))
        })
        .collect()
}

fn measure_from_atoms(atoms: &[(Vec<f64>, f64)]) -> Result<SimplexMeasure> {
    let pairs = atoms
        .iter()
        .map(|(w, q)| Ok((WeightVector::new(w.clone())?, *q)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimplexMeasure::from_atoms(pairs)?)
}

/// Scalar measure-weighted mean via the 1x1-matrix embedding; shares the
/// measure (and any Monte Carlo seed) with the matrix-side computation.
fn scalar_measure_mean(nu: &SimplexMeasure, values: &[f64], seed: u64) -> Result<f64> {
    let mats: Vec<HermitianMatrix> = values
        .iter()
        .map(|&x| HermitianMatrix::from_diag(&[x]))
        .collect();
    let g = geodesic_mean_m(nu, &mats, &tight_cfg(), seed)?;
    Ok(g.get(0, 0).re)
}

fn weighted_arithmetic(w: &[f64], mats: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    let mut acc = HermitianMatrix::zeros(mats[0].dim());
    for (wi, m) in w.iter().zip(mats) {
        acc = acc.add(&m.scale(*wi))?;
    }
    Ok(acc)
}

fn weighted_harmonic(w: &[f64], mats: &[HermitianMatrix]) -> Result<HermitianMatrix> {
    let mut acc = HermitianMatrix::zeros(mats[0].dim());
    for (wi, m) in w.iter().zip(mats) {
        acc = acc.add(&invm(m)?.scale(*wi))?;
    }
    Ok(invm(&acc)?)
}

pub fn sample_prop52(ctx: &mut SampleCtx) -> Result<Sampled> {
    let mats = sample_family(ctx)?;
    let w1 = random_simplex(ctx, M);
    let w2 = random_simplex(ctx, M);
    let q: f64 = ctx.rng.gen_range(0.2..0.8);
    let mc: Vec<Vec<f64>> = (0..MC_SAMPLES).map(|_| random_simplex(ctx, M)).collect();
    let mut input = TrialInput::new("prop-5.2", ctx.dim, ctx.trial);
    store_family(&mut input, &mats);
    store_atoms(&mut input, &[(w1, q), (w2, 1.0 - q)]);
    input.set_value("mc_weights", serde_json::json!(mc));
    Ok(Sampled::direct(input))
}

/// The measure-weighted mean sits between the weighted harmonic and
/// arithmetic means taken at the measure's barycenter weight. The atomic
/// part is exact; the Monte Carlo part estimates the uniform-measure mean
/// and widens its margin by three standard errors.
pub fn margin_prop52(input: &TrialInput) -> Result<f64> {
    let mats = load_family(input)?;
    let atoms = load_atoms(input)?;
    let nu = measure_from_atoms(&atoms)?;
    let g = geodesic_mean_m(&nu, &mats, &tight_cfg(), 0)?;
    let mut wbar = vec![0.0; M];
    for (w, q) in &atoms {
        for i in 0..M {
            wbar[i] += q * w[i];
        }
    }
    let lo = weighted_harmonic(&wbar, &mats)?;
    let hi = weighted_arithmetic(&wbar, &mats)?;
    let atomic = loewner_margin(&g, &lo)?.min(loewner_margin(&hi, &g)?);

    // Monte Carlo estimate of the uniform-measure mean vs the exact centroid
    // bounds (the centroid of the uniform simplex measure is 1/m each).
    let mc = load_weights_matrix(input, "mc_weights")?;
    let s = mc.len();
    let mut samples = Vec::with_capacity(s);
    for w in &mc {
        let sol = karcher_mean(&WeightVector::new(w.clone())?, &mats, &tight_cfg())?;
        samples.push(sol.mean);
    }
    let mut ghat = HermitianMatrix::zeros(mats[0].dim());
    for gs in &samples {
        ghat = ghat.add(&gs.scale(1.0 / s as f64))?;
    }
    let mut var = 0.0;
    for gs in &samples {
        var += gs.sub(&ghat)?.frobenius_norm().powi(2);
    }
    let se = (var / (s as f64 * (s as f64 - 1.0))).sqrt();
    let centroid = vec![1.0 / M as f64; M];
    let lo_u = weighted_harmonic(&centroid, &mats)?;
    let hi_u = weighted_arithmetic(&centroid, &mats)?;
    let widen_lo = 3.0 * se / (1.0 + ghat.frobenius_norm() + lo_u.frobenius_norm());
    let widen_hi = 3.0 * se / (1.0 + ghat.frobenius_norm() + hi_u.frobenius_norm());
    let mc_margin = (loewner_margin(&ghat, &lo_u)? + widen_lo)
        .min(loewner_margin(&hi_u, &ghat)? + widen_hi);

    Ok(atomic.min(mc_margin))
}

fn load_weights_matrix(input: &TrialInput, key: &str) -> Result<Vec<Vec<f64>>> {
    let v = input
        .params
        .get(key)
        .ok_or_else(|| VerifyError::Eval(format!("trial input missing '{key}'")))?;
    Ok(serde_json::from_value(v.clone())?)
}

pub fn sample_prop53(ctx: &mut SampleCtx) -> Result<Sampled> {
    let mats = sample_family(ctx)?;
    let w = random_simplex(ctx, M);
    let mut input = TrialInput::new("prop-5.3", ctx.dim, ctx.trial);
    store_family(&mut input, &mats);
    store_weights(&mut input, "w", &w);
    Ok(Sampled::direct(input))
}

/// The Karcher barycenter is log-majorized by the barycenter of the sorted
/// spectra.
pub fn margin_prop53(input: &TrialInput) -> Result<f64> {
    let mats = load_family(input)?;
    let w = WeightVector::new(load_weights(input, "w")?)?;
    let g = karcher_mean(&w, &mats, &tight_cfg())?.mean;
    let sorted: Vec<HermitianMatrix> = mats
        .iter()
        .map(|m| Ok(sorted_diagonal(m, true)?))
        .collect::<Result<Vec<_>>>()?;
    let gs = karcher_mean(&w, &sorted, &tight_cfg())?.mean;
    Ok(log_majorizes(&g, &gs, MAJ_TOL)?.worst_margin)
}

pub fn sample_prop54(ctx: &mut SampleCtx) -> Result<Sampled> {
    let mats = sample_family(ctx)?;
    let mut input = TrialInput::new("prop-5.4", ctx.dim, ctx.trial);
    store_family(&mut input, &mats);
    if ctx.trial % 2 == 0 {
        let w1 = random_simplex(ctx, M);
        let w2 = random_simplex(ctx, M);
        let q: f64 = ctx.rng.gen_range(0.2..0.8);
        store_atoms(&mut input, &[(w1, q), (w2, 1.0 - q)]);
    } else {
        input.set_usize("mc", MC_SAMPLES);
        input.set_usize("mc_seed", ctx.rng.gen::<u32>() as usize);
    }
    Ok(Sampled::direct(input))
}

fn measure_of(input: &TrialInput) -> Result<(SimplexMeasure, u64)> {
    if input.params.contains_key("atoms") {
        Ok((measure_from_atoms(&load_atoms(input)?)?, 0))
    } else {
        let s = input.usizep("mc")?;
        let seed = input.usizep("mc_seed")? as u64;
        Ok((SimplexMeasure::uniform(s)?, seed))
    }
}

/// Bottom-spectrum geometric means of the matrix mean dominate the scalar
/// measure-mean of the operands' values. Monte Carlo measures share their
/// weight draws between the matrix and scalar sides, so the comparison is
/// exact for the realized empirical measure.
pub fn margin_prop54(input: &TrialInput) -> Result<f64> {
    let mats = load_family(input)?;
    let (nu, seed) = measure_of(input)?;
    let g = geodesic_mean_m(&nu, &mats, &tight_cfg(), seed)?;
    let n = mats[0].dim();
    let mut worst = f64::INFINITY;
    for k in 1..=n {
        let spec = opmeans_core::antinorm::AntiNormSpec::Delta { k };
        let lhs = evaluate_antinorm(&spec, &g)?;
        let vals: Vec<f64> = mats
            .iter()
            .map(|m| evaluate_antinorm(&spec, m))
            .collect::<Result<Vec<_>>>()?;
        let rhs = scalar_measure_mean(&nu, &vals, seed)?;
        worst = worst.min(gap(lhs, rhs));
    }
    Ok(worst)
}

pub fn sample_thm55(ctx: &mut SampleCtx) -> Result<Sampled> {
    let mats = sample_family(ctx)?;
    let w1 = random_simplex(ctx, M);
    let w2 = random_simplex(ctx, M);
    let q: f64 = ctx.rng.gen_range(0.2..0.8);
    let f = F_CONCAVE[ctx.trial % F_CONCAVE.len()];
    let g = ["powsum:1*t^2", "powsum:1*t^2+0.5*t^-1"][ctx.trial % 2];
    let mut input = TrialInput::new("thm-5.5", ctx.dim, ctx.trial);
    store_family(&mut input, &mats);
    store_atoms(&mut input, &[(w1, q), (w2, 1.0 - q)]);
    input.set_str("f", f).set_str("g", g);
    Ok(Sampled::direct(input))
}

/// Both assertions of the multivariable image theorem: concave images win in
/// derived anti-norms, doubly convex images lose in symmetric norms.
pub fn margin_thm55(input: &TrialInput) -> Result<f64> {
    let mats = load_family(input)?;
    let atoms = load_atoms(input)?;
    let nu = measure_from_atoms(&atoms)?;
    let f = input.strp("f")?;
    let gfun = input.strp("g")?;
    let g = geodesic_mean_m(&nu, &mats, &tight_cfg(), 0)?;
    let n = mats[0].dim();
    let mut worst = f64::INFINITY;

    let fg = apply_f(f, &g)?;
    let f_images: Vec<HermitianMatrix> = mats
        .iter()
        .map(|m| apply_f(f, m))
        .collect::<Result<Vec<_>>>()?;
    for spec in derived_grid(n) {
        let lhs = evaluate_antinorm(&spec, &fg)?;
        let vals: Vec<f64> = f_images
            .iter()
            .map(|m| evaluate_antinorm(&spec, m))
            .collect::<Result<Vec<_>>>()?;
        worst = worst.min(gap(lhs, scalar_measure_mean(&nu, &vals, 0)?));
    }

    let gg = apply_f(gfun, &g)?;
    let g_images: Vec<HermitianMatrix> = mats
        .iter()
        .map(|m| apply_f(gfun, m))
        .collect::<Result<Vec<_>>>()?;
    for spec in norm_grid(n) {
        let rhs = evaluate_norm(&spec, &gg)?;
        let vals: Vec<f64> = g_images
            .iter()
            .map(|m| evaluate_norm(&spec, m))
            .collect::<Result<Vec<_>>>()?;
        worst = worst.min(gap(scalar_measure_mean(&nu, &vals, 0)?, rhs));
    }
    Ok(worst)
}

pub fn sample_bk_norm(ctx: &mut SampleCtx) -> Result<Sampled> {
    let mats = sample_family(ctx)?;
    let w = random_simplex(ctx, M);
    let mut input = TrialInput::new("bk-norm", ctx.dim, ctx.trial);
    store_family(&mut input, &mats);
    store_weights(&mut input, "w", &w);
    Ok(Sampled::direct(input))
}

pub fn sample_bk_antinorm(ctx: &mut SampleCtx) -> Result<Sampled> {
    let mut s = sample_bk_norm(ctx)?;
    s.input.id = "bk-antinorm".into();
    Ok(s)
}

/// Weighted product bound on symmetric norms of the Karcher barycenter.
pub fn margin_bk_norm(input: &TrialInput) -> Result<f64> {
    let mats = load_family(input)?;
    let w = load_weights(input, "w")?;
    let g = karcher_mean(&WeightVector::new(w.clone())?, &mats, &tight_cfg())?.mean;
    let mut worst = f64::INFINITY;
    for spec in norm_grid(mats[0].dim()) {
        let mut prod = 1.0;
        for (wi, m) in w.iter().zip(&mats) {
            prod *= evaluate_norm(&spec, m)?.powf(*wi);
        }
        worst = worst.min(gap(prod, evaluate_norm(&spec, &g)?));
    }
    Ok(worst)
}

/// Reverse weighted product bound for derived anti-norms.
pub fn margin_bk_antinorm(input: &TrialInput) -> Result<f64> {
    let mats = load_family(input)?;
    let w = load_weights(input, "w")?;
    let g = karcher_mean(&WeightVector::new(w.clone())?, &mats, &tight_cfg())?.mean;
    let mut worst = f64::INFINITY;
    for spec in derived_grid(mats[0].dim()) {
        let mut prod = 1.0;
        for (wi, m) in w.iter().zip(&mats) {
            prod *= evaluate_antinorm(&spec, m)?.powf(*wi);
        }
        worst = worst.min(gap(evaluate_antinorm(&spec, &g)?, prod));
    }
    Ok(worst)
}
