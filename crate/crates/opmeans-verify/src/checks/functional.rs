//! Checkers for anti-norm and symmetric-norm functional inequalities on
//! two-matrix geodesic means: the `thm-4.7`, `cor-4.8`, `rem-4.9-negative`,
//! `prop-4.12`, and `prop-4.13` properties.

use opmeans_core::antinorm::AntiNormSpec;
use opmeans_core::matfun::powm;
use rand::Rng;

use super::util::*;
use crate::{Result, SampleCtx, Sampled, TrialInput};

/// Geodesic means used throughout this family: the midpoint geodesic, the
/// logarithmic mean, and the order-1/2 binomial measure mean.
const GEODESIC_MEANS: [&str; 3] = ["geo", "falpha:a=1", "bp:p=0.5"];

fn sample_mean_f_pair(ctx: &mut SampleCtx, id: &str) -> Result<Sampled> {
    let mean = GEODESIC_MEANS[ctx.trial % 3];
    let f = F_CONCAVE[(ctx.trial / 3) % F_CONCAVE.len()];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new(id, ctx.dim, ctx.trial);
    input.set_str("mean", mean).set_str("f", f);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

pub fn sample_thm47(ctx: &mut SampleCtx) -> Result<Sampled> {
    sample_mean_f_pair(ctx, "thm-4.7")
}

/// Derived anti-norms of a concave image of a geodesic mean dominate the
/// scalar mean of the anti-norms of the images.
pub fn margin_thm47(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let f = input.strp("f")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let fm = apply_f(f, &mean_pair(mean, a, b)?)?;
    let fa = apply_f(f, a)?;
    let fb = apply_f(f, b)?;
    let mut worst = f64::INFINITY;
    for spec in derived_grid(a.dim()) {
        let lhs = evaluate_antinorm(&spec, &fm)?;
        let rhs = scalar_mean_name(mean, evaluate_antinorm(&spec, &fa)?, evaluate_antinorm(&spec, &fb)?)?;
        worst = worst.min(gap(lhs, rhs));
    }
    Ok(worst)
}

pub fn sample_cor48(ctx: &mut SampleCtx) -> Result<Sampled> {
    sample_mean_f_pair(ctx, "cor-4.8")
}

/// Same statement specialized to the bottom-spectrum geometric means Δ_k.
pub fn margin_cor48(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let f = input.strp("f")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let fm = apply_f(f, &mean_pair(mean, a, b)?)?;
    let fa = apply_f(f, a)?;
    let fb = apply_f(f, b)?;
    let mut worst = f64::INFINITY;
    for k in 1..=a.dim() {
        let spec = AntiNormSpec::Delta { k };
        let lhs = evaluate_antinorm(&spec, &fm)?;
        let rhs = scalar_mean_name(mean, evaluate_antinorm(&spec, &fa)?, evaluate_antinorm(&spec, &fb)?)?;
        worst = worst.min(gap(lhs, rhs));
    }
    Ok(worst)
}

/// Negative control: for regular anti-norms (nonzero on nonzero singular
/// matrices) the mean inequality collapses on orthogonally supported pairs,
/// because every measure-backed mean of such a pair vanishes.
pub fn sample_rem49(ctx: &mut SampleCtx) -> Result<Sampled> {
    let n = ctx.dim;
    let r = (n / 2).max(1);
    let mut da = vec![0.0; n];
    let mut db = vec![0.0; n];
    for v in da.iter_mut().take(r) {
        *v = ctx.rng.gen_range(0.5..4.0);
    }
    for v in db.iter_mut().skip(r) {
        *v = ctx.rng.gen_range(0.5..4.0);
    }
    let u = opmeans_core::sample::haar_unitary(ctx.rng, n);
    let a = opmeans_core::HermitianMatrix::from_diag(&da).congruence(&u.adjoint())?;
    let b = opmeans_core::HermitianMatrix::from_diag(&db).congruence(&u.adjoint())?;
    let mut input = TrialInput::new("rem-4.9-negative", ctx.dim, ctx.trial);
    input.set_str("mean", "falpha:a=1");
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

pub fn margin_rem49(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let m = mean_pair(mean, a, b)?;
    let n = a.dim();
    let regular = [
        AntiNormSpec::Schatten { p: 0.5 },
        AntiNormSpec::KyFanAnti { k: n },
    ];
    let mut worst = f64::INFINITY;
    for spec in regular {
        let lhs = evaluate_antinorm(&spec, &m)?;
        let rhs = scalar_mean_name(mean, evaluate_antinorm(&spec, a)?, evaluate_antinorm(&spec, b)?)?;
        worst = worst.min(gap(lhs, rhs));
    }
    Ok(worst)
}

pub fn sample_prop412(ctx: &mut SampleCtx) -> Result<Sampled> {
    let f = F_CONCAVE[ctx.trial % F_CONCAVE.len()];
    let p = [0.25, 0.5, 1.0, 0.0][(ctx.trial / 3) % 4];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new("prop-4.12", ctx.dim, ctx.trial);
    input.set_str("f", f).set_f64("p", p);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

/// Binomial-mean version for derived anti-norms, plus the equivalent
/// p-superadditivity form.
pub fn margin_prop412(input: &TrialInput) -> Result<f64> {
    let f = input.strp("f")?;
    let p = input.f64p("p")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let mean = opmeans_core::opmean::power_mean(a, b, p)?;
    let fm = apply_f(f, &mean)?;
    let fa = apply_f(f, a)?;
    let fb = apply_f(f, b)?;
    let mut worst = f64::INFINITY;
    let psum = if p > 0.0 {
        Some(powm(&powm(&fa, p)?.add(&powm(&fb, p)?)?, 1.0 / p)?)
    } else {
        None
    };
    for spec in derived_grid(a.dim()) {
        let na = evaluate_antinorm(&spec, &fa)?;
        let nb = evaluate_antinorm(&spec, &fb)?;
        let lhs = evaluate_antinorm(&spec, &fm)?;
        worst = worst.min(gap(lhs, scalar_beta(na, nb, p)));
        if let Some(s) = &psum {
            let lhs2 = evaluate_antinorm(&spec, s)?.powf(p);
            worst = worst.min(gap(lhs2, na.powf(p) + nb.powf(p)));
        }
    }
    Ok(worst)
}

pub fn sample_prop413(ctx: &mut SampleCtx) -> Result<Sampled> {
    const GS: [&str; 2] = ["powsum:1*t^2", "powsum:1*t^2+0.5*t^-1"];
    let mean = GEODESIC_MEANS[ctx.trial % 3];
    let g = GS[(ctx.trial / 3) % 2];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new("prop-4.13", ctx.dim, ctx.trial);
    input.set_str("mean", mean).set_str("g", g);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

/// Reverse direction: symmetric norms of a doubly convex image of a geodesic
/// mean are dominated by the scalar mean of the norms of the images.
pub fn margin_prop413(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let g = input.strp("g")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let gm = apply_f(g, &mean_pair(mean, a, b)?)?;
    let ga = apply_f(g, a)?;
    let gb = apply_f(g, b)?;
    let mut worst = f64::INFINITY;
    for spec in norm_grid(a.dim()) {
        let lhs = scalar_mean_name(mean, evaluate_norm(&spec, &ga)?, evaluate_norm(&spec, &gb)?)?;
        worst = worst.min(gap(lhs, evaluate_norm(&spec, &gm)?));
    }
    Ok(worst)
}
