//! Checkers for spectral dominance of concave/convex images under positive
//! linear maps and binomial matrix means: the `thm-2.7-*`, `cor-2.8`,
//! `cor-2.9`, `cor-2.11`, and `prop-2.13` properties.

use opmeans_core::majorization::{eigenvalue_dominates, log_supermajorizes};
use opmeans_core::posmap::{power_map, zero_power_map, PositiveMap};
use rand::Rng;

use super::util::*;
use crate::{Result, SampleCtx, Sampled, TrialInput};

const MAJ_TOL: f64 = 1e-9;

/// The three unital reference maps: diagonal pinching, two-block averaging
/// (diagonal pinching again on odd dimensions), and Schur multiplication by
/// a unit-diagonal correlation matrix.
fn unital_map(ctx: &mut SampleCtx, kind: usize) -> Result<(PositiveMap, &'static str)> {
    let n = ctx.dim;
    Ok(match kind % 3 {
        0 => (PositiveMap::pinch_diag(n), "pinch-diag"),
        1 if n % 2 == 0 => (PositiveMap::two_block_average(n / 2), "two-block"),
        1 => (PositiveMap::pinch_diag(n), "pinch-diag"),
        _ => {
            let c = random_correlation(ctx)?;
            (
                PositiveMap::schur(c)?,
                "schur-correlation",
            )
        }
    })
}

fn sample_thm27(ctx: &mut SampleCtx, id: &str) -> Result<Sampled> {
    let (map, map_name) = unital_map(ctx, ctx.trial)?;
    let p = [0.25, 0.5, 1.0][(ctx.trial / 3) % 3];
    let f = F_CONCAVE[(ctx.trial / 9) % F_CONCAVE.len()];
    let z = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new(id, ctx.dim, ctx.trial);
    input.set_str("f", f).set_f64("p", p).set_str("map_kind", map_name);
    input.set_map("map", &map)?;
    input.set_mat("Z", z);
    Ok(Sampled::direct(input))
}

pub fn sample_thm27_logsup(ctx: &mut SampleCtx) -> Result<Sampled> {
    sample_thm27(ctx, "thm-2.7-logsup")
}

pub fn sample_thm27_dominance(ctx: &mut SampleCtx) -> Result<Sampled> {
    sample_thm27(ctx, "thm-2.7-dominance")
}

/// Both sides of the theorem at order p: f applied after vs before the
/// p-power transform of the map.
fn thm27_sides(
    input: &TrialInput,
) -> Result<(
    opmeans_core::HermitianMatrix,
    opmeans_core::HermitianMatrix,
)> {
    let e = input.map("map")?;
    let f = input.strp("f")?;
    let p = input.f64p("p")?;
    let z = input.mat("Z")?;
    let f_after = apply_f(f, &power_map(&e, z, p)?)?;
    let f_before = power_map(&e, &apply_f(f, z)?, p)?;
    Ok((f_after, f_before))
}

pub fn margin_thm27_logsup(input: &TrialInput) -> Result<f64> {
    let (f_after, f_before) = thm27_sides(input)?;
    Ok(log_supermajorizes(&f_after, &f_before, MAJ_TOL)?.worst_margin)
}

pub fn margin_thm27_dominance(input: &TrialInput) -> Result<f64> {
    let (f_after, f_before) = thm27_sides(input)?;
    Ok(eigenvalue_dominates(&f_after, &f_before, MAJ_TOL)?.worst_margin)
}

/// p = 0 case: geometric map limit, invertible inputs only, unital map, with
/// a condition-number cap because the limit argument needs invertibility.
pub fn sample_thm27_p0(ctx: &mut SampleCtx) -> Result<Sampled> {
    let (map, map_name) = unital_map(ctx, ctx.trial)?;
    let f = F_CONCAVE[(ctx.trial / 3) % F_CONCAVE.len()];
    let exponent: f64 = ctx.rng.gen_range(0.0..6.0);
    let z = sample_pd(ctx, 10f64.powf(exponent))?;
    let mut input = TrialInput::new("thm-2.7-p0", ctx.dim, ctx.trial);
    input.set_str("f", f).set_str("map_kind", map_name);
    input.set_map("map", &map)?;
    input.set_mat("Z", z);
    Ok(Sampled::direct(input))
}

pub fn margin_thm27_p0(input: &TrialInput) -> Result<f64> {
    let e = input.map("map")?;
    let f = input.strp("f")?;
    let z = input.mat("Z")?;
    let f_after = apply_f(f, &zero_power_map(&e, z)?)?;
    let f_before = zero_power_map(&e, &apply_f(f, z)?)?;
    let logsup = log_supermajorizes(&f_after, &f_before, MAJ_TOL)?.worst_margin;
    let dom = eigenvalue_dominates(&f_after, &f_before, MAJ_TOL)?.worst_margin;
    Ok(logsup.min(dom))
}

/// Concave image of the binomial mean dominates the binomial mean of images.
pub fn sample_cor28(ctx: &mut SampleCtx) -> Result<Sampled> {
    let f = F_CONCAVE[ctx.trial % F_CONCAVE.len()];
    let p = [0.25, 0.5, 1.0, 0.0][(ctx.trial / 3) % 4];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new("cor-2.8", ctx.dim, ctx.trial);
    input.set_str("f", f).set_f64("p", p);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

pub fn margin_cor28(input: &TrialInput) -> Result<f64> {
    let f = input.strp("f")?;
    let p = input.f64p("p")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let mean = opmeans_core::opmean::power_mean(a, b, p)?;
    let lhs = apply_f(f, &mean)?;
    let rhs = opmeans_core::opmean::power_mean(&apply_f(f, a)?, &apply_f(f, b)?, p)?;
    Ok(eigenvalue_dominates(&lhs, &rhs, MAJ_TOL)?.worst_margin)
}

/// Schur-multiplier specialization: the multiplier is PSD with diagonal
/// entries at most 1, making Schur multiplication sub-unital.
pub fn sample_cor29(ctx: &mut SampleCtx) -> Result<Sampled> {
    let c = random_correlation(ctx)?;
    let d: Vec<f64> = (0..ctx.dim).map(|_| ctx.rng.gen_range(0.3..1.0)).collect();
    let mut s = opmeans_core::HermitianMatrix::zeros(ctx.dim);
    for i in 0..ctx.dim {
        for j in i..ctx.dim {
            s.set_sym(i, j, c.get(i, j) * (d[i] * d[j]).sqrt());
        }
    }
    let f = F_CONCAVE[ctx.trial % F_CONCAVE.len()];
    let p = [0.25, 0.5, 1.0][(ctx.trial / 3) % 3];
    let z = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new("cor-2.9", ctx.dim, ctx.trial);
    input.set_str("f", f).set_f64("p", p);
    input.set_mat("S", s).set_mat("Z", z);
    Ok(Sampled::direct(input))
}

pub fn margin_cor29(input: &TrialInput) -> Result<f64> {
    let s = input.mat("S")?;
    let f = input.strp("f")?;
    let p = input.f64p("p")?;
    let z = input.mat("Z")?;
    let e = PositiveMap::schur(s.clone())?;
    let f_after = apply_f(f, &power_map(&e, z, p)?)?;
    let f_before = power_map(&e, &apply_f(f, z)?, p)?;
    Ok(eigenvalue_dominates(&f_after, &f_before, MAJ_TOL)?.worst_margin)
}

/// Determinant-root version, including the identity function (Minkowski's
/// inequality at p = 1).
pub fn sample_cor211(ctx: &mut SampleCtx) -> Result<Sampled> {
    const FS: [&str; 4] = ["pow:0.5", "t/(t+1)", "1-exp(-t)", "pow:1"];
    let f = FS[ctx.trial % FS.len()];
    let p = [0.0, 0.25, 0.5, 1.0][(ctx.trial / 4) % 4];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new("cor-2.11", ctx.dim, ctx.trial);
    input.set_str("f", f).set_f64("p", p);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

pub fn margin_cor211(input: &TrialInput) -> Result<f64> {
    let f = input.strp("f")?;
    let p = input.f64p("p")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let n = a.dim();
    let detroot = |m: &opmeans_core::HermitianMatrix| -> Result<f64> {
        let logs = log_spectrum_desc(m)?;
        Ok(root_top(&logs, n))
    };
    let mean = opmeans_core::opmean::power_mean(a, b, p)?;
    let lhs = detroot(&apply_f(f, &mean)?)?;
    let rhs = scalar_beta(detroot(&apply_f(f, a)?)?, detroot(&apply_f(f, b)?)?, p);
    Ok(gap(lhs, rhs))
}

/// Reversed dominance for convex images at orders q >= 1, both for power
/// transforms of sub-unital maps and for the matrix binomial mean.
pub fn sample_prop213(ctx: &mut SampleCtx) -> Result<Sampled> {
    const GS: [&str; 3] = ["powsum:1*t^2", "powsum:1*t^3", "powsum:1*t^2+1*t^3"];
    let g = GS[ctx.trial % GS.len()];
    let q = [1.0, 1.5, 2.0][(ctx.trial / 3) % 3];
    // Kind 3 scales a correlation matrix down, making the Schur map strictly
    // sub-unital; kinds 0-2 are the unital reference maps.
    let kind = (ctx.trial / 9) % 4;
    let map = if kind == 3 {
        let c = random_correlation(ctx)?;
        let s: f64 = ctx.rng.gen_range(0.6..0.95);
        (
            PositiveMap::schur(c.scale(s))?,
            "schur-subunital",
        )
    } else {
        unital_map(ctx, kind)?
    };
    let z = sample_pd(ctx, 30.0)?;
    let a = sample_pd(ctx, 30.0)?;
    let b = sample_pd(ctx, 30.0)?;
    let mut input = TrialInput::new("prop-2.13", ctx.dim, ctx.trial);
    input.set_str("g", g).set_f64("q", q).set_str("map_kind", map.1);
    input.set_map("map", &map.0)?;
    input.set_mat("Z", z).set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

pub fn margin_prop213(input: &TrialInput) -> Result<f64> {
    let g = input.strp("g")?;
    let q = input.f64p("q")?;
    let e = input.map("map")?;
    let z = input.mat("Z")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    // Map side: the q-power transform applied to the convex image dominates
    // the convex image of the transform.
    let big_map = power_map_any(&e, &apply_f(g, z)?, q)?;
    let small_map = apply_f(g, &power_map_any(&e, z, q)?)?;
    let m1 = eigenvalue_dominates(&big_map, &small_map, MAJ_TOL)?.worst_margin;
    // Mean side: the binomial mean of convex images dominates the convex
    // image of the binomial mean.
    let big_mean = beta_q_matrix(&apply_f(g, a)?, &apply_f(g, b)?, q)?;
    let small_mean = apply_f(g, &beta_q_matrix(a, b, q)?)?;
    let m2 = eigenvalue_dominates(&big_mean, &small_mean, MAJ_TOL)?.worst_margin;
    Ok(m1.min(m2))
}
