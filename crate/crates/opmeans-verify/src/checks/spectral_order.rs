//! Checkers for eigenvalue-product bounds on two-matrix means: the
//! `thm-3.1-*`, `cor-3.2`, `prop-3.5`, `cor-3.6`, `prop-3.7`,
//! `conj-1.7-search`, and `rem-3.3-false` properties.

use opmeans_core::hermitian::sorted_diagonal;
use opmeans_core::majorization::{log_majorizes, log_supermajorizes};
use opmeans_core::opmean::{rf_catalog, weighted_geometric, GeomClass};
use rand::Rng;

use super::util::*;
use crate::{Result, SampleCtx, Sampled, TrialInput};

const MAJ_TOL: f64 = 1e-9;

fn catalog_names(keep: impl Fn(GeomClass) -> bool) -> Vec<String> {
    rf_catalog()
        .into_iter()
        .filter(|h| keep(h.geom_class))
        .map(|h| h.name)
        .collect()
}

fn sample_mean_pair(ctx: &mut SampleCtx, id: &str, names: &[String]) -> Result<Sampled> {
    let mean = &names[ctx.trial % names.len()];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new(id, ctx.dim, ctx.trial);
    input.set_str("mean", mean);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

pub fn sample_thm31_i(ctx: &mut SampleCtx) -> Result<Sampled> {
    let names = catalog_names(|c| matches!(c, GeomClass::GeomConvex | GeomClass::Both));
    sample_mean_pair(ctx, "thm-3.1-i", &names)
}

pub fn sample_thm31_ii(ctx: &mut SampleCtx) -> Result<Sampled> {
    let names = catalog_names(|c| matches!(c, GeomClass::GeomConcave | GeomClass::Both));
    sample_mean_pair(ctx, "thm-3.1-ii", &names)
}

pub fn sample_cor32(ctx: &mut SampleCtx) -> Result<Sampled> {
    let names = catalog_names(|c| !matches!(c, GeomClass::Unknown));
    sample_mean_pair(ctx, "cor-3.2", &names)
}

/// Top k-root products of the mean are bounded below by the scalar mean of
/// mixed top/bottom root products of the operands (geometrically convex h).
pub fn margin_thm31_i(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let m = mean_pair(mean, a, b)?;
    let (lm, la, lb) = (
        log_spectrum_desc(&m)?,
        log_spectrum_desc(a)?,
        log_spectrum_desc(b)?,
    );
    let n = la.len();
    let mut worst = f64::INFINITY;
    for k in 1..=n {
        let lhs = root_top(&lm, k);
        let r1 = scalar_mean_name(mean, root_top(&la, k), root_bottom(&lb, k))?;
        let r2 = scalar_mean_name(mean, root_bottom(&la, k), root_top(&lb, k))?;
        worst = fold_min([worst, gap(lhs, r1), gap(lhs, r2)]);
    }
    Ok(worst)
}

/// Bottom k-root products of the mean are bounded above by the scalar mean
/// of mixed root products (geometrically concave h).
pub fn margin_thm31_ii(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let m = mean_pair(mean, a, b)?;
    let (lm, la, lb) = (
        log_spectrum_desc(&m)?,
        log_spectrum_desc(a)?,
        log_spectrum_desc(b)?,
    );
    let n = la.len();
    let mut worst = f64::INFINITY;
    for k in 1..=n {
        let lhs = root_bottom(&lm, k);
        let r1 = scalar_mean_name(mean, root_top(&la, k), root_bottom(&lb, k))?;
        let r2 = scalar_mean_name(mean, root_bottom(&la, k), root_top(&lb, k))?;
        worst = fold_min([worst, gap(r1, lhs), gap(r2, lhs)]);
    }
    Ok(worst)
}

/// Determinant-root comparison, direction set by the geometric class; means
/// in both classes must give equality.
pub fn margin_cor32(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let h = rf(mean)?;
    let m = mean_pair(mean, a, b)?;
    let n = a.dim();
    let lhs = root_top(&log_spectrum_desc(&m)?, n);
    let rhs = scalar_mean_name(
        mean,
        root_top(&log_spectrum_desc(a)?, n),
        root_top(&log_spectrum_desc(b)?, n),
    )?;
    Ok(match h.geom_class {
        GeomClass::GeomConvex => gap(lhs, rhs),
        GeomClass::GeomConcave => gap(rhs, lhs),
        GeomClass::Both => equality_margin(lhs, rhs),
        GeomClass::Unknown => {
            return Err(crate::VerifyError::Eval(format!(
                "mean '{mean}' has no geometric classification"
            )))
        }
    })
}

pub fn sample_prop35(ctx: &mut SampleCtx) -> Result<Sampled> {
    let alpha = [0.25, 0.5, 0.75][ctx.trial % 3];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new("prop-3.5", ctx.dim, ctx.trial);
    input.set_f64("alpha", alpha);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

/// Two-sided chains for the weighted geometric mean: top root products sit
/// between the aligned and anti-aligned weighted products of the operand
/// spectra, and mirrored for bottom root products.
pub fn margin_prop35(input: &TrialInput) -> Result<f64> {
    let alpha = input.f64p("alpha")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let m = weighted_geometric(a, b, alpha)?;
    let (lm, la, lb) = (
        log_spectrum_desc(&m)?,
        log_spectrum_desc(a)?,
        log_spectrum_desc(b)?,
    );
    let n = la.len();
    let mix = |ja: usize, jb: usize| (1.0 - alpha) * la[ja] + alpha * lb[jb];
    let mut worst = f64::INFINITY;
    for k in 1..=n {
        // Top products: anti-aligned pairing below, aligned pairing above.
        let top = root_top(&lm, k);
        let top_lo: f64 = (0..k).map(|j| mix(j, n - 1 - j)).sum::<f64>() / k as f64;
        let top_hi: f64 = (0..k).map(|j| mix(j, j)).sum::<f64>() / k as f64;
        worst = fold_min([worst, gap(top, top_lo.exp()), gap(top_hi.exp(), top)]);
        // Bottom products: aligned pairing below, anti-aligned above.
        let bot = root_bottom(&lm, k);
        let bot_lo: f64 = (n - k..n).map(|j| mix(j, j)).sum::<f64>() / k as f64;
        let bot_hi: f64 = (n - k..n).map(|j| mix(j, n - 1 - j)).sum::<f64>() / k as f64;
        worst = fold_min([worst, gap(bot, bot_lo.exp()), gap(bot_hi.exp(), bot)]);
    }
    Ok(worst)
}

pub fn sample_cor36(ctx: &mut SampleCtx) -> Result<Sampled> {
    let alpha = [0.0, 0.25, 0.5, 0.75, 1.0][ctx.trial % 5];
    let a = sample_pd(ctx, PD_COND)?;
    let b = sample_pd(ctx, PD_COND)?;
    let mut input = TrialInput::new("cor-3.6", ctx.dim, ctx.trial);
    input.set_f64("alpha", alpha);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

/// The weighted geometric mean is log-majorized by the same mean of the
/// sorted spectra.
pub fn margin_cor36(input: &TrialInput) -> Result<f64> {
    let alpha = input.f64p("alpha")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let m = weighted_geometric(a, b, alpha)?;
    let sorted = weighted_geometric(&sorted_diagonal(a, true)?, &sorted_diagonal(b, true)?, alpha)?;
    Ok(log_majorizes(&m, &sorted, MAJ_TOL)?.worst_margin)
}

pub fn sample_prop37(ctx: &mut SampleCtx) -> Result<Sampled> {
    let names: Vec<String> = rf_catalog()
        .into_iter()
        .filter(|h| h.geodesic_measure.is_some())
        .map(|h| h.name)
        .collect();
    sample_mean_pair(ctx, "prop-3.7", &names)
}

/// Measure-backed means are superadditive on bottom root products.
pub fn margin_prop37(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let m = mean_pair(mean, a, b)?;
    let (lm, la, lb) = (
        log_spectrum_desc(&m)?,
        log_spectrum_desc(a)?,
        log_spectrum_desc(b)?,
    );
    let n = la.len();
    let mut worst = f64::INFINITY;
    for k in 1..=n {
        let lhs = root_bottom(&lm, k);
        let rhs = scalar_mean_name(mean, root_bottom(&la, k), root_bottom(&lb, k))?;
        worst = worst.min(gap(lhs, rhs));
    }
    Ok(worst)
}

pub fn sample_conj17(ctx: &mut SampleCtx) -> Result<Sampled> {
    let names = catalog_names(|c| matches!(c, GeomClass::GeomConvex | GeomClass::Both));
    sample_mean_pair(ctx, "conj-1.7-search", &names)
}

/// Conjectured sorting relations: anti-aligned sorted operands give the
/// largest bottom root products, aligned sorted operands the smallest.
pub fn margin_conj17(input: &TrialInput) -> Result<f64> {
    let mean = input.strp("mean")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let m = mean_pair(mean, a, b)?;
    let a_desc = sorted_diagonal(a, true)?;
    let anti = mean_pair(mean, &a_desc, &sorted_diagonal(b, false)?)?;
    let aligned = mean_pair(mean, &a_desc, &sorted_diagonal(b, true)?)?;
    let m1 = log_supermajorizes(&anti, &m, MAJ_TOL)?.worst_margin;
    let m2 = log_supermajorizes(&m, &aligned, MAJ_TOL)?.worst_margin;
    Ok(m1.min(m2))
}

/// Negative control: the top eigenvalue is not superadditive.
pub fn sample_rem33(ctx: &mut SampleCtx) -> Result<Sampled> {
    let ca = ctx.rng.gen_range(2.0..50.0);
    let cb = ctx.rng.gen_range(2.0..50.0);
    let a = sample_pd(ctx, ca)?;
    let b = sample_pd(ctx, cb)?;
    let mut input = TrialInput::new("rem-3.3-false", ctx.dim, ctx.trial);
    input.set_mat("A", a).set_mat("B", b);
    Ok(Sampled::direct(input))
}

pub fn margin_rem33(input: &TrialInput) -> Result<f64> {
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let top = |m: &opmeans_core::HermitianMatrix| -> Result<f64> {
        Ok(*m.eigenvalues()?
            .first()
            .ok_or_else(|| crate::VerifyError::Eval("empty spectrum".into()))?)
    };
    Ok(gap(top(&a.add(b)?)?, top(a)? + top(b)?))
}
