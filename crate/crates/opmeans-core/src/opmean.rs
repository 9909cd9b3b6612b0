//! Two-variable operator means.
//!
//! A mean is driven by its representing function h (non-negative,ncreasing,
//! h(1) = 1) through A σ B = A^{1/2} h(A^{−1/2} B A^{−1/2}) A^{1/2}.
//! Singular operands are handled by continuity from above: both are shifted
//! by εI and the mean of the shifted pair is returned. The catalog carries
//! the classical families (arithmetic, harmonic, geometric, two-power
//! averages, binomial power means, a one-parameter interpolation family
//! containing the logarithmic mean) together with, where one exists, the
//! probability measure ν on [0,1] expressing the mean as ∫ A #_α B dν(α) —
//! a *geodesic mean*. The finite-difference screen at the bottom probes the
//! necessary condition for such a measure to exist: t ↦ h(e^t) must have
//! non-negative forward differences of every order.

use crate::eig::eigh;
use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;
use crate::matfun::{clamp_eps_for, expm, inv_sqrtm, logm, matrix_function, powm, sqrtm};
use crate::quad::{gauss_legendre, DEFAULT_NODES};
use crate::scalar::Interval;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeomClass {
    GeomConvex,
    GeomConcave,
    Both,
    Unknown,
}

/// Probability measure on [0, 1]: point masses plus an optional uniform
/// (Lebesgue) component integrated by Gauss–Legendre quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicMeasure {
    /// (position α ∈ [0,1], weight > 0) pairs.
    pub atoms: Vec<(f64, f64)>,
    /// Mass carried by the uniform density on [0, 1].
    pub uniform_weight: f64,
    /// Node count for the density component.
    pub quad_nodes: usize,
}

impl GeodesicMeasure {
    pub fn from_atoms(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let m = GeodesicMeasure {
            atoms,
            uniform_weight: 0.0,
            quad_nodes: DEFAULT_NODES,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn dirac(alpha: f64) -> Self {
        GeodesicMeasure::from_atoms(vec![(alpha, 1.0)]).expect("unit point mass")
    }

    pub fn uniform() -> Self {
        GeodesicMeasure {
            atoms: Vec::new(),
            uniform_weight: 1.0,
            quad_nodes: DEFAULT_NODES,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.uniform_weight + self.atoms.iter().map(|&(_, w)| w).sum::<f64>()
    }

    pub fn validate(&self) -> Result<()> {
        for &(alpha, w) in &self.atoms {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(CoreError::InvalidParameter(format!(
                    "measure atom position {alpha} outside [0,1]"
                )));
            }
            if !(w > 0.0) {
                return Err(CoreError::InvalidParameter(format!(
                    "measure atom weight {w} must be positive"
                )));
            }
        }
        if self.uniform_weight < 0.0 || self.quad_nodes == 0 {
            return Err(CoreError::InvalidParameter(
                "invalid density component".into(),
            ));
        }
        let mass = self.total_mass();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidParameter(format!(
                "measure mass {mass} differs from 1"
            )));
        }
        Ok(())
    }

    /// Pushforward under α ↦ 1 − α (the measure of the transposed mean).
    fn reversed(&self) -> GeodesicMeasure {
        GeodesicMeasure {
            atoms: self.atoms.iter().map(|&(a, w)| (1.0 - a, w)).collect(),
            uniform_weight: self.uniform_weight,
            quad_nodes: self.quad_nodes,
        }
    }

    /// ∫ x^α dν(α), the representing function the measure induces.
    pub fn induced_h(&self, x: f64) -> f64 {
        let x = x.max(1e-300);
        let mut acc: f64 = self.atoms.iter().map(|&(a, w)| w * x.powf(a)).sum();
        if self.uniform_weight > 0.0 {
            // ∫_0^1 x^α dα = (x − 1)/log x, but integrate numerically to
            // honor the declared node count.
            let rule = gauss_legendre(self.quad_nodes).mapped(0.0, 1.0);
            acc += self.uniform_weight * rule.integrate(|a| x.powf(a));
        }
        acc
    }
}

/// Representing function of an operator mean: h ≥ 0 and non-decreasing on
/// [0, ∞) with h(1) = 1 (both screened at construction).
#[derive(Clone)]
pub struct RepresentingFunction {
    pub name: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub geom_class: GeomClass,
    pub geodesic_measure: Option<GeodesicMeasure>,
}

impl fmt::Debug for RepresentingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RepresentingFunction")
            .field("name", &self.name)
            .field("geom_class", &self.geom_class)
            .field("geodesic_measure", &self.geodesic_measure)
            .finish()
    }
}

impl RepresentingFunction {
    pub fn new(
        name: impl Into<String>,
        geom_class: GeomClass,
        geodesic_measure: Option<GeodesicMeasure>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let rf = RepresentingFunction {
            name: name.into(),
            eval: Arc::new(eval),
            geom_class,
            geodesic_measure,
        };
        let at_one = rf.eval(1.0);
        if (at_one - 1.0).abs() > 1e-12 {
            return Err(CoreError::InvalidParameter(format!(
                "representing function '{}' has h(1) = {at_one}, must be 1",
                rf.name
            )));
        }
        // Positivity / monotonicity screen on a log grid. This does not
        // certify operator monotonicity — catalog entries carry that
        // guarantee analytically; foreign functions get this sieve only.
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=60 {
            let x = 10f64.powf(-3.0 + 0.1 * i as f64);
            let y = rf.eval(x);
            if !(y >= 0.0) || !y.is_finite() {
                return Err(CoreError::InvalidParameter(format!(
                    "representing function '{}' is not finite non-negative at {x}",
                    rf.name
                )));
            }
            if y < prev - 1e-10 * (1.0 + y.abs()) {
                return Err(CoreError::InvalidParameter(format!(
                    "representing function '{}' decreases near {x}",
                    rf.name
                )));
            }
            prev = y;
        }
        if let Some(m) = &rf.geodesic_measure {
            m.validate()?;
        }
        Ok(rf)
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }
}

// ---------------------------------------------------------------------------
// Scalar evaluators for the parameterized families
// ---------------------------------------------------------------------------

fn b_p_eval(p: f64, x: f64) -> f64 {
    if p == 0.0 {
        x.sqrt()
    } else {
        ((x.powf(p) + 1.0) / 2.0).powf(1.0 / p)
    }
}

/// The interpolation family f_α(x) = ((α−1)/α)·(x^α − 1)/(x^{α−1} − 1),
/// with the removable singularities at α = 0, α = 1 and x = 1 filled in by
/// their limits (f_1 is the logarithmic mean (x−1)/log x).
fn f_alpha_eval(alpha: f64, x: f64) -> f64 {
    if x < 1e-100 {
        // Continuity at 0: positive limit only when α > 1.
        return if alpha > 1.0 { (alpha - 1.0) / alpha } else { 0.0 };
    }
    let s = x.ln();
    if s.abs() < 1e-4 {
        // Series around x = 1 where the direct formula is 0/0.
        return 1.0 + s / 2.0 + (alpha + 1.0) * s * s / 12.0;
    }
    if (alpha - 1.0).abs() < 1e-9 {
        return (x - 1.0) / s;
    }
    if alpha.abs() < 1e-9 {
        return x * s / (x - 1.0);
    }
    ((alpha - 1.0) / alpha) * (x.powf(alpha) - 1.0) / (x.powf(alpha - 1.0) - 1.0)
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Detect 1/p = m ∈ ℕ and return the binomial measure Σ C(m,k)/2^m δ_{k/m}.
fn b_p_measure(p: f64) -> Option<GeodesicMeasure> {
    if p == 0.0 {
        return Some(GeodesicMeasure::dirac(0.5));
    }
    if p < 0.0 {
        return None;
    }
    let m = (1.0 / p).round();
    if m < 1.0 || m > 64.0 || (p - 1.0 / m).abs() > 1e-12 {
        return None;
    }
    let m = m as usize;
    let scale = 0.5f64.powi(m as i32);
    let atoms = (0..=m)
        .map(|k| (k as f64 / m as f64, binomial(m, k) * scale))
        .collect();
    Some(GeodesicMeasure::from_atoms(atoms).expect("binomial weights sum to 1"))
}

/// Measures for f_α: uniform at α = 1; α = m/(m−1) gives equal atoms at
/// {k/(m−1)}; α = m/(m+1) gives equal atoms at {k/(m+1)}, k = 1..m.
fn f_alpha_measure(alpha: f64) -> Option<GeodesicMeasure> {
    if (alpha - 1.0).abs() < 1e-12 {
        return Some(GeodesicMeasure::uniform());
    }
    if alpha > 1.0 {
        let m = (alpha / (alpha - 1.0)).round();
        if (2.0..=64.0).contains(&m) && (alpha - m / (m - 1.0)).abs() < 1e-12 {
            let m = m as usize;
            let atoms = (0..m)
                .map(|k| (k as f64 / (m - 1) as f64, 1.0 / m as f64))
                .collect();
            return GeodesicMeasure::from_atoms(atoms).ok();
        }
    }
    if alpha > 0.0 && alpha < 1.0 {
        let m = (alpha / (1.0 - alpha)).round();
        if (1.0..=64.0).contains(&m) && (alpha - m / (m + 1.0)).abs() < 1e-12 {
            let m = m as usize;
            let atoms = (1..=m)
                .map(|k| (k as f64 / (m + 1) as f64, 1.0 / m as f64))
                .collect();
            return GeodesicMeasure::from_atoms(atoms).ok();
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

fn rf_arith() -> RepresentingFunction {
    RepresentingFunction::new(
        "arith",
        GeomClass::GeomConvex,
        Some(GeodesicMeasure::from_atoms(vec![(0.0, 0.5), (1.0, 0.5)]).expect("valid")),
        |x| (1.0 + x) / 2.0,
    )
    .expect("valid")
}

fn rf_harm() -> RepresentingFunction {
    RepresentingFunction::new("harm", GeomClass::GeomConcave, None, |x| {
        2.0 * x / (1.0 + x)
    })
    .expect("valid")
}

fn rf_geo_alpha(alpha: f64) -> Result<RepresentingFunction> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CoreError::InvalidParameter(format!(
            "geodesic exponent must lie in [0,1], got {alpha}"
        )));
    }
    let name = if alpha == 0.5 {
        "geo".to_string()
    } else {
        format!("geo:alpha={alpha}")
    };
    RepresentingFunction::new(
        name,
        GeomClass::Both,
        Some(GeodesicMeasure::dirac(alpha)),
        move |x| x.powf(alpha),
    )
}

fn rf_halpha(alpha: f64) -> Result<RepresentingFunction> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CoreError::InvalidParameter(format!(
            "two-power exponent must lie in [0,1], got {alpha}"
        )));
    }
    RepresentingFunction::new(
        format!("halpha:a={alpha}"),
        GeomClass::GeomConvex,
        Some(
            GeodesicMeasure::from_atoms(if alpha == 0.5 {
                vec![(0.5, 1.0)]
            } else {
                vec![(alpha, 0.5), (1.0 - alpha, 0.5)]
            })
            .expect("valid"),
        ),
        move |x| (x.powf(alpha) + x.powf(1.0 - alpha)) / 2.0,
    )
}

fn rf_bp(p: f64) -> Result<RepresentingFunction> {
    if !(-1.0..=1.0).contains(&p) {
        return Err(CoreError::InvalidParameter(format!(
            "binomial power parameter must lie in [-1,1], got {p}"
        )));
    }
    let class = if p == 0.0 {
        GeomClass::Both
    } else if p > 0.0 {
        GeomClass::GeomConvex
    } else {
        GeomClass::GeomConcave
    };
    RepresentingFunction::new(
        format!("bp:p={p}"),
        class,
        b_p_measure(p),
        move |x| b_p_eval(p, x),
    )
}

fn rf_falpha(alpha: f64) -> Result<RepresentingFunction> {
    if !(-1.0..=2.0).contains(&alpha) {
        return Err(CoreError::InvalidParameter(format!(
            "interpolation parameter must lie in [-1,2], got {alpha}"
        )));
    }
    let class = if (alpha - 0.5).abs() < 1e-12 {
        GeomClass::Both
    } else if alpha >= 0.5 {
        GeomClass::GeomConvex
    } else {
        GeomClass::GeomConcave
    };
    RepresentingFunction::new(
        format!("falpha:a={alpha}"),
        class,
        f_alpha_measure(alpha),
        move |x| f_alpha_eval(alpha, x),
    )
}

/// Built-in representing functions. Every entry's `geom_class` is backed by
/// the classification of its family, and `geodesic_measure` is attached
/// exactly where the family admits one.
pub fn rf_catalog() -> Vec<RepresentingFunction> {
    let mut out = vec![rf_arith(), rf_harm()];
    for alpha in [0.25, 0.5, 0.75] {
        out.push(rf_geo_alpha(alpha).expect("valid"));
    }
    out.push(rf_halpha(0.25).expect("valid"));
    for p in [1.0, 0.5, 1.0 / 3.0, 2.0 / 3.0, -0.5, -1.0] {
        out.push(rf_bp(p).expect("valid"));
    }
    for a in [
        2.0,
        1.5,
        1.0,
        2.0 / 3.0,
        0.5,
        0.25,
        0.0,
        -0.5,
        -1.0,
    ] {
        out.push(rf_falpha(a).expect("valid"));
    }
    out
}

/// Parse a mean-family specification: "arith", "harm", "geo",
/// "geo:alpha=0.25", "halpha:a=0.25", "bp:p=0.5", "falpha:a=1".
pub fn rf_by_name(spec: &str) -> Result<RepresentingFunction> {
    match spec {
        "arith" => return Ok(rf_arith()),
        "harm" => return Ok(rf_harm()),
        "geo" => return rf_geo_alpha(0.5),
        _ => {}
    }
    let bad = |msg: String| CoreError::InvalidParameter(msg);
    let (family, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad(format!("unknown mean '{spec}'")))?;
    let (key, value) = rest
        .split_once('=')
        .ok_or_else(|| bad(format!("mean parameter must be key=value in '{spec}'")))?;
    let value: f64 = value
        .parse()
        .map_err(|_| bad(format!("bad numeric value in '{spec}'")))?;
    match (family, key) {
        ("geo", "alpha") => rf_geo_alpha(value),
        ("halpha", "a") => rf_halpha(value),
        ("bp", "p") => rf_bp(value),
        ("falpha", "a") => rf_falpha(value),
        _ => Err(bad(format!("unknown mean family '{family}:{key}'"))),
    }
}

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

fn flip_class(c: GeomClass) -> GeomClass {
    match c {
        GeomClass::GeomConvex => GeomClass::GeomConcave,
        GeomClass::GeomConcave => GeomClass::GeomConvex,
        other => other,
    }
}

/// Transpose t·h(1/t) — the mean with the operands swapped.
pub fn transpose_rf(h: &RepresentingFunction) -> RepresentingFunction {
    let inner = h.clone();
    RepresentingFunction::new(
        format!("transpose({})", h.name),
        h.geom_class,
        h.geodesic_measure.as_ref().map(GeodesicMeasure::reversed),
        move |t| {
            let t = t.max(1e-300);
            t * inner.eval(1.0 / t)
        },
    )
    .expect("transpose preserves the representing-function axioms")
}

/// Adjoint 1/h(1/t) — the mean conjugated by the inverse map.
pub fn adjoint_rf(h: &RepresentingFunction) -> RepresentingFunction {
    let inner = h.clone();
    RepresentingFunction::new(
        format!("adjoint({})", h.name),
        flip_class(h.geom_class),
        None,
        move |t| {
            let t = t.max(1e-300);
            1.0 / inner.eval(1.0 / t)
        },
    )
    .expect("adjoint preserves the representing-function axioms")
}

/// Dual t/h(t) = adjoint of the transpose.
pub fn dual_rf(h: &RepresentingFunction) -> RepresentingFunction {
    let inner = h.clone();
    RepresentingFunction::new(
        format!("dual({})", h.name),
        flip_class(h.geom_class),
        None,
        move |t| {
            let t = t.max(1e-300);
            t / inner.eval(t)
        },
    )
    .expect("dual preserves the representing-function axioms")
}

/// (transpose, adjoint, dual) of a representing function.
pub fn rf_transforms(
    h: &RepresentingFunction,
) -> (RepresentingFunction, RepresentingFunction, RepresentingFunction) {
    (transpose_rf(h), adjoint_rf(h), dual_rf(h))
}

// ---------------------------------------------------------------------------
// Matrix means
// ---------------------------------------------------------------------------

/// Regularization shift used when an operand is singular.
pub fn default_reg_eps(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    1e-10 * (1.0 + a.frobenius_norm() + b.frobenius_norm())
}

/// A σ B = A_ε^{1/2} h(A_ε^{−1/2} B_ε A_ε^{−1/2}) A_ε^{1/2} with
/// A_ε = A + εI, B_ε = B + εI. Pass eps = 0 only for invertible A.
pub fn kubo_ando(
    h: &RepresentingFunction,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    eps: f64,
) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if eps < 0.0 {
        return Err(CoreError::InvalidParameter(format!(
            "regularization must be >= 0, got {eps}"
        )));
    }
    let (a_eff, b_eff) = if eps > 0.0 {
        (a.shift(eps), b.shift(eps))
    } else {
        let lam_min = a.min_eigenvalue()?;
        if lam_min <= clamp_eps_for(a) {
            return Err(CoreError::SingularInput { lambda_min: lam_min });
        }
        (a.clone(), b.clone())
    };
    let sa = sqrtm(&a_eff)?;
    let isa = inv_sqrtm(&a_eff)?;
    let inner = HermitianMatrix::from_cmatrix(
        &isa.as_cmatrix()
            .mul(b_eff.as_cmatrix())?
            .mul(isa.as_cmatrix())?,
    )?;
    let transformed = matrix_function(&inner, &Interval::NONNEGATIVE, |x| h.eval(x))?;
    HermitianMatrix::from_cmatrix(
        &sa.as_cmatrix()
            .mul(transformed.as_cmatrix())?
            .mul(sa.as_cmatrix())?,
    )
}

/// Like [`kubo_ando`] but with the regularization chosen automatically:
/// ε = 0 for invertible operands, the default shift otherwise. Returns the
/// shift actually used.
pub fn kubo_ando_default(
    h: &RepresentingFunction,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<(HermitianMatrix, f64)> {
    let invertible = a.min_eigenvalue()? > clamp_eps_for(a)
        && b.min_eigenvalue()? > clamp_eps_for(b);
    let eps = if invertible { 0.0 } else { default_reg_eps(a, b) };
    Ok((kubo_ando(h, a, b, eps)?, eps))
}

/// Scalar Kubo–Ando mean a σ b = a·h(b/a) for a > 0, b ≥ 0.
pub fn scalar_mean(h: &RepresentingFunction, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !(b >= 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "scalar mean needs a > 0 and b >= 0, got ({a}, {b})"
        )));
    }
    Ok(a * h.eval(b / a))
}

fn require_invertible(m: &HermitianMatrix) -> Result<()> {
    let lam_min = m.min_eigenvalue()?;
    if lam_min <= clamp_eps_for(m) {
        return Err(CoreError::SingularInput { lambda_min: lam_min });
    }
    Ok(())
}

/// Weighted geometric mean A #_α B = A^{1/2}(A^{−1/2}BA^{−1/2})^α A^{1/2}.
pub fn weighted_geometric(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    alpha: f64,
) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CoreError::InvalidParameter(format!(
            "geodesic parameter must lie in [0,1], got {alpha}"
        )));
    }
    require_invertible(a)?;
    require_invertible(b)?;
    if alpha == 0.0 {
        return Ok(a.clone());
    }
    if alpha == 1.0 {
        return Ok(b.clone());
    }
    let sa = sqrtm(a)?;
    let isa = inv_sqrtm(a)?;
    let inner = HermitianMatrix::from_cmatrix(
        &isa.as_cmatrix().mul(b.as_cmatrix())?.mul(isa.as_cmatrix())?,
    )?;
    let powered = powm(&inner, alpha)?;
    HermitianMatrix::from_cmatrix(
        &sa.as_cmatrix().mul(powered.as_cmatrix())?.mul(sa.as_cmatrix())?,
    )
}

/// Power mean ((A^p + B^p)/2)^{1/p} for p ∈ (0, 1]; the p = 0 limit is
/// exp((log A + log B)/2) and requires invertible operands.
pub fn power_mean(a: &HermitianMatrix, b: &HermitianMatrix, p: f64) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(CoreError::InvalidParameter(format!(
            "power mean parameter must lie in [0,1], got {p}"
        )));
    }
    if p == 0.0 {
        require_invertible(a)?;
        require_invertible(b)?;
        return expm(&logm(a)?.add(&logm(b)?)?.scale(0.5));
    }
    let avg = powm(a, p)?.add(&powm(b, p)?)?.scale(0.5);
    powm(&avg, 1.0 / p)
}

/// Geodesic mean ∫ A #_α B dν(α). The eigenbasis of A^{−1/2}BA^{−1/2} is
/// computed once and reused across all α; accumulation order (atoms in
/// declared order, then quadrature nodes ascending) is fixed so results are
/// bit-stable.
pub fn geodesic_mean(
    nu: &GeodesicMeasure,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
) -> Result<HermitianMatrix> {
    if a.dim() != b.dim() {
        return Err(CoreError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    nu.validate()?;
    require_invertible(a)?;
    require_invertible(b)?;
    let n = a.dim();
    let sa = sqrtm(a)?;
    let isa = inv_sqrtm(a)?;
    let inner = HermitianMatrix::from_cmatrix(
        &isa.as_cmatrix().mul(b.as_cmatrix())?.mul(isa.as_cmatrix())?,
    )?;
    let d = eigh(&inner)?;
    let floor = clamp_eps_for(&inner);
    let lambdas: Vec<f64> = d.values.iter().map(|&x| x.max(floor)).collect();
    // Σ over the measure of diag(λ^α) in the fixed eigenbasis.
    let mut weights_on_spectrum = vec![0.0f64; n];
    let add = |alpha: f64, w: f64, acc: &mut Vec<f64>| {
        for (slot, lam) in acc.iter_mut().zip(&lambdas) {
            *slot += w * lam.powf(alpha);
        }
    };
    for &(alpha, w) in &nu.atoms {
        add(alpha, w, &mut weights_on_spectrum);
    }
    if nu.uniform_weight > 0.0 {
        let rule = gauss_legendre(nu.quad_nodes).mapped(0.0, 1.0);
        for (&node, &w) in rule.nodes.iter().zip(&rule.weights) {
            add(node, nu.uniform_weight * w, &mut weights_on_spectrum);
        }
    }
    let mut scaled = d.vectors.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= weights_on_spectrum[j];
        }
    }
    let mixed = HermitianMatrix::from_cmatrix(&scaled.mul(&d.vectors.adjoint())?)?;
    HermitianMatrix::from_cmatrix(
        &sa.as_cmatrix().mul(mixed.as_cmatrix())?.mul(sa.as_cmatrix())?,
    )
}

// ---------------------------------------------------------------------------
// Geometric convexity / concavity certification
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub struct GeomClassReport {
    pub convex_ok: bool,
    pub concave_ok: bool,
    /// Worst normalized slack of h(√(xy)) ≤ √(h(x)h(y)).
    pub worst_convex: f64,
    /// Worst normalized slack of h(√(xy)) ≥ √(h(x)h(y)).
    pub worst_concave: f64,
}

impl GeomClassReport {
    pub fn classify(&self) -> GeomClass {
        match (self.convex_ok, self.concave_ok) {
            (true, true) => GeomClass::Both,
            (true, false) => GeomClass::GeomConvex,
            (false, true) => GeomClass::GeomConcave,
            (false, false) => GeomClass::Unknown,
        }
    }
}

/// Grid check of geometric convexity/concavity of h over [1e-3, 1e3].
pub fn certify_geom_class(
    h: &RepresentingFunction,
    grid_size: usize,
    tol: f64,
) -> Result<GeomClassReport> {
    if grid_size < 16 {
        return Err(CoreError::InvalidParameter(format!(
            "grid_size must be at least 16, got {grid_size}"
        )));
    }
    let grid: Vec<f64> = (0..grid_size)
        .map(|i| {
            let frac = (i + 1) as f64 / (grid_size + 1) as f64;
            10f64.powf(-3.0 + 6.0 * frac)
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| h.eval(x)).collect();
    let (mut worst_convex, mut worst_concave) = (f64::INFINITY, f64::INFINITY);
    for i in 0..grid.len() {
        for j in i..grid.len() {
            let mid = h.eval((grid[i] * grid[j]).sqrt());
            let geo = (values[i] * values[j]).max(0.0).sqrt();
            let norm = 1.0 + values[i].abs() + values[j].abs();
            worst_convex = worst_convex.min((geo - mid) / norm);
            worst_concave = worst_concave.min((mid - geo) / norm);
        }
    }
    Ok(GeomClassReport {
        convex_ok: worst_convex >= -tol,
        concave_ok: worst_concave >= -tol,
        worst_convex,
        worst_concave,
    })
}

// ---------------------------------------------------------------------------
// Absolute-monotonicity screen
// ---------------------------------------------------------------------------

/// Grid for the forward-difference screen of g(t) = h(e^t). The default is
/// a gentle sieve; [`FdScreenConfig::deep`] pushes order and range far
/// enough to separate the representable binomial means from the
/// non-representable ones while staying within f64 headroom.
#[derive(Clone, Copy, Debug)]
pub struct FdScreenConfig {
    pub max_order: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

impl Default for FdScreenConfig {
    fn default() -> Self {
        FdScreenConfig {
            max_order: 8,
            t_min: -3.0,
            t_max: 3.0,
            step: 0.25,
        }
    }
}

impl FdScreenConfig {
    /// Orders up to 18 on [−8, 3] with step 0.5. Order 18 is the practical
    /// f64 ceiling: beyond it, cancellation noise drowns genuine violations.
    pub fn deep() -> Self {
        FdScreenConfig {
            max_order: 18,
            t_min: -8.0,
            t_max: 3.0,
            step: 0.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AbsMonotonicityReport {
    /// Minimum divided difference per order (index k−1 holds order k).
    pub per_order_worst: Vec<f64>,
    /// Threshold used: 1e-6 · max |g| on the grid.
    pub tol: f64,
    pub passes: bool,
    pub worst_order: usize,
    pub worst_t: f64,
    pub worst_value: f64,
}

/// Necessary-condition screen for h(x) = ∫ x^α dν(α): every forward
/// divided difference of g(t) = h(e^t) must be non-negative. Each level is
/// divided by the step, so order-k values sit on the scale of g^(k) rather
/// than shrinking geometrically — a violation of a few percent stays a few
/// percent no matter how deep the screen goes. A failure rules the
/// representation out; passing proves nothing (finite orders, finite grid).
pub fn check_absolute_monotonicity(
    h: &RepresentingFunction,
    cfg: &FdScreenConfig,
) -> Result<AbsMonotonicityReport> {
    if cfg.max_order == 0 || cfg.max_order > 18 {
        return Err(CoreError::InvalidParameter(format!(
            "screen order must lie in 1..=18, got {}",
            cfg.max_order
        )));
    }
    if !(cfg.step > 0.0) || !(cfg.t_max > cfg.t_min) {
        return Err(CoreError::InvalidParameter(
            "screen grid is empty or inverted".into(),
        ));
    }
    let count = ((cfg.t_max - cfg.t_min) / cfg.step + 1e-9).floor() as usize + 1;
    if count <= cfg.max_order {
        return Err(CoreError::InvalidParameter(format!(
            "grid has {count} points, too few for order {}",
            cfg.max_order
        )));
    }
    let mut diffs: Vec<f64> = (0..count)
        .map(|i| h.eval((cfg.t_min + i as f64 * cfg.step).exp()))
        .collect();
    let tol = 1e-6 * diffs.iter().fold(0.0f64, |m, &g| m.max(g.abs()));
    let mut per_order_worst = Vec::with_capacity(cfg.max_order);
    let (mut worst_value, mut worst_order, mut worst_t) = (f64::INFINITY, 1, cfg.t_min);
    for order in 1..=cfg.max_order {
        for i in 0..count - order {
            diffs[i] = (diffs[i + 1] - diffs[i]) / cfg.step;
        }
        diffs.truncate(count - order);
        let mut order_min = f64::INFINITY;
        for (i, &d) in diffs.iter().enumerate() {
            if d < order_min {
                order_min = d;
            }
            if d < worst_value {
                worst_value = d;
                worst_order = order;
                worst_t = cfg.t_min + i as f64 * cfg.step;
            }
        }
        per_order_worst.push(order_min);
    }
    let passes = per_order_worst.iter().all(|&m| m >= -tol);
    Ok(AbsMonotonicityReport {
        per_order_worst,
        tol,
        passes,
        worst_order,
        worst_t,
        worst_value,
    })
}
