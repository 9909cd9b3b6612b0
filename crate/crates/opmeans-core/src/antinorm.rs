//! Symmetric anti-norms: superadditive, unitarily invariant, positively
//! homogeneous functionals on positive semidefinite matrices. All catalog
//! members are spectral — evaluated on the eigenvalue vector — alongside the
//! ordinary symmetric norms they mirror, the dual anti-norm program
//! ‖A‖' = inf{Tr AB : ‖B‖ = 1}, and the two variational expressions for the
//! Ky Fan anti-norms (rank-k projection minimum and the k·λ_min(A) − Tr B
//! decomposition maximum).

use crate::cmatrix::CMatrix;
use crate::eig::eigh;
use crate::error::{CoreError, Result};
use crate::hermitian::HermitianMatrix;
use crate::sample::haar_unitary;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Symmetric norms used for comparison and as the base of derived
/// anti-norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum NormSpec {
    /// Sum of the k largest eigenvalues.
    KyFan { k: usize },
    /// (Σ λ^p)^{1/p}, p ≥ 1.
    Schatten { p: f64 },
    /// Largest eigenvalue.
    Operator,
    /// Sum of all eigenvalues.
    Trace,
}

/// Optimizer knobs for numerically evaluated dual anti-norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualOptConfig {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for DualOptConfig {
    fn default() -> Self {
        DualOptConfig {
            restarts: 8,
            steps: 5000,
            seed: 0,
        }
    }
}

/// Anti-norm selector. `evaluate_antinorm` gives the value on a PSD matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum AntiNormSpec {
    /// Sum of the k smallest eigenvalues (the trace when k = n).
    KyFanAnti { k: usize },
    /// (Σ λ^p)^{1/p} with p ∈ (0, 1] — superadditive in this range.
    Schatten { p: f64 },
    /// (Σ λ^{−p})^{−1/p}; exactly 0 on singular input.
    NegSchatten { p: f64 },
    /// (Σ over the k smallest of λ^{−p})^{−1/p}; 0 on singular input.
    SchattenKyFan { p: f64, k: usize },
    /// Geometric mean of the k smallest eigenvalues.
    Delta { k: usize },
    /// det^{1/n} — the n-th Delta.
    Minkowski,
    /// ‖A^{−p}‖^{−1/p} for a symmetric norm ‖·‖; 0 on singular input.
    Derived { norm: NormSpec, p: f64 },
    /// Dual anti-norm inf{Tr AB : ‖B‖_base = 1}.
    DualOf {
        base: Box<AntiNormSpec>,
        opt: DualOptConfig,
    },
}

impl NormSpec {
    pub fn schatten(p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "Schatten norm exponent must be >= 1, got {p}"
            )));
        }
        Ok(NormSpec::Schatten { p })
    }

    pub fn kyfan(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(CoreError::InvalidParameter(
                "Ky Fan index must be >= 1".into(),
            ));
        }
        Ok(NormSpec::KyFan { k })
    }
}

impl AntiNormSpec {
    pub fn kyfan_anti(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(CoreError::InvalidParameter(
                "Ky Fan index must be >= 1".into(),
            ));
        }
        Ok(AntiNormSpec::KyFanAnti { k })
    }

    pub fn schatten(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(CoreError::InvalidParameter(format!(
                "Schatten anti-norm exponent must lie in (0,1], got {p}"
            )));
        }
        Ok(AntiNormSpec::Schatten { p })
    }

    pub fn neg_schatten(p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "negative Schatten exponent must be positive, got {p}"
            )));
        }
        Ok(AntiNormSpec::NegSchatten { p })
    }

    pub fn schatten_kyfan(p: f64, k: usize) -> Result<Self> {
        if !(p > 0.0) || k == 0 {
            return Err(CoreError::InvalidParameter(format!(
                "need p > 0 and k >= 1, got p={p}, k={k}"
            )));
        }
        Ok(AntiNormSpec::SchattenKyFan { p, k })
    }

    pub fn delta(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(CoreError::InvalidParameter(
                "Delta index must be >= 1".into(),
            ));
        }
        Ok(AntiNormSpec::Delta { k })
    }

    pub fn derived(norm: NormSpec, p: f64) -> Result<Self> {
        if !(p > 0.0) {
            return Err(CoreError::InvalidParameter(format!(
                "derived anti-norm power must be positive, got {p}"
            )));
        }
        Ok(AntiNormSpec::Derived { norm, p })
    }

    pub fn dual_of(base: AntiNormSpec) -> Self {
        AntiNormSpec::DualOf {
            base: Box::new(base),
            opt: DualOptConfig::default(),
        }
    }

    /// Largest Ky Fan style index the spec needs, for validation against n.
    fn max_index(&self) -> Option<usize> {
        match self {
            AntiNormSpec::KyFanAnti { k }
            | AntiNormSpec::SchattenKyFan { k, .. }
            | AntiNormSpec::Delta { k } => Some(*k),
            AntiNormSpec::Derived {
                norm: NormSpec::KyFan { k },
                ..
            } => Some(*k),
            AntiNormSpec::DualOf { base, .. } => base.max_index(),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Display / parsing of spec strings
// ---------------------------------------------------------------------------

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::KyFan { k } => write!(f, "norm:kyfan:k={k}"),
            NormSpec::Schatten { p } => write!(f, "norm:schatten:p={p}"),
            NormSpec::Operator => write!(f, "norm:operator"),
            NormSpec::Trace => write!(f, "norm:trace"),
        }
    }
}

impl fmt::Display for AntiNormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AntiNormSpec::KyFanAnti { k } => write!(f, "anorm:kyfan:k={k}"),
            AntiNormSpec::Schatten { p } => write!(f, "anorm:schatten:p={p}"),
            AntiNormSpec::NegSchatten { p } => write!(f, "anorm:negschatten:p={p}"),
            AntiNormSpec::SchattenKyFan { p, k } => {
                write!(f, "anorm:negschatten:p={p},k={k}")
            }
            AntiNormSpec::Delta { k } => write!(f, "anorm:delta:k={k}"),
            AntiNormSpec::Minkowski => write!(f, "anorm:minkowski"),
            AntiNormSpec::Derived { norm, p } => {
                let body = norm.to_string();
                let body = body.strip_prefix("norm:").unwrap_or(&body);
                write!(f, "anorm:derived:norm={body},p={p}")
            }
            AntiNormSpec::DualOf { base, .. } => {
                let body = base.to_string();
                let body = body.strip_prefix("anorm:").unwrap_or(&body);
                write!(f, "anorm:dual:of={body}")
            }
        }
    }
}

fn parse_kv(text: &str, key: &str) -> Result<f64> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| CoreError::InvalidParameter(format!("expected {key}=value in '{text}'")))?;
    if k != key {
        return Err(CoreError::InvalidParameter(format!(
            "expected parameter '{key}', got '{k}'"
        )));
    }
    v.parse()
        .map_err(|_| CoreError::InvalidParameter(format!("bad number in '{text}'")))
}

fn parse_norm_body(body: &str) -> Result<NormSpec> {
    match body {
        "operator" => return Ok(NormSpec::Operator),
        "trace" => return Ok(NormSpec::Trace),
        _ => {}
    }
    let (family, rest) = body.split_once(':').ok_or_else(|| {
        CoreError::InvalidParameter(format!("unknown norm '{body}'"))
    })?;
    match family {
        "kyfan" => NormSpec::kyfan(parse_kv(rest, "k")? as usize),
        "schatten" => NormSpec::schatten(parse_kv(rest, "p")?),
        _ => Err(CoreError::InvalidParameter(format!(
            "unknown norm family '{family}'"
        ))),
    }
}

fn parse_antinorm_body(body: &str) -> Result<AntiNormSpec> {
    if body == "minkowski" {
        return Ok(AntiNormSpec::Minkowski);
    }
    if let Some(inner) = body.strip_prefix("dual:of=") {
        return Ok(AntiNormSpec::dual_of(parse_antinorm_body(inner)?));
    }
    if let Some(rest) = body.strip_prefix("derived:norm=") {
        let (norm_body, p_part) = rest.rsplit_once(",p=").ok_or_else(|| {
            CoreError::InvalidParameter(format!("derived spec needs ',p=' in '{body}'"))
        })?;
        let p: f64 = p_part.parse().map_err(|_| {
            CoreError::InvalidParameter(format!("bad power in '{body}'"))
        })?;
        return AntiNormSpec::derived(parse_norm_body(norm_body)?, p);
    }
    let (family, rest) = body.split_once(':').ok_or_else(|| {
        CoreError::InvalidParameter(format!("unknown anti-norm '{body}'"))
    })?;
    match family {
        "kyfan" => AntiNormSpec::kyfan_anti(parse_kv(rest, "k")? as usize),
        "schatten" => AntiNormSpec::schatten(parse_kv(rest, "p")?),
        "delta" => AntiNormSpec::delta(parse_kv(rest, "k")? as usize),
        "negschatten" => match rest.split_once(',') {
            None => AntiNormSpec::neg_schatten(parse_kv(rest, "p")?),
            Some((p_part, k_part)) => AntiNormSpec::schatten_kyfan(
                parse_kv(p_part, "p")?,
                parse_kv(k_part, "k")? as usize,
            ),
        },
        _ => Err(CoreError::InvalidParameter(format!(
            "unknown anti-norm family '{family}'"
        ))),
    }
}

impl FromStr for NormSpec {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix("norm:")
            .ok_or_else(|| CoreError::InvalidParameter(format!("norm spec must start with 'norm:', got '{s}'")))?;
        parse_norm_body(body)
    }
}

impl FromStr for AntiNormSpec {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("anorm:").ok_or_else(|| {
            CoreError::InvalidParameter(format!("anti-norm spec must start with 'anorm:', got '{s}'"))
        })?;
        parse_antinorm_body(body)
    }
}

// ---------------------------------------------------------------------------
// Vector gauges (all sort internally; zero convention: exactly 0 whenever a
// negative power would be needed of a non-positive eigenvalue)
// ---------------------------------------------------------------------------

fn sorted_desc(x: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = x.iter().map(|&t| t.max(0.0)).collect();
    v.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    v
}

fn vec_kyfan_anti(x_desc: &[f64], k: usize) -> f64 {
    x_desc[x_desc.len() - k..].iter().sum()
}

fn vec_schatten(x_desc: &[f64], p: f64) -> f64 {
    x_desc.iter().map(|&t| t.powf(p)).sum::<f64>().powf(1.0 / p)
}

fn vec_schatten_kyfan(x_desc: &[f64], p: f64, k: usize) -> f64 {
    let tail = &x_desc[x_desc.len() - k..];
    if tail.iter().any(|&t| t <= 0.0) {
        return 0.0;
    }
    tail.iter()
        .map(|&t| t.powf(-p))
        .sum::<f64>()
        .powf(-1.0 / p)
}

fn vec_delta(x_desc: &[f64], k: usize) -> f64 {
    let tail = &x_desc[x_desc.len() - k..];
    // Geometric mean via logs, with exact zeros short-circuited.
    if tail.iter().any(|&t| t <= 0.0) {
        return 0.0;
    }
    (tail.iter().map(|&t| t.ln()).sum::<f64>() / k as f64).exp()
}

fn vec_norm(spec: &NormSpec, x_desc: &[f64]) -> f64 {
    match spec {
        NormSpec::KyFan { k } => x_desc[..*k].iter().sum(),
        NormSpec::Schatten { p } => vec_schatten(x_desc, *p),
        NormSpec::Operator => x_desc[0],
        NormSpec::Trace => x_desc.iter().sum(),
    }
}

fn norm_max_index(spec: &NormSpec) -> Option<usize> {
    match spec {
        NormSpec::KyFan { k } => Some(*k),
        _ => None,
    }
}

fn check_index(k: Option<usize>, n: usize) -> Result<()> {
    if let Some(k) = k {
        if k == 0 || k > n {
            return Err(CoreError::InvalidParameter(format!(
                "index k={k} out of range for dimension {n}"
            )));
        }
    }
    Ok(())
}

/// Anti-norm value on a non-negative spectrum (any order; sorted internally).
pub fn antinorm_on_spectrum(spec: &AntiNormSpec, spectrum: &[f64]) -> Result<f64> {
    let x = sorted_desc(spectrum);
    let n = x.len();
    if n == 0 {
        return Err(CoreError::InvalidParameter("empty spectrum".into()));
    }
    check_index(spec.max_index(), n)?;
    Ok(match spec {
        AntiNormSpec::KyFanAnti { k } => vec_kyfan_anti(&x, *k),
        AntiNormSpec::Schatten { p } => vec_schatten(&x, *p),
        AntiNormSpec::NegSchatten { p } => vec_schatten_kyfan(&x, *p, n),
        AntiNormSpec::SchattenKyFan { p, k } => vec_schatten_kyfan(&x, *p, *k),
        AntiNormSpec::Delta { k } => vec_delta(&x, *k),
        AntiNormSpec::Minkowski => vec_delta(&x, n),
        AntiNormSpec::Derived { norm, p } => {
            if x[n - 1] <= 0.0 {
                0.0
            } else {
                let inverted: Vec<f64> = x.iter().map(|&t| t.powf(-p)).collect();
                vec_norm(norm, &sorted_desc(&inverted)).powf(-1.0 / p)
            }
        }
        AntiNormSpec::DualOf { base, opt } => dual_on_spectrum(base, &x, opt)?.value,
    })
}

/// Anti-norm of a PSD matrix (eigenvalues are clamped at 0 to absorb
/// representation round-off).
pub fn evaluate_antinorm(spec: &AntiNormSpec, a: &HermitianMatrix) -> Result<f64> {
    antinorm_on_spectrum(spec, &a.eigenvalues()?)
}

/// Symmetric norm value on a non-negative spectrum.
pub fn norm_on_spectrum(spec: &NormSpec, spectrum: &[f64]) -> Result<f64> {
    let x = sorted_desc(spectrum);
    check_index(norm_max_index(spec), x.len())?;
    Ok(vec_norm(spec, &x))
}

/// Symmetric norm of a PSD matrix.
pub fn evaluate_norm(spec: &NormSpec, a: &HermitianMatrix) -> Result<f64> {
    norm_on_spectrum(spec, &a.eigenvalues()?)
}

// ---------------------------------------------------------------------------
// Dual anti-norms
// ---------------------------------------------------------------------------

/// Dual value together with the spread of the optimizer restarts
/// (0 for closed forms).
#[derive(Clone, Copy, Debug)]
pub struct DualResult {
    pub value: f64,
    pub gap: f64,
}

/// Exact solution of inf{Σ x_i y_i : sum of k smallest y ≥ 1}: the optimum
/// puts a constant tail over the n − j cheapest coordinates for some
/// j < k, giving min_j (sum of the n−j smallest x)/(k − j).
fn kyfan_dual_exact(x_desc: &[f64], k: usize) -> f64 {
    let n = x_desc.len();
    let mut best = f64::INFINITY;
    for j in 0..k {
        let tail: f64 = x_desc[j..n].iter().sum();
        best = best.min(tail / (k - j) as f64);
    }
    best
}

/// Closed-form dual values where the duality pair is known:
/// trace ↔ λ_min, Schatten p ↔ negative Schatten p/(1−p), Minkowski
/// self-dual up to the factor n.
fn dual_closed_form(base: &AntiNormSpec, x_desc: &[f64]) -> Option<f64> {
    let n = x_desc.len();
    match base {
        AntiNormSpec::KyFanAnti { k } if *k == n => Some(x_desc[n - 1]),
        AntiNormSpec::Schatten { p } if *p == 1.0 => Some(x_desc[n - 1]),
        AntiNormSpec::Schatten { p } => Some(vec_schatten_kyfan(x_desc, p / (1.0 - p), n)),
        AntiNormSpec::NegSchatten { p } => Some(vec_schatten(x_desc, p / (1.0 + p))),
        AntiNormSpec::Minkowski => Some(n as f64 * vec_delta(x_desc, n)),
        AntiNormSpec::Delta { k } if *k == n => Some(n as f64 * vec_delta(x_desc, n)),
        _ => None,
    }
}

/// Constraint gauge for the numeric dual program. For a nested dual the
/// inner program is evaluated by its exact solution (Ky Fan bases) or its
/// closed form; nesting beyond that is rejected.
fn constraint_gauge(
    base: &AntiNormSpec,
    n: usize,
) -> Result<Box<dyn Fn(&[f64]) -> f64 + Sync + Send>> {
    let spec = base.clone();
    match base {
        AntiNormSpec::DualOf { base: inner, .. } => {
            let inner = (**inner).clone();
            if let AntiNormSpec::KyFanAnti { k } = inner {
                return Ok(Box::new(move |y| kyfan_dual_exact(&sorted_desc(y), k)));
            }
            // Remaining supported inners all have closed-form duals.
            let probe = vec![1.0; n];
            if dual_closed_form(&inner, &probe).is_some() {
                return Ok(Box::new(move |y| {
                    dual_closed_form(&inner, &sorted_desc(y)).expect("probed above")
                }));
            }
            Err(CoreError::InvalidParameter(format!(
                "dual of '{}' cannot serve as a constraint gauge",
                inner
            )))
        }
        _ => Ok(Box::new(move |y| {
            antinorm_on_spectrum(&spec, y).expect("validated before the solver runs")
        })),
    }
}

fn dual_on_spectrum(base: &AntiNormSpec, x_desc: &[f64], opt: &DualOptConfig) -> Result<DualResult> {
    check_index(base.max_index(), x_desc.len())?;
    if let Some(value) = dual_closed_form(base, x_desc) {
        return Ok(DualResult { value, gap: 0.0 });
    }
    let gauge = constraint_gauge(base, x_desc.len())?;
    solve_dual_numeric(&*gauge, x_desc, opt)
}

/// Dual anti-norm ‖A‖' = inf{Tr AB : ‖B‖_base = 1} = inf over pairings of
/// the decreasing spectrum of A against an increasing feasible vector.
/// Known duality pairs use their closed forms; everything else runs the
/// projected descent program (deterministic per `opt.seed`).
pub fn dual_antinorm(
    base: &AntiNormSpec,
    a: &HermitianMatrix,
    opt: &DualOptConfig,
) -> Result<DualResult> {
    let x = sorted_desc(&a.eigenvalues()?);
    dual_on_spectrum(base, &x, opt)
}

fn solve_dual_numeric(
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    x_desc: &[f64],
    opt: &DualOptConfig,
) -> Result<DualResult> {
    if opt.restarts == 0 || opt.steps == 0 {
        return Err(CoreError::InvalidParameter(
            "optimizer needs at least one restart and one step".into(),
        ));
    }
    let n = x_desc.len();
    // Objective in log coordinates y = e^u, scale-normalized through the
    // gauge so the constraint is always tight.
    let objective = |u: &[f64]| -> f64 {
        let y: Vec<f64> = u.iter().map(|&ui| ui.exp()).collect();
        let phi_y = phi(&y);
        if !(phi_y > 0.0) || !phi_y.is_finite() {
            return f64::INFINITY;
        }
        let mut asc = y;
        asc.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let paired: f64 = x_desc.iter().zip(&asc).map(|(xi, yi)| xi * yi).sum();
        paired / phi_y
    };

    let run_restart = |r: usize| -> f64 {
        let mut u = if r == 0 {
            vec![0.0; n]
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);
            rng.set_stream(r as u64);
            (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()
        };
        let mut best_f = objective(&u);
        let mut best_u = u.clone();
        let h = 1e-5;
        for t in 0..opt.steps {
            let lr = 1e-2 / (1.0 + t as f64 / 1000.0);
            let mut grad = vec![0.0; n];
            for i in 0..n {
                let saved = u[i];
                u[i] = saved + h;
                let up = objective(&u);
                u[i] = saved - h;
                let dn = objective(&u);
                u[i] = saved;
                let g = (up - dn) / (2.0 * h);
                grad[i] = if g.is_finite() { g } else { 0.0 };
            }
            for i in 0..n {
                u[i] = (u[i] - lr * grad[i]).clamp(-60.0, 60.0);
            }
            let f = objective(&u);
            if f < best_f {
                best_f = f;
                best_u = u.clone();
            }
        }
        // Coordinate polish around the best point seen.
        u = best_u;
        for &scale in &[0.1, 0.01, 1e-3, 1e-4] {
            let mut moves = 0;
            loop {
                let mut improved = false;
                for i in 0..n {
                    for &sign in &[1.0, -1.0] {
                        let saved = u[i];
                        u[i] = (saved + sign * scale).clamp(-60.0, 60.0);
                        let f = objective(&u);
                        if f < best_f {
                            best_f = f;
                            improved = true;
                        } else {
                            u[i] = saved;
                        }
                    }
                }
                moves += 1;
                if !improved || moves > 200 {
                    break;
                }
            }
        }
        best_f
    };

    #[cfg(feature = "parallel")]
    let per_restart: Vec<f64> = {
        use rayon::prelude::*;
        (0..opt.restarts).into_par_iter().map(run_restart).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_restart: Vec<f64> = (0..opt.restarts).map(run_restart).collect();

    let mut best = f64::INFINITY;
    let mut worst = f64::NEG_INFINITY;
    for &v in &per_restart {
        if v < best {
            best = v;
        }
        if v > worst {
            worst = v;
        }
    }
    let gap = (worst - best) / (1.0 + best.abs());
    if !best.is_finite() || gap > 1e-4 {
        return Err(CoreError::OptimizerFailure { gap });
    }
    Ok(DualResult { value: best, gap })
}

// ---------------------------------------------------------------------------
// Variational expressions for the Ky Fan anti-norms
// ---------------------------------------------------------------------------

/// Minimum of Tr ZP over rank-k projections, with the minimizing projection
/// (onto the k bottom eigenvectors) and the smallest value seen among
/// `trials` random rank-k projections — a sampling certificate that the
/// claimed minimum really is one.
#[derive(Clone, Debug)]
pub struct ProjectionForm {
    pub value: f64,
    pub projector: CMatrix,
    pub sampled_min: f64,
}

pub fn kyfan_anti_projection_form(
    z: &HermitianMatrix,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<ProjectionForm> {
    let n = z.dim();
    check_index(Some(k), n)?;
    let d = eigh(z)?;
    // Eigenvalues are sorted decreasing; the k bottom eigenvectors are the
    // last k columns.
    let value: f64 = d.values[n - k..].iter().sum();
    let cols = CMatrix::from_fn(n, k, |i, j| d.vectors[(i, n - k + j)]);
    let projector = cols.mul(&cols.adjoint())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sampled_min = f64::INFINITY;
    for _ in 0..trials {
        let u = haar_unitary(&mut rng, n);
        let v = CMatrix::from_fn(n, k, |i, j| u[(i, j)]);
        let p = v.mul(&v.adjoint())?;
        let val = z.as_cmatrix().mul(&p)?.trace().re;
        sampled_min = sampled_min.min(val);
    }
    let tol = 1e-9 * (1.0 + z.frobenius_norm());
    if trials > 0 && sampled_min < value - tol {
        return Err(CoreError::InvalidParameter(format!(
            "sampled projection beat the eigenvector minimum: {sampled_min} < {value}"
        )));
    }
    Ok(ProjectionForm {
        value,
        projector,
        sampled_min,
    })
}

/// The decomposition maximum max{k·λ_min(A) − Tr B : Z = A − B, A, B ≥ 0},
/// realized by truncating the spectrum of Z at its k-th smallest eigenvalue:
/// A lifts everything below the threshold up to it, B absorbs the excess.
#[derive(Clone, Debug)]
pub struct DecompositionForm {
    pub value: f64,
    pub part_a: HermitianMatrix,
    pub part_b: HermitianMatrix,
}

pub fn kyfan_anti_decomposition_form(z: &HermitianMatrix, k: usize) -> Result<DecompositionForm> {
    let n = z.dim();
    check_index(Some(k), n)?;
    let d = eigh(z)?;
    let threshold = d.values[n - k];
    let lifted: Vec<f64> = d.values.iter().map(|&l| l.max(threshold)).collect();
    let mut scaled = d.vectors.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= lifted[j];
        }
    }
    let part_a = HermitianMatrix::from_cmatrix(&scaled.mul(&d.vectors.adjoint())?)?;
    let part_b = part_a.sub(z)?;
    let value = k as f64 * threshold - part_b.trace();
    Ok(DecompositionForm {
        value,
        part_a,
        part_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::{sample_psd, PsdSamplerConfig};

    fn sample(seed: u64, dim: usize) -> HermitianMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample_psd(&mut rng, &PsdSamplerConfig::new(dim).with_condition(40.0))
            .unwrap()
            .matrix
    }

    fn catalog(n: usize) -> Vec<AntiNormSpec> {
        vec![
            AntiNormSpec::kyfan_anti(1).unwrap(),
            AntiNormSpec::kyfan_anti(2).unwrap(),
            AntiNormSpec::kyfan_anti(n).unwrap(),
            AntiNormSpec::schatten(0.5).unwrap(),
            AntiNormSpec::schatten(1.0).unwrap(),
            AntiNormSpec::neg_schatten(1.0).unwrap(),
            AntiNormSpec::neg_schatten(0.5).unwrap(),
            AntiNormSpec::schatten_kyfan(1.0, 2).unwrap(),
            AntiNormSpec::delta(2).unwrap(),
            AntiNormSpec::Minkowski,
            AntiNormSpec::derived(NormSpec::kyfan(2).unwrap(), 1.0).unwrap(),
            AntiNormSpec::derived(NormSpec::schatten(2.0).unwrap(), 0.5).unwrap(),
        ]
    }

    #[test]
    fn hand_checked_values() {
        let a321 = HermitianMatrix::from_diag(&[3.0, 2.0, 1.0]);
        let spec = AntiNormSpec::kyfan_anti(2).unwrap();
        assert_eq!(evaluate_antinorm(&spec, &a321).unwrap(), 3.0);

        let a12 = HermitianMatrix::from_diag(&[1.0, 2.0]);
        let ns = AntiNormSpec::neg_schatten(1.0).unwrap();
        assert!((evaluate_antinorm(&ns, &a12).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        let a941 = HermitianMatrix::from_diag(&[9.0, 4.0, 1.0]);
        let d2 = AntiNormSpec::delta(2).unwrap();
        assert!((evaluate_antinorm(&d2, &a941).unwrap() - 2.0).abs() < 1e-12);

        let mink = evaluate_antinorm(&AntiNormSpec::Minkowski, &a941).unwrap();
        assert!((mink - 36f64.powf(1.0 / 3.0)).abs() < 1e-12);

        let singular = HermitianMatrix::from_diag(&[2.0, 0.0]);
        for spec in [
            AntiNormSpec::neg_schatten(1.0).unwrap(),
            AntiNormSpec::schatten_kyfan(0.5, 1).unwrap(),
            AntiNormSpec::derived(NormSpec::Trace, 1.0).unwrap(),
        ] {
            assert_eq!(evaluate_antinorm(&spec, &singular).unwrap(), 0.0);
        }
    }

    #[test]
    fn norm_values() {
        let a = HermitianMatrix::from_diag(&[3.0, 1.0]);
        assert_eq!(
            evaluate_norm(&NormSpec::kyfan(1).unwrap(), &a).unwrap(),
            3.0
        );
        let b = HermitianMatrix::from_diag(&[3.0, 4.0]);
        assert!(
            (evaluate_norm(&NormSpec::schatten(2.0).unwrap(), &b).unwrap() - 5.0).abs() < 1e-12
        );
        assert_eq!(
            evaluate_norm(&NormSpec::Trace, &HermitianMatrix::identity(4)).unwrap(),
            4.0
        );
        assert_eq!(evaluate_norm(&NormSpec::Operator, &b).unwrap(), 4.0);
    }

    #[test]
    fn schatten_kyfan_is_derived_from_kyfan_norm() {
        let a = sample(1, 4);
        for k in 1..=4 {
            for &p in &[0.5, 1.0, 2.0] {
                let direct = evaluate_antinorm(
                    &AntiNormSpec::schatten_kyfan(p, k).unwrap(),
                    &a,
                )
                .unwrap();
                let derived = evaluate_antinorm(
                    &AntiNormSpec::derived(NormSpec::kyfan(k).unwrap(), p).unwrap(),
                    &a,
                )
                .unwrap();
                assert!(
                    (direct - derived).abs() < 1e-11 * (1.0 + direct),
                    "k={k}, p={p}: {direct} vs {derived}"
                );
            }
        }
    }

    #[test]
    fn antinorm_axioms_on_samples() {
        for trial in 0..6 {
            let a = sample(10 + trial, 3);
            let b = sample(20 + trial, 3);
            let mut rng = ChaCha8Rng::seed_from_u64(30 + trial);
            let u = haar_unitary(&mut rng, 3);
            for spec in catalog(3) {
                let va = evaluate_antinorm(&spec, &a).unwrap();
                let vb = evaluate_antinorm(&spec, &b).unwrap();
                // Positive homogeneity.
                let v2 = evaluate_antinorm(&spec, &a.scale(2.0)).unwrap();
                assert!(
                    (v2 - 2.0 * va).abs() < 1e-10 * (1.0 + va),
                    "{spec}: homogeneity"
                );
                // Unitary invariance.
                let vu = evaluate_antinorm(&spec, &a.congruence(&u).unwrap()).unwrap();
                assert!(
                    (vu - va).abs() < 1e-8 * (1.0 + va),
                    "{spec}: unitary invariance ({va} vs {vu})"
                );
                // Superadditivity.
                let vsum = evaluate_antinorm(&spec, &a.add(&b).unwrap()).unwrap();
                assert!(
                    vsum >= va + vb - 1e-9 * (1.0 + vsum),
                    "{spec}: superadditivity {vsum} < {va} + {vb}"
                );
            }
        }
    }

    #[test]
    fn kyfan_anti_is_not_regular_but_schatten_is() {
        // Rank one, so the two smallest eigenvalues are both zero: the
        // k = 2 Ky Fan anti-norm vanishes on a nonzero matrix.
        let rank_deficient = HermitianMatrix::from_diag(&[5.0, 0.0, 0.0]);
        let kf = AntiNormSpec::kyfan_anti(2).unwrap();
        assert_eq!(evaluate_antinorm(&kf, &rank_deficient).unwrap(), 0.0);
        assert!(rank_deficient.frobenius_norm() > 0.0);

        let sch = AntiNormSpec::schatten(0.5).unwrap();
        assert!(evaluate_antinorm(&sch, &rank_deficient).unwrap() > 0.0);
        let tr = AntiNormSpec::kyfan_anti(3).unwrap();
        assert!(evaluate_antinorm(&tr, &rank_deficient).unwrap() > 0.0);
    }

    #[test]
    fn delta_is_the_small_power_limit() {
        let a = sample(2, 4);
        let eigs = a.eigenvalues().unwrap();
        let k = 2;
        let delta = evaluate_antinorm(&AntiNormSpec::delta(k).unwrap(), &a).unwrap();
        let approx = |p: f64| {
            let tail = &eigs[eigs.len() - k..];
            (tail.iter().map(|&t| t.powf(-p)).sum::<f64>() / k as f64).powf(-1.0 / p)
        };
        let err2 = (approx(1e-2) - delta).abs();
        let err3 = (approx(1e-3) - delta).abs();
        assert!(err3 < err2, "{err3} !< {err2}");
        assert!(err3 < 1e-2 * delta);
    }

    #[test]
    fn closed_form_duals() {
        let a = sample(3, 3);
        let eigs = a.eigenvalues().unwrap();
        let opt = DualOptConfig::default();

        // Trace ↦ smallest eigenvalue.
        let trace = AntiNormSpec::kyfan_anti(3).unwrap();
        let d = dual_antinorm(&trace, &a, &opt).unwrap();
        assert!((d.value - eigs[2]).abs() < 1e-12);
        assert_eq!(d.gap, 0.0);

        // Schatten p ↔ negative Schatten p/(1−p).
        let p = 0.4;
        let d = dual_antinorm(&AntiNormSpec::schatten(p).unwrap(), &a, &opt).unwrap();
        let q = p / (1.0 - p);
        let oracle =
            evaluate_antinorm(&AntiNormSpec::neg_schatten(q).unwrap(), &a).unwrap();
        assert!((d.value - oracle).abs() < 1e-12 * (1.0 + oracle));

        // And back.
        let d = dual_antinorm(&AntiNormSpec::neg_schatten(q).unwrap(), &a, &opt).unwrap();
        let oracle = evaluate_antinorm(&AntiNormSpec::schatten(p).unwrap(), &a).unwrap();
        assert!((d.value - oracle).abs() < 1e-12 * (1.0 + oracle));

        // Minkowski is self-dual up to the factor n.
        let d = dual_antinorm(&AntiNormSpec::Minkowski, &a, &opt).unwrap();
        let mink = evaluate_antinorm(&AntiNormSpec::Minkowski, &a).unwrap();
        assert!((d.value - 3.0 * mink).abs() < 1e-12 * (1.0 + mink));
    }

    #[test]
    fn numeric_dual_matches_exact_program_solution() {
        let opt = DualOptConfig::default();
        for (seed, dim, k) in [(4u64, 3usize, 2usize), (5, 4, 2), (6, 4, 3)] {
            let a = sample(seed, dim);
            let x = sorted_desc(&a.eigenvalues().unwrap());
            let exact = kyfan_dual_exact(&x, k);
            let d = dual_antinorm(&AntiNormSpec::kyfan_anti(k).unwrap(), &a, &opt).unwrap();
            let rel = (d.value - exact).abs() / (1.0 + exact);
            assert!(rel < 1e-4, "dim={dim}, k={k}: {} vs {exact}", d.value);
            assert!(d.value >= exact - 1e-9, "optimizer beat the true infimum");
        }
    }

    #[test]
    fn dual_of_kyfan_one_is_the_trace() {
        let a = sample(7, 3);
        let d = dual_antinorm(
            &AntiNormSpec::kyfan_anti(1).unwrap(),
            &a,
            &DualOptConfig::default(),
        )
        .unwrap();
        let trace = a.trace();
        assert!((d.value - trace).abs() < 1e-4 * (1.0 + trace), "{} vs {trace}", d.value);
    }

    #[test]
    fn duality_is_an_involution() {
        let a = sample(8, 3);
        let opt = DualOptConfig::default();

        // Numeric outer program against the exact inner dual.
        let kf = AntiNormSpec::kyfan_anti(2).unwrap();
        let original = evaluate_antinorm(&kf, &a).unwrap();
        let double = dual_antinorm(&AntiNormSpec::dual_of(kf), &a, &opt).unwrap();
        let rel = (double.value - original).abs() / (1.0 + original);
        assert!(rel < 1e-4, "{} vs {original}", double.value);

        // Negative Schatten: outer program numeric, inner dual closed form.
        let ns = AntiNormSpec::neg_schatten(1.0).unwrap();
        let original = evaluate_antinorm(&ns, &a).unwrap();
        let double = dual_antinorm(&AntiNormSpec::dual_of(ns), &a, &opt).unwrap();
        let rel = (double.value - original).abs() / (1.0 + original);
        assert!(rel < 1e-4, "{} vs {original}", double.value);
    }

    #[test]
    fn derived_power_reparametrization() {
        // ‖X^{1/p}‖_!^p for an anti-norm derived from (‖·‖, r) equals the
        // anti-norm derived from (‖·‖, r/p): (X^{1/p})^{−r} = X^{−r/p}.
        use crate::matfun::powm;
        let x = sample(9, 3);
        let r = 1.0;
        for &p in &[0.5, 0.25, 1.0] {
            let base = AntiNormSpec::derived(NormSpec::kyfan(2).unwrap(), r).unwrap();
            let lhs = evaluate_antinorm(&base, &powm(&x, 1.0 / p).unwrap())
                .unwrap()
                .powf(p);
            let reparam =
                AntiNormSpec::derived(NormSpec::kyfan(2).unwrap(), r / p).unwrap();
            let rhs = evaluate_antinorm(&reparam, &x).unwrap();
            assert!(
                (lhs - rhs).abs() < 1e-9 * (1.0 + rhs),
                "p={p}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn projection_form_examples() {
        let z = HermitianMatrix::from_diag(&[3.0, 2.0, 1.0]);
        let form = kyfan_anti_projection_form(&z, 2, 100, 0).unwrap();
        assert!((form.value - 3.0).abs() < 1e-12);
        assert!(form.sampled_min >= form.value - 1e-9);
        // The minimizing projection spans the two bottom eigenvectors.
        let pz = z.as_cmatrix().mul(&form.projector).unwrap().trace().re;
        assert!((pz - 3.0).abs() < 1e-10);

        let full = kyfan_anti_projection_form(&z, 3, 10, 1).unwrap();
        assert!((full.value - z.trace()).abs() < 1e-12);

        let random = sample(11, 4);
        let form = kyfan_anti_projection_form(&random, 2, 200, 2).unwrap();
        let anti = evaluate_antinorm(&AntiNormSpec::kyfan_anti(2).unwrap(), &random).unwrap();
        assert!((form.value - anti).abs() < 1e-10 * (1.0 + anti));
        assert!(form.sampled_min >= form.value - 1e-9 * (1.0 + anti));
    }

    #[test]
    fn decomposition_form_examples() {
        let z = HermitianMatrix::from_diag(&[3.0, 2.0, 1.0]);
        let form = kyfan_anti_decomposition_form(&z, 2).unwrap();
        assert!((form.value - 3.0).abs() < 1e-12);
        let a_diag: Vec<f64> = (0..3).map(|i| form.part_a.get(i, i).re).collect();
        let b_diag: Vec<f64> = (0..3).map(|i| form.part_b.get(i, i).re).collect();
        assert!(a_diag
            .iter()
            .zip(&[3.0, 2.0, 2.0])
            .all(|(x, y)| (x - y).abs() < 1e-12));
        assert!(b_diag
            .iter()
            .zip(&[0.0, 0.0, 1.0])
            .all(|(x, y)| (x - y).abs() < 1e-12));

        let trace_case = kyfan_anti_decomposition_form(&z, 3).unwrap();
        assert!((trace_case.value - z.trace()).abs() < 1e-12);

        // Any decomposition Z = A − B gives a value below the anti-norm.
        let z = sample(12, 4);
        let k = 2;
        let anti = evaluate_antinorm(&AntiNormSpec::kyfan_anti(k).unwrap(), &z).unwrap();
        let exact = kyfan_anti_decomposition_form(&z, k).unwrap();
        assert!((exact.value - anti).abs() < 1e-10 * (1.0 + anti));
        assert!(exact.part_a.min_eigenvalue().unwrap() > -1e-10);
        assert!(exact.part_b.min_eigenvalue().unwrap() > -1e-10);
        let recon = exact.part_a.sub(&exact.part_b).unwrap();
        assert!(recon.sub(&z).unwrap().frobenius_norm() < 1e-10 * (1.0 + z.frobenius_norm()));
        for trial in 0..200 {
            let b = sample(100 + trial, 4).scale(0.5);
            let a = z.add(&b).unwrap();
            let candidate =
                k as f64 * a.eigenvalues().unwrap()[3] - b.trace();
            assert!(
                candidate <= anti + 1e-9 * (1.0 + anti),
                "trial {trial}: {candidate} > {anti}"
            );
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        let specs = [
            "anorm:kyfan:k=2",
            "anorm:schatten:p=0.5",
            "anorm:negschatten:p=1",
            "anorm:negschatten:p=1,k=2",
            "anorm:delta:k=3",
            "anorm:minkowski",
            "anorm:derived:norm=kyfan:k=2,p=1",
            "anorm:derived:norm=schatten:p=2,p=0.5",
            "anorm:dual:of=kyfan:k=2",
            "anorm:dual:of=minkowski",
        ];
        for text in specs {
            let spec: AntiNormSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        for text in ["norm:kyfan:k=1", "norm:schatten:p=2", "norm:operator", "norm:trace"] {
            let spec: NormSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }

        assert!("anorm:schatten:p=2".parse::<AntiNormSpec>().is_err());
        assert!("anorm:nope".parse::<AntiNormSpec>().is_err());
        assert!("norm:schatten:p=0.5".parse::<NormSpec>().is_err());
        assert!("kyfan:k=2".parse::<AntiNormSpec>().is_err());
    }

    #[test]
    fn out_of_range_indices_are_rejected() {
        let a = sample(13, 3);
        assert!(evaluate_antinorm(&AntiNormSpec::kyfan_anti(4).unwrap(), &a).is_err());
        assert!(evaluate_antinorm(&AntiNormSpec::delta(9).unwrap(), &a).is_err());
        assert!(evaluate_norm(&NormSpec::kyfan(4).unwrap(), &a).is_err());
        assert!(AntiNormSpec::schatten(1.5).is_err());
        assert!(AntiNormSpec::neg_schatten(0.0).is_err());
        assert!(NormSpec::schatten(0.5).is_err());
    }
}
