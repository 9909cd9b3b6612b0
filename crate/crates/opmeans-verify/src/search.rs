//! Randomized counterexample search for the open hypotheses: a structured
//! random exploration phase followed by perturbation refinement around the
//! most promising candidate seen so far.
//!
//! A candidate only becomes a reported witness after a verification pass,
//! and every witness is replayable: its margin is a deterministic function
//! of the stored [`TrialInput`] (Monte Carlo sub-steps carry their own seed
//! inside the input). A search that comes back empty never claims the
//! hypothesis is proved — it only reports that no violation was found
//! within the evaluation budget.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::Serialize;

use opmeans_core::hermitian::{sorted_diagonal, HermitianMatrix};
use opmeans_core::majorization::log_supermajorizes;
use opmeans_core::multi::{karcher_mean, KarcherConfig, WeightVector};
use opmeans_core::{C64, CMatrix};

use crate::checks::util::{apply_f, derived_grid, evaluate_antinorm, gap, sample_pd, F_CONCAVE};
use crate::meanspec::PairMeanSpec;
use crate::report::Witness;
use crate::{case_seed, Result, SampleCtx, TrialInput, VerifyError};

/// Base tolerance for search margins.
pub const SEARCH_TOL: f64 = 1e-8;
/// A candidate is only reported as a witness when its verified margin is
/// this far below zero, so numerical noise can never masquerade as a
/// counterexample.
pub const WITNESS_THRESHOLD: f64 = -10.0 * SEARCH_TOL;

/// Hypothesis names accepted by [`search_counterexample`].
pub const HYPOTHESES: [&str; 3] = ["conj-1.7", "gm-le-lm", "thm-4.7-sigma-p"];

/// Which slice of the hypothesis' search space to explore.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchSpace {
    /// The full search space.
    Full,
    /// The sub-family on which the statement is already settled (the
    /// midpoint-geodesic mean for the sorting conjecture, commuting tuples
    /// for the barycenter comparison, representable binomial powers for the
    /// functional inequality). Searches restricted here should come back
    /// empty; they act as a calibration control for the search machinery.
    Settled,
}

/// Outcome of one search run.
#[derive(Clone, Debug, Serialize)]
pub struct SearchOutcome {
    pub schema: u32,
    pub hypothesis: String,
    /// Requested number of candidate evaluations.
    pub budget: usize,
    /// Margin evaluations actually performed (candidates whose margin
    /// computation errored are excluded; verification passes count).
    pub evaluations: usize,
    /// Most negative margin observed over all evaluations, if any.
    pub best_margin: Option<f64>,
    /// Verified counterexample, present only when a candidate's verified
    /// margin fell below [`WITNESS_THRESHOLD`].
    pub witness: Option<Witness>,
}

impl SearchOutcome {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("search outcome serializes")
    }
}

struct Hypothesis {
    name: &'static str,
    dims: &'static [usize],
    sample: fn(&mut SampleCtx, SearchSpace) -> Result<TrialInput>,
    perturb: fn(&TrialInput, &mut ChaCha8Rng, SearchSpace, usize) -> Result<TrialInput>,
    margin: fn(&TrialInput) -> Result<f64>,
    /// Re-evaluate a candidate before accepting it as a witness, returning
    /// the input to store (possibly strengthened) and its margin.
    verify: fn(&TrialInput, &mut ChaCha8Rng) -> Result<(TrialInput, f64)>,
}

static DEFS: [Hypothesis; 3] = [
    Hypothesis {
        name: "conj-1.7",
        dims: &[2, 3, 4, 2],
        sample: conj17_sample,
        perturb: pair_perturb,
        margin: conj17_margin,
        verify: replay_verify,
    },
    Hypothesis {
        name: "gm-le-lm",
        dims: &[2, 2, 2, 3],
        sample: gmlm_sample,
        perturb: gmlm_perturb,
        margin: gmlm_margin,
        verify: gmlm_verify,
    },
    Hypothesis {
        name: "thm-4.7-sigma-p",
        dims: &[2, 3, 4, 3],
        sample: sigmap_sample,
        perturb: pair_perturb,
        margin: sigmap_margin,
        verify: replay_verify,
    },
];

fn hypothesis_def(name: &str) -> Result<&'static Hypothesis> {
    DEFS.iter().find(|h| h.name == name).ok_or_else(|| {
        VerifyError::Config(format!(
            "unknown hypothesis '{name}'; expected one of {}",
            HYPOTHESES.join(", ")
        ))
    })
}

/// Recompute a search candidate's margin from its stored input alone. Every
/// reported witness satisfies `search_margin(&witness.input) ==
/// witness.margin` bit for bit.
pub fn search_margin(input: &TrialInput) -> Result<f64> {
    match input.id.as_str() {
        "conj-1.7" => conj17_margin(input),
        "gm-le-lm" => gmlm_margin(input),
        "thm-4.7-sigma-p" => sigmap_margin(input),
        other => Err(VerifyError::Config(format!(
            "unknown search hypothesis '{other}'"
        ))),
    }
}

/// Run a randomized counterexample search. Roughly the first 70% of the
/// budget is spent on independent random candidates and the remainder on
/// perturbations of the best candidate found, which homes in on shallow
/// minima without getting stuck early.
pub fn search_counterexample(
    hypothesis: &str,
    budget: usize,
    seed: u64,
    space: SearchSpace,
) -> Result<SearchOutcome> {
    let hypo = hypothesis_def(hypothesis)?;
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, hypo.name));
    let explore = budget.saturating_mul(7) / 10;
    let mut evaluations = 0usize;
    let mut best_margin: Option<f64> = None;
    let mut best_input: Option<TrialInput> = None;
    let mut witness: Option<Witness> = None;

    for i in 0..budget {
        let dim = hypo.dims[i % hypo.dims.len()];
        let candidate = if i >= explore && best_input.is_some() {
            (hypo.perturb)(best_input.as_ref().expect("checked"), &mut rng, space, i)
        } else {
            let mut ctx = SampleCtx {
                dim,
                trial: i,
                rng: &mut rng,
            };
            (hypo.sample)(&mut ctx, space)
        };
        let candidate = match candidate {
            Ok(c) => c,
            Err(_) => continue,
        };
        let margin = match (hypo.margin)(&candidate) {
            Ok(m) if m.is_finite() => m,
            _ => continue,
        };
        evaluations += 1;
        if best_margin.map_or(true, |b| margin < b) {
            best_margin = Some(margin);
            best_input = Some(candidate.clone());
        }
        let improves = witness.as_ref().map_or(true, |w| margin < w.margin);
        if margin < WITNESS_THRESHOLD && improves {
            let (vinput, vmargin) = (hypo.verify)(&candidate, &mut rng)?;
            evaluations += 1;
            let still_improves = witness.as_ref().map_or(true, |w| vmargin < w.margin);
            if vmargin < WITNESS_THRESHOLD && still_improves {
                witness = Some(Witness {
                    margin: vmargin,
                    note: None,
                    input: vinput,
                });
            }
        }
    }

    Ok(SearchOutcome {
        schema: 1,
        hypothesis: hypo.name.to_string(),
        budget,
        evaluations,
        best_margin,
        witness,
    })
}

/// Verification for hypotheses whose margin is already a deterministic
/// function of the input: recompute it on the unchanged input.
fn replay_verify(candidate: &TrialInput, _rng: &mut ChaCha8Rng) -> Result<(TrialInput, f64)> {
    let margin = search_margin(candidate)?;
    Ok((candidate.clone(), margin))
}

/// Congruence by a random perturbation of the identity: keeps positive
/// definiteness while moving every matrix entry.
fn perturb_pd(m: &HermitianMatrix, rng: &mut ChaCha8Rng) -> Result<HermitianMatrix> {
    let n = m.dim();
    let delta = rng.gen_range(0.02..0.25);
    let mut x = CMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let bump = C64::new(rng.gen_range(-delta..delta), rng.gen_range(-delta..delta));
            x[(i, j)] += bump;
        }
    }
    m.congruence(&x).map_err(VerifyError::from)
}

/// Shared perturbation for the two-operand hypotheses: jiggle `A` and `B`,
/// keep every other parameter of the candidate fixed.
fn pair_perturb(
    base: &TrialInput,
    rng: &mut ChaCha8Rng,
    _space: SearchSpace,
    trial: usize,
) -> Result<TrialInput> {
    let mut input = base.clone();
    input.trial = trial;
    let a = perturb_pd(base.mat("A")?, rng)?;
    let b = perturb_pd(base.mat("B")?, rng)?;
    input.set_mat("A", a).set_mat("B", b);
    Ok(input)
}

// ---------------------------------------------------------------------------
// conj-1.7: sorting the operands' spectra should bracket the mean's bottom
// eigenvalue products (anti-aligned above, aligned below).

fn random_atoms_spec(rng: &mut ChaCha8Rng) -> String {
    let k = rng.gen_range(2..=3usize);
    let raw: Vec<f64> = (0..k)
        .map(|_| {
            let e: f64 = Exp1.sample(rng);
            e + 1e-9
        })
        .collect();
    let total: f64 = raw.iter().sum();
    let parts: Vec<String> = raw
        .iter()
        .map(|mass| {
            let alpha: f64 = rng.gen_range(0.0..=1.0);
            format!("({},{})", alpha, mass / total)
        })
        .collect();
    format!("mean:geodesic:atoms={}", parts.join(","))
}

fn conj17_sample(ctx: &mut SampleCtx, space: SearchSpace) -> Result<TrialInput> {
    let spec = match space {
        SearchSpace::Settled => "mean:geo".to_string(),
        SearchSpace::Full => match ctx.rng.gen_range(0..6u32) {
            0 => "mean:arith".to_string(),
            1 => format!("mean:bp:p={}", ctx.rng.gen_range(0.05..1.0f64)),
            2 => format!("mean:falpha:a={}", ctx.rng.gen_range(0.5..2.0f64)),
            3 => format!("mean:halpha:a={}", ctx.rng.gen_range(0.0..1.0f64)),
            _ => random_atoms_spec(ctx.rng),
        },
    };
    let ca = ctx.rng.gen_range(2.0..200.0);
    let cb = ctx.rng.gen_range(2.0..200.0);
    let a = sample_pd(ctx, ca)?;
    let b = sample_pd(ctx, cb)?;
    let mut input = TrialInput::new("conj-1.7", ctx.dim, ctx.trial);
    input.set_str("mean_spec", &spec).set_mat("A", a).set_mat("B", b);
    Ok(input)
}

const MAJ_TOL: f64 = 1e-9;

fn conj17_margin(input: &TrialInput) -> Result<f64> {
    let spec: PairMeanSpec = input.strp("mean_spec")?.parse()?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let (m, _) = spec.eval(a, b)?;
    let a_desc = sorted_diagonal(a, true)?;
    let (anti, _) = spec.eval(&a_desc, &sorted_diagonal(b, false)?)?;
    let (aligned, _) = spec.eval(&a_desc, &sorted_diagonal(b, true)?)?;
    let upper = log_supermajorizes(&anti, &m, MAJ_TOL)?.worst_margin;
    let lower = log_supermajorizes(&m, &aligned, MAJ_TOL)?.worst_margin;
    Ok(upper.min(lower))
}

// ---------------------------------------------------------------------------
// gm-le-lm: is the equal-weight Karcher barycenter dominated (in the Loewner
// order) by the average of Karcher barycenters over uniformly random
// weights? The average is estimated by Monte Carlo from a seed stored in the
// candidate, and the margin is widened by three standard errors so only
// statistically significant violations count.

const GM_M: usize = 3;
const GM_SAMPLES: usize = 16;

fn gm_cfg() -> KarcherConfig {
    KarcherConfig {
        tol_grad: Some(1e-10),
        max_iter: 500,
        step: 1.0,
    }
}

fn gmlm_sample(ctx: &mut SampleCtx, space: SearchSpace) -> Result<TrialInput> {
    let mut input = TrialInput::new("gm-le-lm", ctx.dim, ctx.trial);
    for i in 0..GM_M {
        let mat = match space {
            SearchSpace::Settled => {
                let d: Vec<f64> = (0..ctx.dim).map(|_| ctx.rng.gen_range(0.05..20.0)).collect();
                HermitianMatrix::from_diag(&d)
            }
            SearchSpace::Full => {
                let c = ctx.rng.gen_range(2.0..300.0);
                sample_pd(ctx, c)?
            }
        };
        input.set_mat(&format!("A{i}"), mat);
    }
    let mc_seed = ctx.rng.gen::<u32>() as usize;
    input
        .set_usize("m", GM_M)
        .set_usize("S", GM_SAMPLES)
        .set_usize("mc_seed", mc_seed);
    Ok(input)
}

fn gmlm_perturb(
    base: &TrialInput,
    rng: &mut ChaCha8Rng,
    space: SearchSpace,
    trial: usize,
) -> Result<TrialInput> {
    let mut input = base.clone();
    input.trial = trial;
    let m = base.usizep("m")?;
    for i in 0..m {
        let key = format!("A{i}");
        let cur = base.mat(&key)?;
        let next = match space {
            SearchSpace::Settled => {
                let d: Vec<f64> = cur
                    .diagonal()
                    .iter()
                    .map(|x| x * rng.gen_range(-0.2..0.2f64).exp())
                    .collect();
                HermitianMatrix::from_diag(&d)
            }
            SearchSpace::Full => perturb_pd(cur, rng)?,
        };
        input.set_mat(&key, next);
    }
    input.set_usize("mc_seed", rng.gen::<u32>() as usize);
    Ok(input)
}

fn gmlm_margin(input: &TrialInput) -> Result<f64> {
    let m = input.usizep("m")?;
    let samples = input.usizep("S")?;
    let mc_seed = input.usizep("mc_seed")? as u64;
    if m == 0 || samples < 2 {
        return Err(VerifyError::Eval("need m >= 1 and S >= 2".into()));
    }
    let mut mats = Vec::with_capacity(m);
    for i in 0..m {
        mats.push(input.mat(&format!("A{i}"))?.clone());
    }
    let cfg = gm_cfg();
    let center = karcher_mean(&WeightVector::uniform(m), &mats, &cfg)?.mean;

    let mut rng = ChaCha8Rng::seed_from_u64(mc_seed);
    let mut draws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut w: Vec<f64> = (0..m)
            .map(|_| {
                let e: f64 = Exp1.sample(&mut rng);
                e + 1e-12
            })
            .collect();
        let total: f64 = w.iter().sum();
        for x in w.iter_mut() {
            *x /= total;
        }
        draws.push(karcher_mean(&WeightVector::new(w)?, &mats, &cfg)?.mean);
    }
    let mut avg = HermitianMatrix::zeros(center.dim());
    for d in &draws {
        avg = avg.add(d)?;
    }
    let avg = avg.scale(1.0 / samples as f64);
    let mut var = 0.0;
    for d in &draws {
        var += d.sub(&avg)?.frobenius_norm().powi(2);
    }
    let se = (var / (samples as f64 * (samples as f64 - 1.0))).sqrt();
    let scale = 1.0 + avg.frobenius_norm() + center.frobenius_norm();
    let diff = avg.sub(&center)?;
    Ok(diff.min_eigenvalue()? / scale + 3.0 * se / scale)
}

/// Strengthen a promising candidate before accepting it: quadruple the
/// Monte Carlo sample count under a fresh seed and re-test. The strengthened
/// input is what gets stored, so the reported witness margin replays
/// exactly.
fn gmlm_verify(candidate: &TrialInput, rng: &mut ChaCha8Rng) -> Result<(TrialInput, f64)> {
    let mut strengthened = candidate.clone();
    strengthened.set_usize("S", candidate.usizep("S")?.saturating_mul(4));
    strengthened.set_usize("mc_seed", rng.gen::<u32>() as usize);
    let margin = gmlm_margin(&strengthened)?;
    Ok((strengthened, margin))
}

// ---------------------------------------------------------------------------
// thm-4.7-sigma-p: does the anti-norm superadditivity of geodesic means
// extend to binomial means b_p at powers with no geodesic representation?

fn sigmap_sample(ctx: &mut SampleCtx, space: SearchSpace) -> Result<TrialInput> {
    let p = match space {
        SearchSpace::Settled => [1.0, 0.5, 1.0 / 3.0, 0.25][ctx.rng.gen_range(0..4usize)],
        SearchSpace::Full => ctx.rng.gen_range(0.05..1.0f64),
    };
    let f = F_CONCAVE[ctx.rng.gen_range(0..F_CONCAVE.len())];
    let ca = ctx.rng.gen_range(2.0..100.0);
    let cb = ctx.rng.gen_range(2.0..100.0);
    let a = sample_pd(ctx, ca)?;
    let b = sample_pd(ctx, cb)?;
    let mut input = TrialInput::new("thm-4.7-sigma-p", ctx.dim, ctx.trial);
    input
        .set_str("mean_spec", &format!("mean:bp:p={p}"))
        .set_str("f", f)
        .set_mat("A", a)
        .set_mat("B", b);
    Ok(input)
}

/// Evaluate a two-matrix mean specification on scalars by feeding it 1x1
/// matrices, so the scalar side of a functional inequality goes through the
/// exact same code path as the matrix side.
fn scalar_of_spec(spec: &PairMeanSpec, x: f64, y: f64) -> Result<f64> {
    let (m, _) = spec.eval(
        &HermitianMatrix::from_diag(&[x]),
        &HermitianMatrix::from_diag(&[y]),
    )?;
    Ok(m.get(0, 0).re)
}

fn sigmap_margin(input: &TrialInput) -> Result<f64> {
    let spec: PairMeanSpec = input.strp("mean_spec")?.parse()?;
    let fname = input.strp("f")?;
    let a = input.mat("A")?;
    let b = input.mat("B")?;
    let (m, _) = spec.eval(a, b)?;
    let fm = apply_f(fname, &m)?;
    let fa = apply_f(fname, a)?;
    let fb = apply_f(fname, b)?;
    let mut worst = f64::INFINITY;
    for grid_spec in derived_grid(a.dim()) {
        let lhs = evaluate_antinorm(&grid_spec, &fm)?;
        let na = evaluate_antinorm(&grid_spec, &fa)?;
        let nb = evaluate_antinorm(&grid_spec, &fb)?;
        let rhs = scalar_of_spec(&spec, na, nb)?;
        worst = worst.min(gap(lhs, rhs));
    }
    Ok(worst)
}
