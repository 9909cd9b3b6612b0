//! Randomized verification campaigns for matrix-mean and anti-norm
//! inequalities, plus counterexample search for open questions.
//!
//! The crate is organized around pure checker pairs: a sampler draws a trial
//! input from a seeded RNG, and a margin function maps that input to a single
//! normalized slack value. Keeping the margin function free of randomness
//! means any recorded witness can be replayed bit-for-bit from its JSON
//! serialization.

pub mod checks;
pub mod meanspec;
pub mod registry;
pub mod report;
pub mod search;

use std::collections::BTreeMap;
use std::time::Instant;

use opmeans_core::hermitian::HermitianMatrix;
use opmeans_core::posmap::PositiveMap;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use registry::{find_property, registry, PropertyDef};
pub use report::{CampaignReport, ConfigEcho, PropertyVerdict, Witness};

/// Margin recorded for a trial whose evaluation errored out (as opposed to a
/// genuine numeric violation). Always counts as a failure.
pub const ERROR_MARGIN: f64 = -1.0;

/// Dimensions cycled through when no explicit dimension is requested.
pub const DIM_CYCLE: [usize; 4] = [2, 3, 4, 6];

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] opmeans_core::CoreError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("evaluation error: {0}")]
    Eval(String),
}

pub type Result<T> = std::result::Result<T, VerifyError>;

/// Everything a margin function needs to reproduce one trial, in a stable,
/// JSON-serializable form. Matrices round-trip bit-exactly, so a replayed
/// margin matches the recorded one to the last bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialInput {
    pub id: String,
    pub dim: usize,
    pub trial: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub matrices: BTreeMap<String, HermitianMatrix>,
}

impl TrialInput {
    pub fn new(id: &str, dim: usize, trial: usize) -> Self {
        TrialInput {
            id: id.to_string(),
            dim,
            trial,
            params: BTreeMap::new(),
            matrices: BTreeMap::new(),
        }
    }

    pub fn set_mat(&mut self, key: &str, m: HermitianMatrix) -> &mut Self {
        self.matrices.insert(key.to_string(), m);
        self
    }

    pub fn set_f64(&mut self, key: &str, v: f64) -> &mut Self {
        self.params
            .insert(key.to_string(), serde_json::Value::from(v));
        self
    }

    pub fn set_usize(&mut self, key: &str, v: usize) -> &mut Self {
        self.params
            .insert(key.to_string(), serde_json::Value::from(v));
        self
    }

    pub fn set_str(&mut self, key: &str, v: &str) -> &mut Self {
        self.params
            .insert(key.to_string(), serde_json::Value::from(v));
        self
    }

    pub fn set_map(&mut self, key: &str, map: &PositiveMap) -> Result<&mut Self> {
        self.params
            .insert(key.to_string(), serde_json::to_value(map)?);
        Ok(self)
    }

    pub fn set_value(&mut self, key: &str, v: serde_json::Value) -> &mut Self {
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn mat(&self, key: &str) -> Result<&HermitianMatrix> {
        self.matrices
            .get(key)
            .ok_or_else(|| VerifyError::Eval(format!("trial input missing matrix '{key}'")))
    }

    pub fn f64p(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| VerifyError::Eval(format!("trial input missing number '{key}'")))
    }

    pub fn usizep(&self, key: &str) -> Result<usize> {
        self.params
            .get(key)
            .and_then(serde_json::Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| VerifyError::Eval(format!("trial input missing integer '{key}'")))
    }

    pub fn strp(&self, key: &str) -> Result<&str> {
        self.params
            .get(key)
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| VerifyError::Eval(format!("trial input missing string '{key}'")))
    }

    pub fn map(&self, key: &str) -> Result<PositiveMap> {
        let v = self
            .params
            .get(key)
            .ok_or_else(|| VerifyError::Eval(format!("trial input missing map '{key}'")))?;
        Ok(serde_json::from_value(v.clone())?)
    }
}

/// Sampler context for one trial. The RNG is the per-case stream; samplers
/// must draw from it deterministically so campaigns are reproducible.
pub struct SampleCtx<'a> {
    pub dim: usize,
    pub trial: usize,
    pub rng: &'a mut ChaCha8Rng,
}

/// A sampled trial plus the number of candidate draws it took (1 unless the
/// sampler does rejection).
pub struct Sampled {
    pub input: TrialInput,
    pub attempts: u64,
}

impl Sampled {
    pub fn direct(input: TrialInput) -> Self {
        Sampled { input, attempts: 1 }
    }
}

pub type SampleFn = fn(&mut SampleCtx) -> Result<Sampled>;
pub type MarginFn = fn(&TrialInput) -> Result<f64>;

/// One property to run: resolved configuration for a single registry entry.
#[derive(Clone, Debug)]
pub struct CaseConfig {
    pub id: String,
    pub dim: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Campaign-level configuration.
#[derive(Clone, Debug)]
pub struct CampaignConfig {
    /// Property ids in the order requested (already expanded from "all").
    pub props: Vec<String>,
    pub dim: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Worker threads for running cases; does not affect results.
    pub parallelism: usize,
}

/// FNV-1a 64-bit hash, written out here so the per-case seed derivation never
/// changes underneath us (std's DefaultHasher is not stable across releases).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-case seed: hash of the property id mixed with the master seed.
pub fn case_seed(master: u64, id: &str) -> u64 {
    splitmix64(fnv1a64(id.as_bytes()) ^ master.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Run a single property case to a verdict.
pub fn run_property(def: &PropertyDef, case: &CaseConfig) -> PropertyVerdict {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
    let mut failures = 0usize;
    let mut worst_margin = f64::INFINITY;
    let mut witness: Option<Witness> = None;
    let mut worst_failing = f64::INFINITY;
    let mut attempts_total: u64 = 0;

    for trial in 0..case.trials {
        let dim = case.dim.unwrap_or(DIM_CYCLE[trial % DIM_CYCLE.len()]);
        let mut ctx = SampleCtx {
            dim,
            trial,
            rng: &mut rng,
        };
        let sampled = (def.sample)(&mut ctx);
        let (margin, input, note) = match sampled {
            Ok(s) => {
                attempts_total += s.attempts;
                match (def.margin)(&s.input) {
                    Ok(m) => (m, s.input, None),
                    Err(e) => (ERROR_MARGIN, s.input, Some(e.to_string())),
                }
            }
            Err(e) => {
                attempts_total += 1;
                (
                    ERROR_MARGIN,
                    TrialInput::new(&case.id, dim, trial),
                    Some(e.to_string()),
                )
            }
        };
        if margin < worst_margin {
            worst_margin = margin;
        }
        let failed = note.is_some() || margin < -case.tol;
        if failed {
            failures += 1;
            if margin < worst_failing {
                worst_failing = margin;
                witness = Some(Witness {
                    margin,
                    note,
                    input,
                });
            }
        }
    }

    if case.trials == 0 {
        worst_margin = 0.0;
    }
    let acceptance_rate = if def.reports_acceptance && attempts_total > 0 {
        Some(case.trials as f64 / attempts_total as f64)
    } else {
        None
    };
    PropertyVerdict {
        id: case.id.clone(),
        trials: case.trials,
        failures,
        worst_margin,
        witness,
        seed: case.seed,
        negative_control: def.negative_control,
        acceptance_rate,
        elapsed_ms: started.elapsed().as_millis(),
    }
}

fn run_case_by_id(id: &str, cfg: &CampaignConfig) -> Result<PropertyVerdict> {
    let def = find_property(id)
        .ok_or_else(|| VerifyError::Config(format!("unknown property id '{id}'")))?;
    let case = CaseConfig {
        id: id.to_string(),
        dim: cfg.dim,
        trials: cfg.trials,
        seed: case_seed(cfg.seed, id),
        tol: cfg.tol,
    };
    Ok(run_property(def, &case))
}

/// Run a campaign over the configured properties. Case results land in the
/// report in the requested id order regardless of how they were scheduled.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    for id in &cfg.props {
        if find_property(id).is_none() {
            return Err(VerifyError::Config(format!("unknown property id '{id}'")));
        }
    }
    if cfg.trials == 0 {
        return Err(VerifyError::Config("trials must be positive".into()));
    }
    if !(cfg.tol.is_finite() && cfg.tol > 0.0) {
        return Err(VerifyError::Config("tol must be a positive number".into()));
    }
    if let Some(d) = cfg.dim {
        if !(1..=16).contains(&d) {
            return Err(VerifyError::Config(format!(
                "dimension {d} out of supported range 1..=16"
            )));
        }
    }

    let verdicts = run_all_cases(cfg)?;

    Ok(CampaignReport {
        schema: 1,
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: Some(report::utc_timestamp()),
        seed: cfg.seed,
        config: ConfigEcho {
            props: cfg.props.clone(),
            dim: cfg.dim,
            trials: cfg.trials,
            tol: cfg.tol,
        },
        cases: verdicts,
    })
}

#[cfg(feature = "parallel")]
fn run_all_cases(cfg: &CampaignConfig) -> Result<Vec<PropertyVerdict>> {
    use rayon::prelude::*;
    if cfg.parallelism <= 1 {
        return cfg.props.iter().map(|id| run_case_by_id(id, cfg)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| VerifyError::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        cfg.props
            .par_iter()
            .map(|id| run_case_by_id(id, cfg))
            .collect()
    })
}

#[cfg(not(feature = "parallel"))]
fn run_all_cases(cfg: &CampaignConfig) -> Result<Vec<PropertyVerdict>> {
    cfg.props.iter().map(|id| run_case_by_id(id, cfg)).collect()
}

/// Re-evaluate a stored witness input through its property's margin function.
pub fn replay_margin(input: &TrialInput) -> Result<f64> {
    let def = find_property(&input.id)
        .ok_or_else(|| VerifyError::Config(format!("unknown property id '{}'", input.id)))?;
    (def.margin)(input)
}

/// Whether the campaign ended in its expected state: theorem-backed cases
/// clean, designed negative controls failing. Returns the ids that deviated.
pub fn unexpected_cases(report: &CampaignReport) -> Vec<String> {
    report
        .cases
        .iter()
        .filter(|c| {
            if c.negative_control {
                c.failures == 0
            } else {
                c.failures > 0
            }
        })
        .map(|c| c.id.clone())
        .collect()
}
