//! Parsers for the CLI's mean specifications: two-matrix means ("mean:...")
//! and multivariable means ("mmean:...").

use opmeans_core::hermitian::HermitianMatrix;
use opmeans_core::multi::{
    geodesic_mean_m, inductive_mean, karcher_mean, KarcherConfig, SimplexMeasure, WeightVector,
};
use opmeans_core::opmean::{
    geodesic_mean, kubo_ando_default, rf_by_name, GeodesicMeasure,
};

use crate::{Result, VerifyError};

/// A two-matrix mean: a representing-function mean evaluated through the
/// operator calculus, a binomial (power) mean, or a geodesic-measure mean.
#[derive(Clone, Debug)]
pub enum PairMeanSpec {
    Rf(String),
    Power(f64),
    Geodesic(GeodesicMeasure),
}

fn config_err(msg: String) -> VerifyError {
    VerifyError::Config(msg)
}

fn parse_kv(rest: &str, key: &str, spec: &str) -> Result<f64> {
    let (k, v) = rest
        .split_once('=')
        .ok_or_else(|| config_err(format!("expected {key}=value in '{spec}'")))?;
    if k != key {
        return Err(config_err(format!(
            "expected parameter '{key}' in '{spec}', found '{k}'"
        )));
    }
    v.parse::<f64>()
        .map_err(|_| config_err(format!("bad numeric value '{v}' in '{spec}'")))
}

/// Parse "(a,m),(a,m),..." into geodesic atoms.
fn parse_atoms(text: &str, spec: &str) -> Result<Vec<(f64, f64)>> {
    let mut atoms = Vec::new();
    let trimmed = text.trim();
    if !trimmed.starts_with('(') || !trimmed.ends_with(')') {
        return Err(config_err(format!("atoms must be (alpha,mass) pairs in '{spec}'")));
    }
    for part in trimmed[1..trimmed.len() - 1].split("),(") {
        let (a, m) = part
            .split_once(',')
            .ok_or_else(|| config_err(format!("bad atom '{part}' in '{spec}'")))?;
        let alpha: f64 = a
            .trim()
            .parse()
            .map_err(|_| config_err(format!("bad atom position '{a}' in '{spec}'")))?;
        let mass: f64 = m
            .trim()
            .parse()
            .map_err(|_| config_err(format!("bad atom mass '{m}' in '{spec}'")))?;
        atoms.push((alpha, mass));
    }
    Ok(atoms)
}

impl std::str::FromStr for PairMeanSpec {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix("mean:")
            .ok_or_else(|| config_err(format!("mean spec must start with 'mean:', got '{s}'")))?;
        match body {
            "arith" | "harm" | "geo" => return Ok(PairMeanSpec::Rf(body.to_string())),
            "geodesic:uniform" => return Ok(PairMeanSpec::Geodesic(GeodesicMeasure::uniform())),
            _ => {}
        }
        if let Some(rest) = body.strip_prefix("power:") {
            let p = parse_kv(rest, "p", s)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(config_err(format!(
                    "power mean order must be in [0,1], got {p}"
                )));
            }
            return Ok(PairMeanSpec::Power(p));
        }
        if let Some(rest) = body.strip_prefix("geodesic:atoms=") {
            let atoms = parse_atoms(rest, s)?;
            let nu = GeodesicMeasure::from_atoms(atoms).map_err(|e| config_err(e.to_string()))?;
            return Ok(PairMeanSpec::Geodesic(nu));
        }
        // Everything else is a representing-function family name.
        rf_by_name(body)
            .map(|h| PairMeanSpec::Rf(h.name))
            .map_err(|e| config_err(format!("unknown mean spec '{s}': {e}")))
    }
}

impl PairMeanSpec {
    /// Evaluate the mean; the second value is the regularization epsilon the
    /// operator calculus used (zero when both operands were invertible).
    pub fn eval(
        &self,
        a: &HermitianMatrix,
        b: &HermitianMatrix,
    ) -> Result<(HermitianMatrix, Option<f64>)> {
        match self {
            PairMeanSpec::Rf(name) => {
                let h = rf_by_name(name)?;
                let (m, eps) = kubo_ando_default(&h, a, b)?;
                Ok((m, Some(eps)))
            }
            PairMeanSpec::Power(p) => {
                Ok((opmeans_core::opmean::power_mean(a, b, *p)?, None))
            }
            PairMeanSpec::Geodesic(nu) => Ok((geodesic_mean(nu, a, b)?, None)),
        }
    }
}

/// A multivariable mean over a family of matrices.
#[derive(Clone, Debug)]
pub enum MultiMeanSpec {
    Karcher(Option<Vec<f64>>),
    Inductive,
    /// Monte Carlo estimate of the uniformly measure-weighted mean.
    Logarithmic {
        samples: usize,
    },
}

impl std::str::FromStr for MultiMeanSpec {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .strip_prefix("mmean:")
            .ok_or_else(|| config_err(format!("multi-mean spec must start with 'mmean:', got '{s}'")))?;
        match body {
            "karcher" => return Ok(MultiMeanSpec::Karcher(None)),
            "inductive" => return Ok(MultiMeanSpec::Inductive),
            _ => {}
        }
        if let Some(rest) = body.strip_prefix("karcher:w=") {
            let weights: Vec<f64> = rest
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| config_err(format!("bad weight '{t}' in '{s}'")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(MultiMeanSpec::Karcher(Some(weights)));
        }
        if let Some(rest) = body.strip_prefix("logarithmic") {
            let samples = match rest.strip_prefix(":S=") {
                Some(v) => v
                    .parse::<usize>()
                    .map_err(|_| config_err(format!("bad sample count in '{s}'")))?,
                None if rest.is_empty() => 2000,
                None => return Err(config_err(format!("unknown multi-mean spec '{s}'"))),
            };
            return Ok(MultiMeanSpec::Logarithmic { samples });
        }
        Err(config_err(format!("unknown multi-mean spec '{s}'")))
    }
}

impl MultiMeanSpec {
    pub fn eval(&self, mats: &[HermitianMatrix], seed: u64) -> Result<HermitianMatrix> {
        let cfg = KarcherConfig {
            tol_grad: Some(1e-10),
            max_iter: 2000,
            step: 1.0,
        };
        match self {
            MultiMeanSpec::Karcher(weights) => {
                let w = match weights {
                    Some(w) => WeightVector::new(w.clone())?,
                    None => WeightVector::uniform(mats.len()),
                };
                Ok(karcher_mean(&w, mats, &cfg)?.mean)
            }
            MultiMeanSpec::Inductive => Ok(inductive_mean(mats)?),
            MultiMeanSpec::Logarithmic { samples } => {
                let nu = SimplexMeasure::uniform(*samples)?;
                Ok(geodesic_mean_m(&nu, mats, &cfg, seed)?)
            }
        }
    }
}
