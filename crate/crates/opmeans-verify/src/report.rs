//! Report types and serialization. The JSON body is deterministic for a
//! fixed configuration and master seed; only the timestamp field varies
//! between runs, and `canonical_json` strips it for comparisons.

use serde::{Deserialize, Serialize};

use crate::TrialInput;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub input: TrialInput,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub id: String,
    pub trials: usize,
    pub failures: usize,
    pub worst_margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub seed: u64,
    pub negative_control: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acceptance_rate: Option<f64>,
    /// Wall-clock per case; informational only, excluded from the report body
    /// so reruns stay byte-identical.
    #[serde(skip, default)]
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub props: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub trials: usize,
    pub tol: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema: u32,
    pub version: String,
    /// ISO-8601 UTC creation time; `None` in the canonical body.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub seed: u64,
    pub config: ConfigEcho,
    pub cases: Vec<PropertyVerdict>,
}

pub fn utc_timestamp() -> String {
    chrono::Utc::now().format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string()
}

impl CampaignReport {
    /// Full JSON including the timestamp.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Deterministic body: identical across reruns with the same master seed
    /// and configuration (the timestamp is omitted).
    pub fn canonical_json(&self) -> String {
        let mut clone = self.clone();
        clone.timestamp = None;
        serde_json::to_string_pretty(&clone).expect("report serialization cannot fail")
    }

    /// Flat per-case summary; floats use shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,trials,failures,worst_margin,acceptance_rate\n");
        for c in &self.cases {
            let rate = c
                .acceptance_rate
                .map(|r| r.to_string())
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.id, c.trials, c.failures, c.worst_margin, rate
            ));
        }
        out
    }
}
