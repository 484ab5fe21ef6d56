//! Result records shared by all Monte Carlo measurements.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::stats::{CiMethod, Estimate};

/// Hex SHA-256 of a canonical JSON rendering.
pub fn content_hash(value: &serde_json::Value) -> String {
    // serde_json maps are ordered by key, so this rendering is canonical
    let text = serde_json::to_string(value).expect("json value serializes");
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub estimate: f64,
    pub ci: [f64; 2],
    pub ci_method: CiMethod,
    pub trials: usize,
    /// Trials dropped after a solver failure.
    pub failures: usize,
    pub params: serde_json::Value,
    /// Per-trial CSV written next to the record, if any.
    pub artifacts: Option<String>,
}

impl DiagnosticRecord {
    pub fn new(
        kind: &str,
        config_hash: &str,
        seed: u64,
        est: &Estimate,
        failures: usize,
        params: serde_json::Value,
    ) -> Self {
        Self {
            kind: kind.to_string(),
            config_hash: config_hash.to_string(),
            seed,
            estimate: est.value,
            ci: [est.lo, est.hi],
            ci_method: est.method,
            trials: est.n,
            failures,
            params,
            artifacts: None,
        }
    }
}
