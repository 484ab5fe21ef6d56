//! Monte Carlo estimates of `𝔼 Tr χ_{E,η}(H_l)`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ensemble::{box_operator, sample_for_box, GridOptions};
use super::pool::run_indexed;
use super::stats::{normal_mean, paired_ratio, Estimate, Z95};
use crate::field_model::{derive_seed, FieldModelConfig};
use crate::gauge::BoxSpec;
use crate::lattice::count_in;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WegnerParams {
    pub energy: f64,
    pub etas: Vec<f64>,
    pub l: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WegnerResult {
    pub params: WegnerParams,
    /// One estimate per `η`, in input order.
    pub estimates: Vec<Estimate>,
    /// `counts[t][i]`: eigenvalues in `[E − η_i/2, E + η_i/2)` for trial `t`
    /// (successful trials only, in trial order).
    pub counts: Vec<Vec<usize>>,
    pub trial_index: Vec<usize>,
    pub failures: usize,
}

impl WegnerResult {
    /// Paired ratio `estimate(η_i) / estimate(η_j)`.
    pub fn ratio(&self, i: usize, j: usize) -> Estimate {
        let y: Vec<f64> = self.counts.iter().map(|c| c[i] as f64).collect();
        let x: Vec<f64> = self.counts.iter().map(|c| c[j] as f64).collect();
        paired_ratio(&y, &x, Z95)
    }
}

/// Every trial draws one field over `Λ̃_l(0)`, assembles `H_l(A_ω)` and counts
/// eigenvalues in each window by inertia, so all `η` share the sample.
pub fn wegner_mc(config: &FieldModelConfig, params: &WegnerParams) -> Result<WegnerResult> {
    if params.etas.is_empty() || params.etas.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidInput("window widths must be positive".into()));
    }
    if params.trials == 0 {
        return Err(Error::InvalidInput("at least one trial is required".into()));
    }
    let bx = BoxSpec::new([0.0, 0.0], params.l);
    let runs = run_indexed(params.trials, |t| -> Result<Vec<usize>> {
        let sample = sample_for_box(config, &bx, derive_seed(params.seed, t as u64))?;
        let b = box_operator(config, &bx, Arc::new(sample), &params.grid)?;
        Ok(params
            .etas
            .iter()
            .map(|&eta| count_in(&b.op, params.energy - 0.5 * eta, params.energy + 0.5 * eta))
            .collect())
    });
    let mut counts = Vec::new();
    let mut trial_index = Vec::new();
    let mut failures = 0;
    for (t, r) in runs.into_iter().enumerate() {
        match r {
            Ok(c) => {
                counts.push(c);
                trial_index.push(t);
            }
            Err(_) => failures += 1,
        }
    }
    if counts.is_empty() {
        return Err(Error::NoConvergence("every Wegner trial failed".into()));
    }
    let estimates = (0..params.etas.len())
        .map(|i| {
            let x: Vec<f64> = counts.iter().map(|c| c[i] as f64).collect();
            normal_mean(&x, Z95)
        })
        .collect();
    Ok(WegnerResult {
        params: params.clone(),
        estimates,
        counts,
        trial_index,
        failures,
    })
}
