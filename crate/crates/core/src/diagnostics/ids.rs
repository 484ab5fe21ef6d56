//! Averaged finite-volume counting functions.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ensemble::{box_operator, sample_for_box, GridOptions};
use super::pool::run_indexed;
use super::stats::{normal_mean, Estimate, Z95};
use crate::field_model::{derive_seed, FieldModelConfig};
use crate::gauge::BoxSpec;
use crate::lattice::count_below;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdsParams {
    pub l: f64,
    pub energies: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdsResult {
    pub params: IdsParams,
    /// `𝔼 #{λ < E} / |Λ|` per energy.
    pub values: Vec<Estimate>,
    pub failures: usize,
}

pub fn ids_histogram(config: &FieldModelConfig, params: &IdsParams) -> Result<IdsResult> {
    if params.energies.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("energy grid must be non-decreasing".into()));
    }
    let bx = BoxSpec::new([0.0, 0.0], params.l);
    let area = params.l * params.l;
    let runs = run_indexed(params.trials, |t| -> Result<Vec<f64>> {
        let sample = sample_for_box(config, &bx, derive_seed(params.seed, t as u64))?;
        let b = box_operator(config, &bx, Arc::new(sample), &params.grid)?;
        Ok(params
            .energies
            .iter()
            .map(|&e| count_below(&b.op, e) as f64 / area)
            .collect())
    });
    let mut rows = Vec::new();
    let mut failures = 0;
    for r in runs {
        match r {
            Ok(v) => rows.push(v),
            Err(_) => failures += 1,
        }
    }
    let values = (0..params.energies.len())
        .map(|i| {
            let x: Vec<f64> = rows.iter().map(|r| r[i]).collect();
            normal_mean(&x, Z95)
        })
        .collect();
    Ok(IdsResult {
        params: params.clone(),
        values,
        failures,
    })
}
