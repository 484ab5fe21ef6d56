//! Good and balanced boxes.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ensemble::{box_operator, proxy_operator, sample_for_box, BoxOperator, GridOptions};
use super::pool::run_indexed;
use super::stats::{wilson, Estimate, Z95};
use crate::field_model::{derive_seed, sample_field, FieldModelConfig, FieldSample};
use crate::gauge::BoxSpec;
use crate::lattice::{block_resolvent_norm, BlockNormOptions};
use crate::{Error, Rect, Result};

/// `‖χ^out (H − E)⁻¹ χ^int‖` for the regions of `inner` on the sites of `b`;
/// infinite when `E` is (numerically) an eigenvalue.
pub fn block_norm(b: &BoxOperator, inner: &BoxSpec, energy: f64) -> Result<f64> {
    let (int, out) = b.masks_of(inner);
    match block_resolvent_norm(
        &b.op,
        Complex64::new(energy, 0.0),
        &int,
        &out,
        &BlockNormOptions::default(),
    ) {
        Ok(r) => Ok(r.norm),
        Err(Error::NearSingular { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodBoxParams {
    pub energy: f64,
    pub gammas: Vec<f64>,
    pub l: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodBoxResult {
    pub params: GoodBoxParams,
    /// `ℙ((γ, E)-good)` per `γ`.
    pub estimates: Vec<Estimate>,
    /// Block norm per successful trial (`inf` when `E` hit the spectrum).
    pub norms: Vec<f64>,
    pub failures: usize,
}

/// A box is `(γ, E)`-good when `‖χ^out R_Λ(E) χ^int‖ ≤ e^(−γl)`; the norm
/// of each trial is shared by all `γ`.
pub fn good_box_mc(config: &FieldModelConfig, params: &GoodBoxParams) -> Result<GoodBoxResult> {
    let bx = BoxSpec::new([0.0, 0.0], params.l);
    let runs = run_indexed(params.trials, |t| -> Result<f64> {
        let sample = sample_for_box(config, &bx, derive_seed(params.seed, t as u64))?;
        let b = box_operator(config, &bx, Arc::new(sample), &params.grid)?;
        block_norm(&b, &bx, params.energy)
    });
    let (norms, failures) = split(runs);
    let estimates = params
        .gammas
        .iter()
        .map(|&g| {
            let bound = (-g * params.l).exp();
            wilson(norms.iter().filter(|&&v| v <= bound).count(), norms.len(), Z95)
        })
        .collect();
    Ok(GoodBoxResult {
        params: params.clone(),
        estimates,
        norms,
        failures,
    })
}

fn split<T>(runs: Vec<Result<T>>) -> (Vec<T>, usize) {
    let mut ok = Vec::with_capacity(runs.len());
    let mut failures = 0;
    for r in runs {
        match r {
            Ok(v) => ok.push(v),
            Err(_) => failures += 1,
        }
    }
    (ok, failures)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedParams {
    pub energy: f64,
    pub l: f64,
    /// Side of the proxy box in units of `l` (at least 3).
    pub proxy_factor: f64,
    pub c_inf: f64,
    pub alpha: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancedTrial {
    pub box_norm: f64,
    pub proxy_norm: f64,
    pub balanced: bool,
    /// Same quantities for the second box of the pair.
    pub other_balanced: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalancedResult {
    pub params: BalancedParams,
    /// Centre offset of the second box, at least `l + c_δ`.
    pub separation: f64,
    pub single: Estimate,
    /// `ℙ(Λ_l(x) or Λ_l(y) balanced)`.
    pub either: Estimate,
    /// Sample correlation of the two indicators.
    pub correlation: f64,
    pub trials: Vec<BalancedTrial>,
    pub failures: usize,
}

fn is_balanced(
    config: &FieldModelConfig,
    p: &BalancedParams,
    sample: &Arc<FieldSample>,
    bx: &BoxSpec,
) -> Result<(f64, f64, bool)> {
    let b = box_operator(config, bx, sample.clone(), &p.grid)?;
    let n_box = block_norm(&b, bx, p.energy)?;
    let proxy = proxy_operator(config, bx, sample, p.proxy_factor, &p.grid)?;
    let n_proxy = block_norm(&proxy, bx, p.energy)?;
    let factor = 1.0 + p.c_inf * p.l.powf(p.alpha);
    Ok((n_box, n_proxy, n_box <= factor * n_proxy))
}

/// Compares the box resolvent block with `(1 + C_∞ l^α)` times the proxy
/// block, and evaluates the two-box event for a second box at distance
/// `⌈l + c_δ⌉`. Both boxes read one position-keyed sample, so their fields
/// are independent exactly when the expanded boxes are disjoint.
pub fn balanced_mc(config: &FieldModelConfig, params: &BalancedParams) -> Result<BalancedResult> {
    if params.proxy_factor < 3.0 {
        return Err(Error::InvalidInput(format!(
            "proxy factor {} must be at least 3",
            params.proxy_factor
        )));
    }
    let separation = (params.l + config.c_delta()).ceil();
    let bx = BoxSpec::new([0.0, 0.0], params.l);
    let by = BoxSpec::new([separation, 0.0], params.l);
    let reach = 0.5 * params.proxy_factor * params.l + config.c_delta();
    let region = Rect::new([-reach, -reach], [separation + reach, reach]);
    let runs = run_indexed(params.trials, |t| -> Result<BalancedTrial> {
        let sample = Arc::new(sample_field(config, region, derive_seed(params.seed, t as u64))?);
        let (box_norm, proxy_norm, balanced) = is_balanced(config, params, &sample, &bx)?;
        let (_, _, other_balanced) = is_balanced(config, params, &sample, &by)?;
        Ok(BalancedTrial {
            box_norm,
            proxy_norm,
            balanced,
            other_balanced,
        })
    });
    let (trials, failures) = split(runs);
    let n = trials.len();
    let single = wilson(trials.iter().filter(|t| t.balanced).count(), n, Z95);
    let either = wilson(trials.iter().filter(|t| t.balanced || t.other_balanced).count(), n, Z95);
    let a: Vec<f64> = trials.iter().map(|t| t.balanced as u8 as f64).collect();
    let b: Vec<f64> = trials.iter().map(|t| t.other_balanced as u8 as f64).collect();
    Ok(BalancedResult {
        params: params.clone(),
        separation,
        single,
        either,
        correlation: correlation(&a, &b),
        trials,
        failures,
    })
}

/// Pearson correlation; zero when either sample is constant.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    if n < 2 {
        return 0.0;
    }
    let ma = a[..n].iter().sum::<f64>() / n as f64;
    let mb = b[..n].iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}
