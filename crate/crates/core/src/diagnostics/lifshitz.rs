//! Intrusion of proxy-box spectrum into the extremal forbidden window.

use serde::{Deserialize, Serialize};

use super::ensemble::{proxy_operator, sample_for_box, GridOptions};
use super::pool::run_indexed;
use super::stats::{wilson, Estimate, Z95};
use crate::band_structure::{ensemble_forbidden_interval, ForbiddenInterval};
use crate::field_model::{derive_seed, FieldModelConfig, Sign};
use crate::gauge::BoxSpec;
use crate::lattice::{eigs_window, WindowOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifshitzParams {
    pub n: usize,
    /// Tail widths `h`.
    pub hs: Vec<f64>,
    pub l: f64,
    pub proxy_factor: f64,
    pub c_ext: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridOptions,
    /// Scan resolution for band edges and fluctuation constants.
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifshitzPoint {
    pub h: f64,
    /// `(I_n^+[B_{ω+}] − (2n+1)μh, I_{n+1}^−[B_{ω−}] + (2n+3)μh)`.
    pub window: (f64, f64),
    pub nu_plus: f64,
    pub nu_minus: f64,
    /// `1 − |Λ̃|(ν₊(h/c_u) + ν₋(h/c_u))`.
    pub bound: f64,
    /// Empirical probability that no interior state lies in the window.
    pub estimate: Estimate,
}

impl LifshitzPoint {
    pub fn bound_positive(&self) -> bool {
        self.bound > 0.0
    }

    /// The estimate is at least the bound (always true when the bound is
    /// vacuous).
    pub fn dominates(&self) -> bool {
        !self.bound_positive() || self.estimate.value >= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifshitzResult {
    pub params: LifshitzParams,
    pub interval: ForbiddenInterval,
    /// Number of scale-0 lattice points in `Λ̃`.
    pub sites: usize,
    pub c_u: f64,
    pub points: Vec<LifshitzPoint>,
    /// Interior eigenvalues met per successful trial (within the widest window).
    pub intruders: Vec<Vec<f64>>,
    pub failures: usize,
}

/// Integer points per axis in the open interval `(c − r, c + r)`.
fn integers_in(c: f64, r: f64) -> usize {
    let lo = (c - r).floor() as i64 + 1;
    let hi = (c + r).ceil() as i64 - 1;
    (hi - lo + 1).max(0) as usize
}

pub fn lifshitz_tail_mc(config: &FieldModelConfig, params: &LifshitzParams) -> Result<LifshitzResult> {
    if params.hs.is_empty() || params.hs.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::InvalidInput("tail widths must be positive".into()));
    }
    let n = params.n;
    let mu = config.model.mu;
    let interval = ensemble_forbidden_interval(config, n, params.c_ext, params.resolution)?;
    let bx = BoxSpec::new([0.0, 0.0], params.l);
    let reach = 0.5 * params.l + config.c_delta();
    let side = integers_in(0.0, reach);
    let sites = side * side;
    let c_u = config.profile.lattice_sum_bounds(params.resolution).c_u;
    if !(c_u > 0.0) {
        return Err(Error::Domain("lattice sum lower bound c_u is not positive".into()));
    }
    let sigma0 = config.sigma(0);
    let windows: Vec<(f64, f64)> = params
        .hs
        .iter()
        .map(|&h| {
            (
                interval.lower - (2 * n + 1) as f64 * mu * h,
                interval.upper + (2 * n + 3) as f64 * mu * h,
            )
        })
        .collect();
    let lo = windows.iter().map(|w| w.0).fold(f64::INFINITY, f64::min);
    let hi = windows.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);

    let runs = run_indexed(params.trials, |t| -> Result<Vec<f64>> {
        if lo >= hi {
            return Ok(Vec::new());
        }
        let sample = sample_for_box(config, &bx, derive_seed(params.seed, t as u64))?;
        let proxy = proxy_operator(config, &bx, &sample, params.proxy_factor, &params.grid)?;
        let res = eigs_window(&proxy.op, lo, hi, &WindowOptions::default())?;
        Ok(proxy.interior_states(&res).into_iter().map(|(e, _)| e).collect())
    });
    let mut intruders = Vec::new();
    let mut failures = 0;
    for r in runs {
        match r {
            Ok(v) => intruders.push(v),
            Err(_) => failures += 1,
        }
    }
    let mut points = Vec::with_capacity(params.hs.len());
    for (&h, &(a, b)) in params.hs.iter().zip(&windows) {
        let nu_plus = config.dist.tail_probability(sigma0, Sign::Plus, h / c_u)?;
        let nu_minus = config.dist.tail_probability(sigma0, Sign::Minus, h / c_u)?;
        let clean = intruders.iter().filter(|v| !v.iter().any(|&e| e > a && e < b)).count();
        points.push(LifshitzPoint {
            h,
            window: (a, b),
            nu_plus,
            nu_minus,
            bound: 1.0 - sites as f64 * (nu_plus + nu_minus),
            estimate: wilson(clean, intruders.len(), Z95),
        });
    }
    Ok(LifshitzResult {
        params: params.clone(),
        interval,
        sites,
        c_u,
        points,
        intruders,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::integers_in;

    #[test]
    fn counts_open_interval_points() {
        assert_eq!(integers_in(0.0, 3.5), 7);
        assert_eq!(integers_in(0.0, 3.0), 5);
        assert_eq!(integers_in(0.0, 0.4), 1);
    }
}
