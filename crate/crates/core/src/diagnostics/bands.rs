//! Band-level checks on lattice spectra: Landau clustering, the band
//! sandwich, forbidden intervals and the scaling of the gap edge.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ensemble::{box_operator, sample_for_box, BoxOperator, GridOptions, INTERIOR_MASS};
use super::pool::run_indexed;
use super::stats::{linear_fit, LinearFit};
use crate::band_structure::{band_edges, forbidden_interval, BandEdges, ForbiddenInterval};
use crate::field_model::{derive_seed, FieldModelConfig, PeriodicExpr, SampledField};
use crate::gauge::{symmetric_gauge, BoxSpec};
use crate::lattice::{assemble, eigs_window, torus_landau, EigenResult, TorusSpec, WindowOptions};
use crate::{Error, Result};

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[k]
    } else {
        0.5 * (v[k - 1] + v[k])
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCluster {
    pub level: f64,
    /// Interior states assigned to this level (nearest level).
    pub count: usize,
    /// Median `|λ − level|` over the assigned states.
    pub median_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub cutoff: f64,
    pub tolerance: f64,
    /// Interior states below the cutoff.
    pub interior: usize,
    /// Those within `tolerance` of a level.
    pub within: usize,
    pub levels: Vec<LevelCluster>,
}

impl ClusterReport {
    pub fn fraction(&self) -> f64 {
        if self.interior == 0 {
            0.0
        } else {
            self.within as f64 / self.interior as f64
        }
    }

    /// Largest per-level median deviation.
    pub fn deviation(&self) -> f64 {
        self.levels
            .iter()
            .filter_map(|c| c.median_deviation)
            .fold(0.0, f64::max)
    }
}

/// Assigns the interior states of `op` below `cutoff` to the nearest of
/// `levels` and measures how tightly they cluster.
pub fn landau_clusters(
    op: &BoxOperator,
    res: &EigenResult,
    levels: &[f64],
    cutoff: f64,
    tolerance: f64,
) -> Result<ClusterReport> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("no reference levels".into()));
    }
    let states: Vec<f64> = op
        .interior_states(res)
        .into_iter()
        .map(|(e, _)| e)
        .filter(|&e| e < cutoff)
        .collect();
    let mut assigned = vec![Vec::new(); levels.len()];
    let mut within = 0;
    for &e in &states {
        let (k, d) = levels
            .iter()
            .map(|l| (e - l).abs())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("levels not empty");
        if d <= tolerance {
            within += 1;
        }
        assigned[k].push(d);
    }
    let levels = levels
        .iter()
        .zip(assigned)
        .map(|(&level, d)| LevelCluster {
            level,
            count: d.len(),
            median_deviation: median(d),
        })
        .collect();
    Ok(ClusterReport {
        cutoff,
        tolerance,
        interior: states.len(),
        within,
        levels,
    })
}

/// Constant field `b` on `bx` in the symmetric gauge, `V = 0`.
pub fn constant_field_box(b: f64, bx: &BoxSpec, grid: &GridOptions) -> Result<BoxOperator> {
    let gauge = symmetric_gauge(b, bx.center);
    let op = assemble(bx.rect(), &gauge, &PeriodicExpr::zero(), grid.h, grid.stencil)?;
    Ok(BoxOperator::new(op, *bx))
}

/// Interior states of a constant-field box near level `n`.
fn level_states(b: f64, n: usize, side: f64, grid: &GridOptions) -> Result<Vec<f64>> {
    let bx = BoxSpec::new([0.0, 0.0], side);
    let op = constant_field_box(b, &bx, grid)?;
    let level = (2 * n + 1) as f64 * b;
    let res = eigs_window(&op.op, level - b, level + b, &WindowOptions::default())?;
    Ok(op.interior_states(&res).into_iter().map(|(e, _)| e).collect())
}

/// Lattice Landau level `n` of the constant field `b` on `grid`: the median
/// of the states of a box `16 b^(−1/2)` wide that keep at least
/// `INTERIOR_MASS` of their weight in its central half.
pub fn lattice_level(b: f64, n: usize, grid: &GridOptions) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("field {b} is not positive")));
    }
    let side = (16.0 / (b.sqrt() * grid.h)).ceil().max(16.0) * grid.h;
    let bx = BoxSpec::new([0.0, 0.0], side);
    let op = constant_field_box(b, &bx, grid)?;
    let level = (2 * n + 1) as f64 * b;
    let res = eigs_window(&op.op, level - b, level + b, &WindowOptions::default())?;
    let outer = op.op.mask(|p| p[0].abs().max(p[1].abs()) > 0.25 * side);
    let states: Vec<f64> = (0..res.len())
        .filter(|&k| res.mass_fraction(k, &outer).is_some_and(|m| m <= 1.0 - INTERIOR_MASS))
        .map(|k| res.values[k])
        .collect();
    median(states).ok_or_else(|| Error::Domain(format!("no bulk states near level {level}")))
}

/// Largest shift `|λ − (2n+1)b|` of interior states of constant-field boxes
/// with `b` at either end of `[b_lo, b_hi]`, on the given grid.
pub fn discretization_budget(b_lo: f64, b_hi: f64, n: usize, side: f64, grid: &GridOptions) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for b in [b_lo, b_hi] {
        if !(b > 0.0) {
            return Err(Error::Domain(format!("field {b} is not positive")));
        }
        let level = (2 * n + 1) as f64 * b;
        let states = level_states(b, n, side, grid)?;
        if states.is_empty() {
            return Err(Error::Domain(format!(
                "no interior states near level {level} in a box of side {side}"
            )));
        }
        worst = states.iter().map(|e| (e - level).abs()).fold(worst, f64::max);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichParams {
    pub n: usize,
    pub l: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridOptions,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichResult {
    pub params: SandwichParams,
    pub edges: BandEdges,
    pub budget: f64,
    /// `truncation + grid + discretization`.
    pub margin: f64,
    /// Energies searched: halfway to the neighbouring bands.
    pub window: (f64, f64),
    pub states: Vec<Vec<f64>>,
    pub violations: usize,
    pub failures: usize,
}

impl SandwichResult {
    pub fn allowed(&self) -> (f64, f64) {
        (self.edges.e_minus - self.margin, self.edges.e_plus + self.margin)
    }
}

/// Checks that the interior states of sampled boxes near band `n` stay in
/// `[E_n^− − m, E_n^+ + m]`.
pub fn band_sandwich_mc(config: &FieldModelConfig, params: &SandwichParams) -> Result<SandwichResult> {
    let n = params.n;
    let b0 = config.model.field_strength;
    let edges = band_edges(config, n, params.resolution)?;
    let above = band_edges(config, n + 1, params.resolution)?;
    if edges.e_plus >= above.e_minus {
        return Err(Error::Domain(format!("band {n} overlaps band {}", n + 1)));
    }
    let lower = if n == 0 {
        edges.e_minus - b0
    } else {
        let below = band_edges(config, n - 1, params.resolution)?;
        if below.e_plus >= edges.e_minus {
            return Err(Error::Domain(format!("band {n} overlaps band {}", n - 1)));
        }
        0.5 * (below.e_plus + edges.e_minus)
    };
    let window = (lower, 0.5 * (edges.e_plus + above.e_minus));
    let c = (2 * n + 1) as f64;
    let v = config.potential();
    let (b_lo, b_hi) = ((edges.e_minus - v.sup_bound()) / c, (edges.e_plus + v.sup_bound()) / c);
    let budget = discretization_budget(b_lo.max(f64::MIN_POSITIVE), b_hi, n, params.l, &params.grid)?;
    let margin = edges.truncation_margin + edges.grid_margin + budget;

    let bx = BoxSpec::new([0.0, 0.0], params.l);
    let runs = run_indexed(params.trials, |t| -> Result<Vec<f64>> {
        let sample = sample_for_box(config, &bx, derive_seed(params.seed, t as u64))?;
        let op = box_operator(config, &bx, Arc::new(sample), &params.grid)?;
        let res = eigs_window(&op.op, window.0, window.1, &WindowOptions::default())?;
        Ok(op.interior_states(&res).into_iter().map(|(e, _)| e).collect())
    });
    let (lo, hi) = (edges.e_minus - margin, edges.e_plus + margin);
    let mut states = Vec::new();
    let mut failures = 0;
    let mut violations = 0;
    for r in runs {
        match r {
            Ok(s) => {
                violations += s.iter().filter(|&&e| e < lo || e > hi).count();
                states.push(s);
            }
            Err(_) => failures += 1,
        }
    }
    Ok(SandwichResult {
        params: params.clone(),
        edges,
        budget,
        margin,
        window,
        states,
        violations,
        failures,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForbiddenParams {
    pub n: usize,
    pub l: f64,
    pub c_ext: f64,
    /// Sandwich constant `C₁`.
    pub c1: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridOptions,
    pub resolution: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForbiddenTrial {
    pub interval: ForbiddenInterval,
    /// Interior states between `e_{n,max}` and `e_{n+1,min}`.
    pub gap_states: Vec<f64>,
}

impl ForbiddenTrial {
    pub fn intruders(&self) -> usize {
        self.gap_states.iter().filter(|&&e| self.interval.contains(e)).count()
    }

    /// Smallest `C_ext` that keeps every gap state out of the interval.
    pub fn needed_c_ext(&self) -> f64 {
        let iv = &self.interval;
        if !(iv.correction > 0.0) {
            return 0.0;
        }
        self.gap_states
            .iter()
            .map(|&e| ((e - iv.e_n_max).min(iv.e_n1_min - e) / iv.correction).max(0.0))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForbiddenResult {
    pub params: ForbiddenParams,
    pub trials: Vec<ForbiddenTrial>,
    pub failures: usize,
}

impl ForbiddenResult {
    pub fn intruders(&self) -> usize {
        self.trials.iter().map(ForbiddenTrial::intruders).sum()
    }

    pub fn needed_c_ext(&self) -> f64 {
        self.trials.iter().map(ForbiddenTrial::needed_c_ext).fold(0.0, f64::max)
    }
}

/// Per-sample forbidden interval `Î_n` of `B_ω` over the box, and the
/// interior lattice states that fall between the classical edges.
pub fn forbidden_interval_mc(config: &FieldModelConfig, params: &ForbiddenParams) -> Result<ForbiddenResult> {
    let b0 = config.model.field_strength;
    let bx = BoxSpec::new([0.0, 0.0], params.l);
    let cell = bx.rect();
    let v = config.potential();
    let runs = run_indexed(params.trials, |t| -> Result<ForbiddenTrial> {
        let sample = Arc::new(sample_for_box(config, &bx, derive_seed(params.seed, t as u64))?);
        let field = SampledField::new(config, sample.clone());
        let interval = forbidden_interval(
            &field,
            &v,
            b0,
            params.n,
            params.c_ext,
            params.c1,
            &cell,
            params.resolution,
        )?;
        let op = box_operator(config, &bx, sample, &params.grid)?;
        let (a, b) = (interval.e_n_max, interval.e_n1_min);
        let gap_states = if a < b {
            let res = eigs_window(&op.op, a, b, &WindowOptions::default())?;
            op.interior_states(&res).into_iter().map(|(e, _)| e).collect()
        } else {
            Vec::new()
        };
        Ok(ForbiddenTrial { interval, gap_states })
    });
    let mut trials = Vec::new();
    let mut failures = 0;
    for r in runs {
        match r {
            Ok(t) => trials.push(t),
            Err(_) => failures += 1,
        }
    }
    Ok(ForbiddenResult {
        params: params.clone(),
        trials,
        failures,
    })
}

/// Safety factor applied to the calibrated `C_ext`.
pub const CALIBRATION_SAFETY: f64 = 2.0;
/// Smallest calibrated `C_ext`.
pub const CALIBRATION_FLOOR: f64 = 0.1;

/// `C_ext` fitted on calibration samples: the largest value needed to
/// exclude every gap state, times the safety factor, floored.
pub fn calibrate_c_ext(config: &FieldModelConfig, params: &ForbiddenParams) -> Result<f64> {
    let res = forbidden_interval_mc(config, params)?;
    if res.trials.is_empty() {
        return Err(Error::NoConvergence("every calibration trial failed".into()));
    }
    Ok((CALIBRATION_SAFETY * res.needed_c_ext()).max(CALIBRATION_FLOOR))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeScalingParams {
    pub n: usize,
    pub b0s: Vec<f64>,
    /// Mean-free periodic part of the field.
    pub b_var: PeriodicExpr,
    /// Target `B₀h²`; the grid step is the largest `1/m` meeting it.
    pub b0_h2: f64,
    pub side: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePoint {
    pub b0: f64,
    pub h: f64,
    /// `(2n+1) max B`.
    pub classical: f64,
    /// Lattice level `n` of the constant field `max B` on the same grid.
    pub reference: f64,
    /// Top of lattice band `n` on the torus.
    pub top: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeScaling {
    pub params: EdgeScalingParams,
    pub points: Vec<EdgePoint>,
    /// Fit of `log distance` against `log B₀`.
    pub fit: Option<LinearFit>,
}

/// Distance between the top of lattice band `n` for `B₀ + b_var` on a torus
/// and the lattice Landau level of the constant field `max B`.
pub fn edge_scaling(params: &EdgeScalingParams) -> Result<EdgeScaling> {
    if !(params.side > 0.0 && params.b0_h2 > 0.0) || params.b0s.is_empty() {
        return Err(Error::InvalidInput(
            "edge scan needs a side, a B₀h² target and field strengths".into(),
        ));
    }
    let n = params.n;
    let c = (2 * n + 1) as f64;
    let mut points = Vec::with_capacity(params.b0s.len());
    for &b in &params.b0s {
        let b0 = TorusSpec::quantized_field(b, params.side);
        let m = (params.side * (b0 / params.b0_h2).sqrt()).ceil() as usize;
        let spec = TorusSpec {
            b0,
            side: params.side,
            m,
        };
        let h = spec.h();
        let op = torus_landau(&spec, &params.b_var, &PeriodicExpr::zero())?;
        let band = eigs_window(
            &op,
            (c - 1.0) * b0,
            (c + 1.0) * b0,
            &WindowOptions {
                vectors: false,
                ..WindowOptions::default()
            },
        )?;
        let top = band.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::Domain(format!("no states in band {n} at B₀ = {b0}")));
        }
        let cell = crate::Rect::new([0.0, 0.0], [params.side, params.side]);
        let b_max = cell
            .grid(400)
            .into_iter()
            .map(|p| b0 + params.b_var.value(p))
            .fold(f64::NEG_INFINITY, f64::max);
        let reference = lattice_level(b_max, n, &GridOptions::new(h))?;
        points.push(EdgePoint {
            b0,
            h,
            classical: c * b_max,
            reference,
            top,
            distance: reference - top,
        });
    }
    let usable: Vec<&EdgePoint> = points.iter().filter(|p| p.distance > 0.0).collect();
    let fit = (usable.len() >= 2).then(|| {
        let x: Vec<f64> = usable.iter().map(|p| p.b0.ln()).collect();
        let y: Vec<f64> = usable.iter().map(|p| p.distance.ln()).collect();
        linear_fit(&x, &y)
    });
    Ok(EdgeScaling {
        params: params.clone(),
        points,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(Vec::new()), None);
    }

    #[test]
    fn constant_field_budget_is_small_and_grows_with_h() {
        let fine = discretization_budget(4.0, 4.0, 0, 5.0, &GridOptions::new(0.1)).unwrap();
        let coarse = discretization_budget(4.0, 4.0, 0, 5.0, &GridOptions::new(0.2)).unwrap();
        assert!(fine < coarse, "{fine} vs {coarse}");
        assert!(coarse < 0.2 * 4.0);
    }
}
