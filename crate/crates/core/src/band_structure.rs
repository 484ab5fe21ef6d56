//! Classical band edges, extremal-configuration edges, fluctuation constants
//! and the predicted forbidden intervals.

use std::sync::Arc;

use serde::Serialize;

use crate::field_model::{extremal_sample, FieldModelConfig, SampledField, ScalarField, Sign};
use crate::{Error, Point, Rect, Result};

const HALF_DIAG: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// `inf` and `sup` of `(2n+1)B + V` over a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edges {
    pub e_min: f64,
    pub e_max: f64,
    /// Lipschitz margin for points between grid nodes; the true extrema lie
    /// in `[e_min − margin, e_min]` and `[e_max, e_max + margin]`.
    pub margin: f64,
    pub argmin: Point,
    pub argmax: Point,
}

fn norm(g: [f64; 2]) -> f64 {
    g[0].hypot(g[1])
}

/// Grid maximum of `|∇f|` over `cell`.
pub fn gradient_sup(f: &dyn ScalarField, cell: &Rect, resolution: usize) -> f64 {
    cell.grid(resolution)
        .into_iter()
        .map(|p| norm(f.gradient(p)))
        .fold(0.0, f64::max)
}

/// `e_{n,min}[B]`, `e_{n,max}[B]` by a grid scan over `cell`.
pub fn classical_edges(b: &dyn ScalarField, v: &dyn ScalarField, n: usize, cell: &Rect, resolution: usize) -> Edges {
    let c = (2 * n + 1) as f64;
    let n_grid = resolution.max(1);
    let mut lo = (f64::INFINITY, [0.0; 2]);
    let mut hi = (f64::NEG_INFINITY, [0.0; 2]);
    let mut lip: f64 = 0.0;
    let mut lip_v: f64 = 0.0;
    for p in cell.grid(n_grid) {
        let e = c * b.value(p) + v.value(p);
        if e < lo.0 {
            lo = (e, p);
        }
        if e > hi.0 {
            hi = (e, p);
        }
        lip = lip.max(norm(b.gradient(p)));
        lip_v = lip_v.max(norm(v.gradient(p)));
    }
    let spacing = cell.width().max(cell.height()) / n_grid as f64;
    Edges {
        e_min: lo.0,
        e_max: hi.0,
        margin: (c * lip + lip_v) * spacing * HALF_DIAG,
        argmin: lo.1,
        argmax: hi.1,
    }
}

/// Extremal edges `E_n^− = e_{n,min}[B_{ω−}]`, `E_n^+ = e_{n,max}[B_{ω+}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandEdges {
    pub n: usize,
    pub e_minus: f64,
    pub e_plus: f64,
    /// Grid margin of the scans.
    pub grid_margin: f64,
    /// `(2n+1) μ Σ_{k>K_max} σ^(k)`, the effect of the scale truncation.
    pub truncation_margin: f64,
}

/// `B_{ω±}` as a field (extremal configurations are `Z²`-periodic, so a
/// sample covering one cell plus its neighbours suffices for that cell).
pub fn extremal_field(config: &FieldModelConfig, sign: Sign) -> Result<SampledField> {
    let region = Rect::unit_cell().expanded(1.0);
    let s = extremal_sample(config, region, sign)?;
    Ok(SampledField::new(config, Arc::new(s)))
}

pub fn band_edges(config: &FieldModelConfig, n: usize, resolution: usize) -> Result<BandEdges> {
    let cell = Rect::unit_cell();
    let v = config.potential();
    let plus = classical_edges(&extremal_field(config, Sign::Plus)?, &v, n, &cell, resolution);
    let minus = classical_edges(&extremal_field(config, Sign::Minus)?, &v, n, &cell, resolution);
    Ok(BandEdges {
        n,
        e_minus: minus.e_min,
        e_plus: plus.e_max,
        grid_margin: plus.margin.max(minus.margin),
        truncation_margin: (2 * n + 1) as f64 * config.model.mu * config.truncation_bound(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluctuationConstants {
    pub k2_plus: f64,
    pub k2_minus: f64,
    pub k3_plus: f64,
    pub k3_minus: f64,
    /// Upper bound on `ess sup_ω ‖∇B_ω‖_∞ + ‖∇V‖_∞`.
    pub k2: f64,
    /// `(ess sup_ω ‖∇B_ω‖_∞)²` from the same bound.
    pub k3: f64,
    /// Largest change of `|∇B|` between neighbouring grid nodes.
    pub grid_margin: f64,
}

fn gradient_scan(f: &dyn ScalarField, cell: &Rect, resolution: usize) -> (f64, f64) {
    let n = resolution.max(1);
    let pts = cell.grid(n);
    let vals: Vec<f64> = pts.iter().map(|&p| norm(f.gradient(p))).collect();
    let mut var: f64 = 0.0;
    for j in 0..=n {
        for i in 0..=n {
            let k = j * (n + 1) + i;
            if i < n {
                var = var.max((vals[k] - vals[k + 1]).abs());
            }
            if j < n {
                var = var.max((vals[k] - vals[k + n + 1]).abs());
            }
        }
    }
    (vals.iter().cloned().fold(0.0, f64::max), var)
}

/// `sup_x [ |∇B_det| + μ Σ_k M_k 2^k Σ_z |∇u(2^k(x − z))| ]` with
/// `M_k = max(|m₊^(k)|, |m₋^(k)|)`: every admissible configuration has a
/// gradient below this.
fn gradient_bound_any(config: &FieldModelConfig, resolution: usize) -> f64 {
    let det = config.b_det();
    let profile = config.profile;
    let r = profile.support_radius();
    let mut best: f64 = 0.0;
    for p in Rect::unit_cell().grid(resolution.max(1)) {
        let mut g = norm(det.gradient(p));
        for k in 0..=config.model.k_max {
            let sig = config.sigma(k);
            let (a, b) = config.dist.support(k, sig);
            let m = a.abs().max(b.abs());
            if m == 0.0 {
                continue;
            }
            let scale = 2f64.powi(k as i32);
            let t = [scale * p[0], scale * p[1]];
            let mut s = 0.0;
            for j in ((t[1] - r).ceil() as i64)..=((t[1] + r).floor() as i64) {
                for i in ((t[0] - r).ceil() as i64)..=((t[0] + r).floor() as i64) {
                    s += norm(profile.gradient([t[0] - i as f64, t[1] - j as f64]));
                }
            }
            g += config.model.mu * m * scale * s;
        }
        best = best.max(g);
    }
    best
}

pub fn fluctuation_constants(config: &FieldModelConfig, resolution: usize) -> Result<FluctuationConstants> {
    let cell = Rect::unit_cell();
    let v = config.potential();
    let gv = gradient_sup(&v, &cell, resolution);
    let (gp, mp) = gradient_scan(&extremal_field(config, Sign::Plus)?, &cell, resolution);
    let (gm, mm) = gradient_scan(&extremal_field(config, Sign::Minus)?, &cell, resolution);
    let g_any = gradient_bound_any(config, resolution);
    Ok(FluctuationConstants {
        k2_plus: gp + gv,
        k2_minus: gm + gv,
        k3_plus: gp * gp,
        k3_minus: gm * gm,
        k2: g_any + gv,
        k3: g_any * g_any,
        grid_margin: mp.max(mm),
    })
}

/// `(Î_n^+, Î_{n+1}^−)`; flagged empty when the endpoints cross.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForbiddenInterval {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub c_ext: f64,
    /// `K̂₂ B₀^(−1/2) + K̂₃ B₀^(−2)`.
    pub correction: f64,
    pub k2_hat: f64,
    pub k3_hat: f64,
    pub e_n_max: f64,
    pub e_n1_min: f64,
    pub empty: bool,
}

impl ForbiddenInterval {
    pub fn contains(&self, e: f64) -> bool {
        !self.empty && e > self.lower && e < self.upper
    }
}

/// Forbidden interval above level `n` for an explicit field `B = B₀ + B₁`.
///
/// `c1` is the sandwich constant: `B₀/c1 ≤ B ≤ c1·B₀` must hold on the scan.
#[allow(clippy::too_many_arguments)]
pub fn forbidden_interval(
    b: &dyn ScalarField,
    v: &dyn ScalarField,
    b0: f64,
    n: usize,
    c_ext: f64,
    c1: f64,
    cell: &Rect,
    resolution: usize,
) -> Result<ForbiddenInterval> {
    if !(c_ext > 0.0) {
        return Err(Error::InvalidInput(format!("C_ext = {c_ext} must be positive")));
    }
    let lo_hi = classical_edges(b, &crate::field_model::PeriodicExpr::zero(), 0, cell, resolution);
    if lo_hi.e_min < b0 / c1 || lo_hi.e_max > c1 * b0 {
        return Err(Error::Domain(format!(
            "field range [{}, {}] violates the sandwich [{}, {}]",
            lo_hi.e_min,
            lo_hi.e_max,
            b0 / c1,
            c1 * b0
        )));
    }
    let gb = gradient_sup(b, cell, resolution);
    let gv = gradient_sup(v, cell, resolution);
    let k2_hat = gb + gv;
    let k3_hat = gb * gb;
    let correction = k2_hat / b0.sqrt() + k3_hat / (b0 * b0);
    let en = classical_edges(b, v, n, cell, resolution);
    let en1 = classical_edges(b, v, n + 1, cell, resolution);
    let lower = en.e_max + c_ext * correction;
    let upper = en1.e_min - c_ext * correction;
    Ok(ForbiddenInterval {
        n,
        lower,
        upper,
        c_ext,
        correction,
        k2_hat,
        k3_hat,
        e_n_max: en.e_max,
        e_n1_min: en1.e_min,
        empty: lower >= upper,
    })
}

/// `(I_n^+[B_{ω+}], I_{n+1}^−[B_{ω−}])` with the ensemble constants `K₂`,
/// `K₃` (used for the Lifshitz-tail window).
pub fn ensemble_forbidden_interval(
    config: &FieldModelConfig,
    n: usize,
    c_ext: f64,
    resolution: usize,
) -> Result<ForbiddenInterval> {
    let fc = fluctuation_constants(config, resolution)?;
    let b0 = config.model.field_strength;
    let correction = fc.k2 / b0.sqrt() + fc.k3 / (b0 * b0);
    let upper_band = band_edges(config, n, resolution)?;
    let lower_band = band_edges(config, n + 1, resolution)?;
    let lower = upper_band.e_plus + c_ext * correction;
    let upper = lower_band.e_minus - c_ext * correction;
    Ok(ForbiddenInterval {
        n,
        lower,
        upper,
        c_ext,
        correction,
        k2_hat: fc.k2,
        k3_hat: fc.k3,
        e_n_max: upper_band.e_plus,
        e_n1_min: lower_band.e_minus,
        empty: lower >= upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandEstimate {
    pub n: usize,
    pub e_minus: f64,
    pub e_plus: f64,
    pub lower: f64,
    pub upper: f64,
    /// Gap to the next band (negative when they overlap).
    pub gap_above: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaBandReport {
    pub bands: Vec<BandEstimate>,
    pub first_overlap: Option<usize>,
}

/// Per-level estimates `[E_n^− − C_int c^−, E_n^+ + C_int c^+]` with
/// `c^± = K₂^± b₀^(−1/2) + K₃^± b₀^(−2)`.
pub fn sigma_band_report(
    config: &FieldModelConfig,
    n_max: usize,
    c_int: f64,
    resolution: usize,
) -> Result<SigmaBandReport> {
    let fc = fluctuation_constants(config, resolution)?;
    let b0 = config.model.b0;
    let cp = fc.k2_plus / b0.sqrt() + fc.k3_plus / (b0 * b0);
    let cm = fc.k2_minus / b0.sqrt() + fc.k3_minus / (b0 * b0);
    let mut bands = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max + 1 {
        let e = band_edges(config, n, resolution)?;
        bands.push(BandEstimate {
            n,
            e_minus: e.e_minus,
            e_plus: e.e_plus,
            lower: e.e_minus - c_int * cm,
            upper: e.e_plus + c_int * cp,
            gap_above: f64::INFINITY,
        });
    }
    for i in 0..n_max + 1 {
        bands[i].gap_above = bands[i + 1].lower - bands[i].upper;
    }
    bands.truncate(n_max + 1);
    let first_overlap = bands.iter().find(|b| b.gap_above <= 0.0).map(|b| b.n);
    Ok(SigmaBandReport { bands, first_overlap })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationWindow {
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub epsilon: f64,
    pub empty: bool,
}

/// `I_n = [E_n^+ − ε, E_{n+1}^− + ε]`.
pub fn localization_window(
    config: &FieldModelConfig,
    n: usize,
    epsilon: f64,
    resolution: usize,
) -> Result<LocalizationWindow> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidInput(format!("epsilon = {epsilon} must be positive")));
    }
    let a = band_edges(config, n, resolution)?;
    let b = band_edges(config, n + 1, resolution)?;
    let lower = a.e_plus - epsilon;
    let upper = b.e_minus + epsilon;
    Ok(LocalizationWindow {
        n,
        lower,
        upper,
        epsilon,
        empty: lower > upper,
    })
}
