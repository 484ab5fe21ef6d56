//! Machine checks of the model assumptions.

use serde::Serialize;

use super::config::FieldModelConfig;
use super::distribution::{DistShape, Sign};
use crate::{Error, Point, Rect, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity and the bound it is compared against.
    pub value: f64,
    pub bound: f64,
    /// Grid point where a field check is tightest (or fails).
    pub witness: Option<Point>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub resolution: usize,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn check(name: &'static str, passed: bool, value: f64, bound: f64, detail: impl Into<String>) -> Check {
    Check {
        name,
        passed,
        value,
        bound,
        witness: None,
        detail: detail.into(),
    }
}

/// Scans one unit cell and returns `(min, argmin, max, argmax)`.
pub(crate) fn scan_cell(f: impl Fn(Point) -> f64, cell: &Rect, resolution: usize) -> (f64, Point, f64, Point) {
    let mut lo = (f64::INFINITY, [0.0; 2]);
    let mut hi = (f64::NEG_INFINITY, [0.0; 2]);
    for p in cell.grid(resolution) {
        let v = f(p);
        if v < lo.0 {
            lo = (v, p);
        }
        if v > hi.0 {
            hi = (v, p);
        }
    }
    (lo.0, lo.1, hi.0, hi.1)
}

/// Checks every assumption on a grid with `resolution` cells per unit side.
/// Violations are reported, not returned as errors.
pub fn validate_model(config: &FieldModelConfig, resolution: usize) -> Result<ValidationReport> {
    if resolution < 16 {
        return Err(Error::Config(format!(
            "grid resolution {resolution} is below the minimum of 16 per unit cell"
        )));
    }
    config.check()?;
    let m = &config.model;
    let mut checks = Vec::new();
    let ln2 = std::f64::consts::LN_2;

    checks.push(check(
        "rho_gt_ln2",
        m.rho > ln2,
        m.rho,
        ln2,
        "decay rate must exceed ln 2 for a differentiable random field",
    ));
    checks.push(check("k0_gt_3", m.k0 > 3.0, m.k0, 3.0, "K0 > 3"));
    checks.push(check("mu_range", m.mu > 0.0 && m.mu <= 1.0, m.mu, 1.0, "0 < mu <= 1"));
    checks.push(check("b0_positive", m.b0 > 0.0, m.b0, 0.0, "b0 > 0"));
    let d0 = config.profile.delta0();
    checks.push(check(
        "delta_le_delta0",
        config.profile.delta <= d0,
        config.profile.delta,
        d0,
        format!("{:?} profile", config.profile.family),
    ));

    let cell = Rect::unit_cell();
    let spacing = 1.0 / resolution as f64;
    let half_diag = spacing * std::f64::consts::FRAC_1_SQRT_2;

    let b_det = config.b_det();
    let (lo, lo_at, hi, hi_at) = scan_cell(|x| b_det.value(x), &cell, resolution);
    let margin = b_det.gradient_bound() * half_diag;
    let lower = 2.0 * m.b0;
    let upper = (m.k0 - 1.0) * m.b0;
    let mut c = check(
        "detbound_lower",
        lo - margin >= lower,
        lo - margin,
        lower,
        format!("inf B_det = {lo} (margin {margin:.3e}) against 2 b0"),
    );
    c.witness = Some(lo_at);
    checks.push(c);
    let mut c = check(
        "detbound_upper",
        hi + margin <= upper,
        hi + margin,
        upper,
        format!("sup B_det = {hi} (margin {margin:.3e}) against (K0 - 1) b0"),
    );
    c.witness = Some(hi_at);
    checks.push(c);

    let total = config.sigma_total();
    checks.push(check(
        "sigma_sum_le_b0",
        total <= m.b0,
        total,
        m.b0,
        "sum of sigma_k over all scales",
    ));

    let v = config.potential();
    let (vlo, vlo_at, vhi, vhi_at) = scan_cell(|x| v.value(x), &cell, resolution);
    let vmargin = v.gradient_bound() * half_diag;
    let vsup = vlo.abs().max(vhi.abs()) + vmargin;
    let mut c = check(
        "potential_bound",
        vsup <= m.b0 / 4.0,
        vsup,
        m.b0 / 4.0,
        "sup |V| against b0/4",
    );
    c.witness = Some(if vlo.abs() > vhi.abs() { vlo_at } else { vhi_at });
    checks.push(c);

    let sums = config.profile.lattice_sum_bounds(resolution);
    checks.push(check(
        "profile_sum_le_1",
        sums.sup_ok,
        sums.sup,
        1.0,
        format!("c_u = {:.6}", sums.c_u),
    ));

    if config.dist.shape == DistShape::Bump {
        let mut worst_mass: f64 = 0.0;
        let mut worst_mean: f64 = 0.0;
        let mut worst_c2: f64 = 0.0;
        for k in 0..=m.k_max {
            let sig = config.sigma(k);
            if sig == 0.0 {
                continue;
            }
            let (m0, m1) = config.dist.moments(k, sig);
            worst_mass = worst_mass.max((m0 - 1.0).abs());
            worst_mean = worst_mean.max((m1 / sig).abs());
            let d2 = config.dist.second_derivative_mass(k, sig);
            worst_c2 = worst_c2.max(d2 * (-2.0 * m.rho * k as f64).exp());
        }
        checks.push(check("dist_unit_mass", worst_mass < 1e-8, worst_mass, 1e-8, "|∫v - 1|"));
        checks.push(check(
            "dist_mean_zero",
            worst_mean < 1e-8,
            worst_mean,
            1e-8,
            "|mean| / sigma_k",
        ));
        checks.push(check(
            "dist_second_derivative",
            worst_c2 <= config.dist.c_2der,
            worst_c2,
            config.dist.c_2der,
            "max_k e^(-2 rho k) ∫|v_k''|",
        ));
        let sig0 = config.sigma(0);
        let (a, b) = config.dist.support(0, sig0);
        let width = b - a;
        let mut worst_ratio: f64 = 0.0;
        let nh = 200;
        for i in 1..=nh {
            let h = width * i as f64 / nh as f64;
            for sign in [Sign::Plus, Sign::Minus] {
                let p = config.dist.tail_probability(sig0, sign, h)?;
                worst_ratio = worst_ratio.max(p / h.powf(config.dist.tau));
            }
        }
        checks.push(check(
            "tail_bound",
            worst_ratio <= config.dist.c_v,
            worst_ratio,
            config.dist.c_v,
            "sup_h nu_±(h) / h^tau on the scale-0 support",
        ));
    }

    Ok(ValidationReport { resolution, checks })
}
