//! Evaluable scalar fields: `B_det`, `V`, and sampled `B_ω`.

use std::sync::Arc;

use super::config::FieldModelConfig;
use super::expr::PeriodicExpr;
use super::profile::ProfileSpec;
use super::sample::FieldSample;
use crate::{Error, Point, Result};

/// A scalar field on the plane with its gradient.
///
/// `integral_x`/`integral_y` return closed-form segment integrals when the
/// field can provide them; callers fall back to quadrature otherwise.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: Point) -> f64;
    fn gradient(&self, x: Point) -> [f64; 2];

    /// `∫_a^b f(ξ, y) dξ`.
    fn integral_x(&self, _y: f64, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    /// `∫_a^b f(x, ξ) dξ`.
    fn integral_y(&self, _x: f64, _a: f64, _b: f64) -> Option<f64> {
        None
    }

    fn is_periodic(&self) -> bool {
        false
    }
}

impl ScalarField for PeriodicExpr {
    fn value(&self, x: Point) -> f64 {
        PeriodicExpr::value(self, x)
    }
    fn gradient(&self, x: Point) -> [f64; 2] {
        PeriodicExpr::gradient(self, x)
    }
    fn integral_x(&self, y: f64, a: f64, b: f64) -> Option<f64> {
        Some(PeriodicExpr::integral_x(self, y, a, b))
    }
    fn integral_y(&self, x: f64, a: f64, b: f64) -> Option<f64> {
        Some(PeriodicExpr::integral_y(self, x, a, b))
    }
    fn is_periodic(&self) -> bool {
        true
    }
}

impl<T: ScalarField + ?Sized> ScalarField for Arc<T> {
    fn value(&self, x: Point) -> f64 {
        (**self).value(x)
    }
    fn gradient(&self, x: Point) -> [f64; 2] {
        (**self).gradient(x)
    }
    fn integral_x(&self, y: f64, a: f64, b: f64) -> Option<f64> {
        (**self).integral_x(y, a, b)
    }
    fn integral_y(&self, x: f64, a: f64, b: f64) -> Option<f64> {
        (**self).integral_y(x, a, b)
    }
    fn is_periodic(&self) -> bool {
        (**self).is_periodic()
    }
}

/// Field given by closures; no closed-form integrals.
pub struct FnField<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> ScalarField for FnField<F, G>
where
    F: Fn(Point) -> f64 + Send + Sync,
    G: Fn(Point) -> [f64; 2] + Send + Sync,
{
    fn value(&self, x: Point) -> f64 {
        (self.value)(x)
    }
    fn gradient(&self, x: Point) -> [f64; 2] {
        (self.gradient)(x)
    }
}

/// `det(x) + μ Σ_k Σ_z ω_z^(k) u(2^k(x − z))` for a stored sample.
///
/// Coefficients that are not stored count as zero; [`SampledField::try_value`]
/// refuses points where that would truncate the sum.
#[derive(Debug, Clone)]
pub struct SampledField {
    pub det: PeriodicExpr,
    pub mu: f64,
    pub profile: ProfileSpec,
    pub sample: Arc<FieldSample>,
}

impl SampledField {
    /// `B_ω = B_det + μ B_ran^ω`.
    pub fn new(config: &FieldModelConfig, sample: Arc<FieldSample>) -> Self {
        Self {
            det: config.b_det(),
            mu: config.model.mu,
            profile: config.profile,
            sample,
        }
    }

    /// `μ B_ran^ω` without the deterministic part.
    pub fn random_part(config: &FieldModelConfig, sample: Arc<FieldSample>) -> Self {
        Self {
            det: PeriodicExpr::zero(),
            mu: config.model.mu,
            profile: config.profile,
            sample,
        }
    }

    fn covers(&self, x: Point) -> bool {
        self.sample.zero_outside || self.sample.region.contains(x)
    }

    pub fn try_value(&self, x: Point) -> Result<f64> {
        if self.covers(x) {
            Ok(self.value(x))
        } else {
            Err(Error::OutsideRegion(x))
        }
    }

    pub fn try_gradient(&self, x: Point) -> Result<[f64; 2]> {
        if self.covers(x) {
            Ok(self.gradient(x))
        } else {
            Err(Error::OutsideRegion(x))
        }
    }

    fn index_range(&self, t: f64, lo: i64, n: usize) -> std::ops::RangeInclusive<i64> {
        let r = self.profile.support_radius();
        let a = ((t - r).ceil() as i64).max(lo);
        let b = ((t + r).floor() as i64).min(lo + n as i64 - 1);
        a..=b
    }

    /// `(Σ ω p(t₁−i) p(t₂−j), Σ ω p'(t₁−i) p(t₂−j), Σ ω p(t₁−i) p'(t₂−j))`
    /// on each scale, weighted by the chain-rule factor `2^k` for derivatives.
    fn random_terms(&self, x: Point, want_gradient: bool) -> (f64, [f64; 2]) {
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for s in &self.sample.scales {
            let scale = 2f64.powi(s.k as i32);
            let t = [scale * x[0], scale * x[1]];
            let ri = self.index_range(t[0], s.i0, s.ni);
            let rj = self.index_range(t[1], s.j0, s.nj);
            for j in rj {
                let dy = t[1] - j as f64;
                let py = self.profile.factor(dy);
                let dpy = if want_gradient {
                    self.profile.factor_derivative(dy)
                } else {
                    0.0
                };
                let row = (j - s.j0) as usize * s.ni;
                for i in ri.clone() {
                    let w = s.omega[row + (i - s.i0) as usize];
                    if w == 0.0 {
                        continue;
                    }
                    let dx = t[0] - i as f64;
                    let px = self.profile.factor(dx);
                    v += w * px * py;
                    if want_gradient {
                        g[0] += w * scale * self.profile.factor_derivative(dx) * py;
                        g[1] += w * scale * px * dpy;
                    }
                }
            }
        }
        (v, g)
    }

    fn random_integral(&self, along: usize, fixed: f64, a: f64, b: f64) -> f64 {
        let mut acc = 0.0;
        let (lo_end, hi_end) = if a <= b { (a, b) } else { (b, a) };
        for s in &self.sample.scales {
            let scale = 2f64.powi(s.k as i32);
            let h = 1.0 / scale;
            let (along_lo, along_n, fixed_lo, fixed_n) = if along == 0 {
                (s.i0, s.ni, s.j0, s.nj)
            } else {
                (s.j0, s.nj, s.i0, s.ni)
            };
            let tf = scale * fixed;
            let r = self.profile.support_radius();
            let ia = ((scale * lo_end - r).ceil() as i64).max(along_lo);
            let ib = ((scale * hi_end + r).floor() as i64).min(along_lo + along_n as i64 - 1);
            for m in self.index_range(tf, fixed_lo, fixed_n) {
                let pf = self.profile.factor(tf - m as f64);
                if pf == 0.0 {
                    continue;
                }
                for q in ia..=ib {
                    let w = if along == 0 { s.get(q, m) } else { s.get(m, q) }.unwrap_or(0.0);
                    if w == 0.0 {
                        continue;
                    }
                    let seg = self.profile.factor_antiderivative(scale * b - q as f64)
                        - self.profile.factor_antiderivative(scale * a - q as f64);
                    acc += w * pf * h * seg;
                }
            }
        }
        acc
    }
}

impl ScalarField for SampledField {
    fn value(&self, x: Point) -> f64 {
        self.det.value(x) + self.mu * self.random_terms(x, false).0
    }

    fn gradient(&self, x: Point) -> [f64; 2] {
        let gd = self.det.gradient(x);
        let (_, gr) = self.random_terms(x, true);
        [gd[0] + self.mu * gr[0], gd[1] + self.mu * gr[1]]
    }

    fn integral_x(&self, y: f64, a: f64, b: f64) -> Option<f64> {
        Some(self.det.integral_x(y, a, b) + self.mu * self.random_integral(0, y, a, b))
    }

    fn integral_y(&self, x: f64, a: f64, b: f64) -> Option<f64> {
        Some(self.det.integral_y(x, a, b) + self.mu * self.random_integral(1, x, a, b))
    }
}

/// `B_ω(x)` for a sampled configuration.
pub fn field_value(config: &FieldModelConfig, sample: &Arc<FieldSample>, x: Point) -> Result<f64> {
    SampledField::new(config, sample.clone()).try_value(x)
}

/// `∇B_ω(x)` by term-wise differentiation.
pub fn field_gradient(config: &FieldModelConfig, sample: &Arc<FieldSample>, x: Point) -> Result<[f64; 2]> {
    SampledField::new(config, sample.clone()).try_gradient(x)
}
