//! Vector potentials `A` with `∂₁A₂ − ∂₂A₁ = B` and Peierls link phases.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field_model::{FieldModelConfig, FieldSample, SampledField, ScalarField};
use crate::quadrature::{adaptive_gk, GAUSS3_NODES, GAUSS3_WEIGHTS};
use crate::{Error, Point, Rect, Result};

/// Default tolerance of the line-integral quadrature.
pub const GAUGE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeFamily {
    Symmetric,
    LineIntegral,
    Subordinate,
    Custom,
}

pub trait VectorPotential: Send + Sync {
    fn potential(&self, x: Point) -> Result<[f64; 2]>;
    fn family(&self) -> GaugeFamily;
    fn base_point(&self) -> Point;
}

impl<T: VectorPotential + ?Sized> VectorPotential for Arc<T> {
    fn potential(&self, x: Point) -> Result<[f64; 2]> {
        (**self).potential(x)
    }
    fn family(&self) -> GaugeFamily {
        (**self).family()
    }
    fn base_point(&self) -> Point {
        (**self).base_point()
    }
}

/// `A(x) = (−(B₀/2)(x₂ − u₂), (B₀/2)(x₁ − u₁))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetricGauge {
    pub b0: f64,
    pub center: Point,
}

pub fn symmetric_gauge(b0: f64, center: Point) -> SymmetricGauge {
    SymmetricGauge { b0, center }
}

impl VectorPotential for SymmetricGauge {
    fn potential(&self, x: Point) -> Result<[f64; 2]> {
        let h = 0.5 * self.b0;
        Ok([-h * (x[1] - self.center[1]), h * (x[0] - self.center[0])])
    }
    fn family(&self) -> GaugeFamily {
        GaugeFamily::Symmetric
    }
    fn base_point(&self) -> Point {
        self.center
    }
}

/// `A(x) = (−½∫_{u₂}^{x₂} B(x₁, ξ) dξ, ½∫_{u₁}^{x₁} B(ξ, x₂) dξ)`.
///
/// Uses the field's closed-form axis integrals when it has them, adaptive
/// Gauss–Kronrod otherwise (or always, with `force_quadrature`).
#[derive(Clone)]
pub struct LineIntegralGauge {
    pub field: Arc<dyn ScalarField>,
    pub base: Point,
    pub tol: f64,
    pub force_quadrature: bool,
}

pub fn line_integral_gauge(field: Arc<dyn ScalarField>, base: Point) -> LineIntegralGauge {
    LineIntegralGauge {
        field,
        base,
        tol: GAUGE_TOL,
        force_quadrature: false,
    }
}

impl LineIntegralGauge {
    fn along_y(&self, x1: f64, a: f64, b: f64) -> Result<f64> {
        if !self.force_quadrature {
            if let Some(v) = self.field.integral_y(x1, a, b) {
                return Ok(v);
            }
        }
        adaptive_gk(|s| self.field.value([x1, s]), a, b, self.tol, self.tol)
    }

    fn along_x(&self, x2: f64, a: f64, b: f64) -> Result<f64> {
        if !self.force_quadrature {
            if let Some(v) = self.field.integral_x(x2, a, b) {
                return Ok(v);
            }
        }
        adaptive_gk(|s| self.field.value([s, x2]), a, b, self.tol, self.tol)
    }
}

impl VectorPotential for LineIntegralGauge {
    fn potential(&self, x: Point) -> Result<[f64; 2]> {
        let u = self.base;
        Ok([
            -0.5 * self.along_y(x[0], u[1], x[1])?,
            0.5 * self.along_x(x[1], u[0], x[0])?,
        ])
    }
    fn family(&self) -> GaugeFamily {
        GaugeFamily::LineIntegral
    }
    fn base_point(&self) -> Point {
        self.base
    }
}

/// `A_full − δ`, where `δ` is the line-integral gauge of the field outside
/// the expanded box, based at the box centre.
#[derive(Clone)]
pub struct SubordinateGauge {
    pub full: Arc<dyn VectorPotential>,
    pub correction: LineIntegralGauge,
}

impl VectorPotential for SubordinateGauge {
    fn potential(&self, x: Point) -> Result<[f64; 2]> {
        let a = self.full.potential(x)?;
        let d = self.correction.potential(x)?;
        Ok([a[0] - d[0], a[1] - d[1]])
    }
    fn family(&self) -> GaugeFamily {
        GaugeFamily::Subordinate
    }
    fn base_point(&self) -> Point {
        self.correction.base
    }
}

/// `A + ∇λ` for a gauge function given by its gradient.
pub struct PlusGradient<G> {
    pub inner: Arc<dyn VectorPotential>,
    pub grad: G,
}

impl<G: Fn(Point) -> [f64; 2] + Send + Sync> VectorPotential for PlusGradient<G> {
    fn potential(&self, x: Point) -> Result<[f64; 2]> {
        let a = self.inner.potential(x)?;
        let g = (self.grad)(x);
        Ok([a[0] + g[0], a[1] + g[1]])
    }
    fn family(&self) -> GaugeFamily {
        GaugeFamily::Custom
    }
    fn base_point(&self) -> Point {
        self.inner.base_point()
    }
}

/// Square `Λ_l(x)` of side `l` centred at `x`, with the derived regions used
/// by the finite-volume diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub center: Point,
    pub side: f64,
}

impl BoxSpec {
    pub fn new(center: Point, side: f64) -> Self {
        Self { center, side }
    }

    /// Odd integer side and integer centre.
    pub fn is_suitable(&self) -> bool {
        let odd = self.side.fract() == 0.0 && (self.side as i64) % 2 == 1 && self.side > 0.0;
        odd && self.center.iter().all(|c| c.fract() == 0.0)
    }

    pub fn rect(&self) -> Rect {
        Rect::centered(self.center, self.side)
    }

    /// `Λ^int = Λ_{l/3}(x)`.
    pub fn interior(&self) -> Rect {
        Rect::centered(self.center, self.side / 3.0)
    }

    /// `Λ̃ = Λ + [−c_δ, c_δ]²`.
    pub fn expanded(&self, c_delta: f64) -> Rect {
        self.rect().expanded(c_delta)
    }

    fn offset(&self, x: Point) -> f64 {
        (x[0] - self.center[0]).abs().max((x[1] - self.center[1]).abs())
    }

    /// `x` in the open interior square `Λ_{l/3}(x)`.
    pub fn in_interior(&self, x: Point) -> bool {
        self.offset(x) < self.side / 6.0
    }

    /// `x` in the collar `Λ^out = Λ_l ∖ Λ_{l−2}`.
    pub fn in_collar(&self, x: Point) -> bool {
        let d = self.offset(x);
        d < 0.5 * self.side && d >= 0.5 * (self.side - 2.0)
    }
}

/// `B̃_Λ`: the sample restricted to coefficients with `z ∈ Λ̃`.
pub fn subordinate_field(config: &FieldModelConfig, sample: &FieldSample, bx: &BoxSpec) -> Result<FieldSample> {
    let keep = bx.expanded(config.c_delta());
    if !sample.zero_outside && !sample.region.contains_rect(&keep) {
        return Err(Error::InsufficientRegion(format!(
            "sample region {:?} does not contain the expanded box {:?}",
            sample.region, keep
        )));
    }
    Ok(sample.subordinate(&keep))
}

/// `Ã_Λ = A_full − δ_u[B_ω − B̃_Λ]` with `u` the box centre. Its curl is
/// `B̃_Λ` and it coincides with `A_full` on `Λ`.
pub fn subordinate_potential(
    config: &FieldModelConfig,
    sample: &FieldSample,
    bx: &BoxSpec,
    full: Arc<dyn VectorPotential>,
) -> Result<SubordinateGauge> {
    let keep = bx.expanded(config.c_delta());
    if !sample.zero_outside && !sample.region.contains_rect(&keep) {
        return Err(Error::InsufficientRegion(format!(
            "sample region {:?} does not contain the expanded box {:?}",
            sample.region, keep
        )));
    }
    let outside = Arc::new(sample.complement(&keep));
    let delta: Arc<dyn ScalarField> = Arc::new(SampledField::random_part(config, outside));
    Ok(SubordinateGauge {
        full,
        correction: line_integral_gauge(delta, bx.center),
    })
}

/// `θ = ∫_p^q A·dl` by three-point Gauss–Legendre on the segment.
pub fn peierls_link_phase(a: &dyn VectorPotential, p: Point, q: Point) -> Result<f64> {
    let d = [q[0] - p[0], q[1] - p[1]];
    let mid = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    let mut acc = 0.0;
    for (t, w) in GAUSS3_NODES.iter().zip(GAUSS3_WEIGHTS) {
        let x = [mid[0] + 0.5 * t * d[0], mid[1] + 0.5 * t * d[1]];
        let v = a.potential(x)?;
        acc += w * (v[0] * d[0] + v[1] * d[1]);
    }
    Ok(0.5 * acc)
}

/// One entry of a curl check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurlSample {
    pub x: f64,
    pub y: f64,
    pub error: f64,
}

/// `|∂₁A₂ − ∂₂A₁ − B|` at `points`, derivatives by the fourth-order central
/// difference with step `step`.
pub fn curl_check(
    a: &dyn VectorPotential,
    b: &dyn ScalarField,
    points: &[Point],
    step: f64,
) -> Result<Vec<CurlSample>> {
    let e = step;
    let diff = |x: Point, axis: usize, comp: usize| -> Result<f64> {
        let at = |s: f64| -> Result<f64> {
            let mut y = x;
            y[axis] += s;
            Ok(a.potential(y)?[comp])
        };
        Ok((-at(2.0 * e)? + 8.0 * at(e)? - 8.0 * at(-e)? + at(-2.0 * e)?) / (12.0 * e))
    };
    points
        .iter()
        .map(|&x| {
            let curl = diff(x, 0, 1)? - diff(x, 1, 0)?;
            Ok(CurlSample {
                x: x[0],
                y: x[1],
                error: (curl - b.value(x)).abs(),
            })
        })
        .collect()
}

/// CSV rendering `x,y,error` of a curl check.
pub fn curl_csv(samples: &[CurlSample]) -> String {
    let mut s = String::from("x,y,error\n");
    for c in samples {
        s.push_str(&format!("{},{},{:e}\n", c.x, c.y, c.error));
    }
    s
}
