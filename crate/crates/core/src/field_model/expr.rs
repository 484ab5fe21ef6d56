//! Named `Z²`-periodic expressions used for `B_var` and `V`.
//!
//! A [`PeriodicExpr`] is a finite sum of separable terms
//! `amp · X(x₁) · Y(x₂)` where each factor is `1`, `sin(2π m t)` or
//! `cos(2π m t)`. Values, gradients and axis integrals are closed form.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Const,
    SinX,
    CosX,
    SinY,
    CosY,
    SinSin,
    CosCos,
    SinCos,
    CosSin,
}

fn one() -> i32 {
    1
}

/// One term. `m` is the frequency of the `x₁` factor, `n` that of the `x₂`
/// factor; single-axis terms use the frequency of their own axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub kind: TermKind,
    pub amp: f64,
    #[serde(default = "one")]
    pub m: i32,
    #[serde(default = "one")]
    pub n: i32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Factor {
    One,
    Sin(f64),
    Cos(f64),
}

impl Factor {
    fn value(self, t: f64) -> f64 {
        match self {
            Factor::One => 1.0,
            Factor::Sin(k) => (k * t).sin(),
            Factor::Cos(k) => (k * t).cos(),
        }
    }

    fn derivative(self, t: f64) -> f64 {
        match self {
            Factor::One => 0.0,
            Factor::Sin(k) => k * (k * t).cos(),
            Factor::Cos(k) => -k * (k * t).sin(),
        }
    }

    fn integral(self, a: f64, b: f64) -> f64 {
        match self {
            Factor::One => b - a,
            Factor::Sin(k) if k == 0.0 => 0.0,
            Factor::Cos(k) if k == 0.0 => b - a,
            Factor::Sin(k) => ((k * a).cos() - (k * b).cos()) / k,
            Factor::Cos(k) => ((k * b).sin() - (k * a).sin()) / k,
        }
    }

    fn sup(self) -> f64 {
        match self {
            Factor::Sin(k) if k == 0.0 => 0.0,
            _ => 1.0,
        }
    }

    fn rate(self) -> f64 {
        match self {
            Factor::One => 0.0,
            Factor::Sin(k) | Factor::Cos(k) => k.abs(),
        }
    }
}

impl Term {
    pub fn new(kind: TermKind, amp: f64, m: i32, n: i32) -> Self {
        Self { kind, amp, m, n }
    }

    /// Whether the term varies along `x₁` (respectively `x₂`).
    pub fn varies(&self) -> (bool, bool) {
        let moving = |f: Factor| match f {
            Factor::One => false,
            Factor::Sin(k) | Factor::Cos(k) => k != 0.0,
        };
        let (fx, fy) = self.factors();
        (moving(fx), moving(fy))
    }

    /// Whether the term vanishes identically.
    pub fn is_null(&self) -> bool {
        let (fx, fy) = self.factors();
        self.amp == 0.0 || fx.sup() == 0.0 || fy.sup() == 0.0
    }

    fn factors(&self) -> (Factor, Factor) {
        let kx = TAU * self.m as f64;
        let ky = TAU * self.n as f64;
        use Factor::*;
        match self.kind {
            TermKind::Const => (One, One),
            TermKind::SinX => (Sin(kx), One),
            TermKind::CosX => (Cos(kx), One),
            TermKind::SinY => (One, Sin(ky)),
            TermKind::CosY => (One, Cos(ky)),
            TermKind::SinSin => (Sin(kx), Sin(ky)),
            TermKind::CosCos => (Cos(kx), Cos(ky)),
            TermKind::SinCos => (Sin(kx), Cos(ky)),
            TermKind::CosSin => (Cos(kx), Sin(ky)),
        }
    }
}

/// Sum of periodic terms; the empty sum is the zero function.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PeriodicExpr {
    pub terms: Vec<Term>,
}

impl PeriodicExpr {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms(vec![Term::new(TermKind::Const, c, 0, 0)])
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn with(mut self, term: Term) -> Self {
        self.terms.push(term);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amp == 0.0)
    }

    pub fn value(&self, x: Point) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (fx, fy) = t.factors();
                t.amp * fx.value(x[0]) * fy.value(x[1])
            })
            .sum()
    }

    pub fn gradient(&self, x: Point) -> [f64; 2] {
        let mut g = [0.0; 2];
        for t in &self.terms {
            let (fx, fy) = t.factors();
            g[0] += t.amp * fx.derivative(x[0]) * fy.value(x[1]);
            g[1] += t.amp * fx.value(x[0]) * fy.derivative(x[1]);
        }
        g
    }

    /// `∫_a^b f(ξ, y) dξ`.
    pub fn integral_x(&self, y: f64, a: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (fx, fy) = t.factors();
                t.amp * fx.integral(a, b) * fy.value(y)
            })
            .sum()
    }

    /// `∫_a^b f(x, ξ) dξ`.
    pub fn integral_y(&self, x: f64, a: f64, b: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (fx, fy) = t.factors();
                t.amp * fx.value(x) * fy.integral(a, b)
            })
            .sum()
    }

    /// Upper bound on `‖f‖_∞` (sum of amplitudes).
    pub fn sup_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (fx, fy) = t.factors();
                t.amp.abs() * fx.sup() * fy.sup()
            })
            .sum()
    }

    /// Upper bound on `‖∇f‖_∞` (Euclidean gradient norm).
    pub fn gradient_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let (fx, fy) = t.factors();
                t.amp.abs() * fx.rate().hypot(fy.rate())
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_numerics() {
        let e = PeriodicExpr::from_terms(vec![
            Term::new(TermKind::Const, 0.5, 0, 0),
            Term::new(TermKind::SinCos, 0.2, 1, 2),
            Term::new(TermKind::CosY, -0.3, 1, 3),
        ]);
        let x = [0.31, -0.77];
        let eps = 1e-5;
        let g = e.gradient(x);
        let gx = (e.value([x[0] + eps, x[1]]) - e.value([x[0] - eps, x[1]])) / (2.0 * eps);
        let gy = (e.value([x[0], x[1] + eps]) - e.value([x[0], x[1] - eps])) / (2.0 * eps);
        assert!((g[0] - gx).abs() < 1e-7 && (g[1] - gy).abs() < 1e-7);
        let ix = crate::quadrature::adaptive_gk(|s| e.value([s, x[1]]), -0.2, 1.3, 1e-14, 1e-14).unwrap();
        assert!((e.integral_x(x[1], -0.2, 1.3) - ix).abs() < 1e-12);
        let iy = crate::quadrature::adaptive_gk(|s| e.value([x[0], s]), 0.4, -0.9, 1e-14, 1e-14).unwrap();
        assert!((e.integral_y(x[0], 0.4, -0.9) - iy).abs() < 1e-12);
        assert!((e.value(x) - e.value([x[0] + 1.0, x[1] - 2.0])).abs() < 1e-12);
    }

    #[test]
    fn json_shape() {
        let e: PeriodicExpr = serde_json::from_str(r#"[{"kind":"sin_x","amp":0.2}]"#).unwrap();
        assert_eq!(e.terms[0].m, 1);
        assert!((e.value([0.25, 0.0]) - 0.2).abs() < 1e-15);
    }
}
