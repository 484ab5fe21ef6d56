//! Single-site profiles `u`.
//!
//! Both families are separable, `u(x) = p(x₁) p(x₂)`:
//!
//! - `plateau`: `p = 1` on `|t| ≤ ½−δ`, `p = 0` on `|t| ≥ ½+δ`, joined by the
//!   cubic smoothstep `1 − (3s² − 2s³)`. The ramps of neighbouring cells add up
//!   to one, so `Σ_z u(x − z) ≡ 1`.
//! - `scaled_bump`: `u(x) = δ² u₀(δx)` with `u₀(y) = b(y₁) b(y₂)`,
//!   `b(s) = (15/16)(1 − s²)²` on `[−1, 1]`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileFamily {
    Plateau,
    #[serde(alias = "scaled-bump")]
    ScaledBump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub family: ProfileFamily,
    pub delta: f64,
}

/// Grid-scan bounds on the lattice sum `U(x) = Σ_z u(x − z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumBounds {
    pub c_u: f64,
    pub sup: f64,
    pub margin: f64,
    pub sup_ok: bool,
}

const BUMP_NORM: f64 = 15.0 / 16.0;

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        let g = 1.0 - s * s;
        BUMP_NORM * g * g
    }
}

fn bump_derivative(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        -4.0 * BUMP_NORM * s * (1.0 - s * s)
    }
}

fn bump_antiderivative(s: f64) -> f64 {
    if s <= -1.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        BUMP_NORM * (s - 2.0 * s.powi(3) / 3.0 + s.powi(5) / 5.0) + 0.5
    }
}

/// `‖∇u₀‖_∞` for the separable quartic bump.
pub fn bump_gradient_sup() -> f64 {
    static SUP: OnceLock<f64> = OnceLock::new();
    *SUP.get_or_init(|| {
        let n = 2000;
        let vals: Vec<(f64, f64)> = (0..=n)
            .map(|i| {
                let s = i as f64 / n as f64;
                (bump(s), bump_derivative(s))
            })
            .collect();
        let mut best: f64 = 0.0;
        for &(b1, d1) in &vals {
            for &(b2, d2) in &vals {
                best = best.max((d1 * b2).hypot(b1 * d2));
            }
        }
        best
    })
}

impl ProfileSpec {
    pub fn plateau(delta: f64) -> Self {
        Self {
            family: ProfileFamily::Plateau,
            delta,
        }
    }

    pub fn scaled_bump(delta: f64) -> Self {
        Self {
            family: ProfileFamily::ScaledBump,
            delta,
        }
    }

    pub fn check(&self) -> Result<()> {
        let ok = match self.family {
            ProfileFamily::Plateau => self.delta > 0.0 && self.delta < 0.5,
            ProfileFamily::ScaledBump => self.delta > 0.0 && self.delta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "profile delta {} out of range for {:?}",
                self.delta, self.family
            )))
        }
    }

    /// Admissible upper bound `δ₀` for the ramp width.
    pub fn delta0(&self) -> f64 {
        match self.family {
            ProfileFamily::Plateau => 1.0 / 3200.0,
            ProfileFamily::ScaledBump => {
                let g = bump_gradient_sup();
                1.0 / (640.0 + 32.0 * g * g)
            }
        }
    }

    /// Sup-norm radius outside of which `u` vanishes.
    pub fn support_radius(&self) -> f64 {
        match self.family {
            ProfileFamily::Plateau => 0.5 + self.delta,
            ProfileFamily::ScaledBump => 1.0 / self.delta,
        }
    }

    /// Smallest integer `c_δ` with `c_δ ≥ 3/2` (plateau) or `c_δ ≥ 1/δ` (bump).
    pub fn c_delta(&self) -> f64 {
        match self.family {
            ProfileFamily::Plateau => 2.0,
            ProfileFamily::ScaledBump => (1.0 / self.delta - 1e-12).ceil(),
        }
    }

    /// One-dimensional factor `p(t)`.
    pub fn factor(&self, t: f64) -> f64 {
        let d = self.delta;
        match self.family {
            ProfileFamily::Plateau => {
                let a = t.abs();
                if a <= 0.5 - d {
                    1.0
                } else if a >= 0.5 + d {
                    0.0
                } else {
                    let s = (a - (0.5 - d)) / (2.0 * d);
                    1.0 - s * s * (3.0 - 2.0 * s)
                }
            }
            ProfileFamily::ScaledBump => d * bump(d * t),
        }
    }

    pub fn factor_derivative(&self, t: f64) -> f64 {
        let d = self.delta;
        match self.family {
            ProfileFamily::Plateau => {
                let a = t.abs();
                if a <= 0.5 - d || a >= 0.5 + d {
                    0.0
                } else {
                    let s = (a - (0.5 - d)) / (2.0 * d);
                    -6.0 * s * (1.0 - s) / (2.0 * d) * t.signum()
                }
            }
            ProfileFamily::ScaledBump => d * d * bump_derivative(d * t),
        }
    }

    /// `∫_{-∞}^t p`.
    pub fn factor_antiderivative(&self, t: f64) -> f64 {
        let d = self.delta;
        match self.family {
            ProfileFamily::Plateau => {
                if t <= -0.5 - d {
                    0.0
                } else if t < -0.5 + d {
                    let r = (t + 0.5 + d) / (2.0 * d);
                    2.0 * d * (r.powi(3) - 0.5 * r.powi(4))
                } else if t <= 0.5 - d {
                    d + (t - (-0.5 + d))
                } else if t < 0.5 + d {
                    let s = (t - (0.5 - d)) / (2.0 * d);
                    1.0 - d + 2.0 * d * (s - s.powi(3) + 0.5 * s.powi(4))
                } else {
                    1.0
                }
            }
            ProfileFamily::ScaledBump => bump_antiderivative(d * t),
        }
    }

    pub fn value(&self, x: Point) -> f64 {
        self.factor(x[0]) * self.factor(x[1])
    }

    pub fn gradient(&self, x: Point) -> [f64; 2] {
        let (p1, p2) = (self.factor(x[0]), self.factor(x[1]));
        [self.factor_derivative(x[0]) * p2, p1 * self.factor_derivative(x[1])]
    }

    /// `sup |p|` and `sup |p'|`.
    pub fn factor_sups(&self) -> (f64, f64) {
        let d = self.delta;
        match self.family {
            ProfileFamily::Plateau => (1.0, 1.5 / (2.0 * d)),
            ProfileFamily::ScaledBump => (d * BUMP_NORM, d * d * BUMP_NORM * 8.0 / (3.0 * 3f64.sqrt())),
        }
    }

    /// `‖∇u‖_∞`.
    pub fn gradient_sup(&self) -> f64 {
        match self.family {
            // the derivative peaks at the ramp midpoint where the other factor is 1
            ProfileFamily::Plateau => 1.5 / (2.0 * self.delta),
            ProfileFamily::ScaledBump => self.delta.powi(3) * bump_gradient_sup(),
        }
    }

    fn lattice_sum_1d(&self, t: f64) -> (f64, f64) {
        let r = self.support_radius();
        let lo = (t - r).ceil() as i64;
        let hi = (t + r).floor() as i64;
        let mut s = 0.0;
        let mut ds = 0.0;
        for i in lo..=hi {
            s += self.factor(t - i as f64);
            ds += self.factor_derivative(t - i as f64);
        }
        (s, ds)
    }

    /// `U(x) = Σ_{z∈Z²} u(x − z)`.
    pub fn lattice_sum(&self, x: Point) -> f64 {
        self.lattice_sum_1d(x[0]).0 * self.lattice_sum_1d(x[1]).0
    }

    /// Bounds on `U` from a scan of the unit cell with `resolution` cells per
    /// side; the Lipschitz margin accounts for points between grid nodes.
    pub fn lattice_sum_bounds(&self, resolution: usize) -> SumBounds {
        let n = resolution.max(1);
        let sums: Vec<f64> = (0..=n).map(|i| self.lattice_sum_1d(i as f64 / n as f64).0).collect();
        let lo = sums.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = sums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (min_u, max_u) = (lo * lo, hi * hi);
        match self.family {
            ProfileFamily::Plateau if (min_u - 1.0).abs() < 1e-12 && (max_u - 1.0).abs() < 1e-12 => SumBounds {
                c_u: 1.0,
                sup: 1.0,
                margin: 0.0,
                sup_ok: true,
            },
            _ => {
                let terms = 2.0 * self.support_radius() + 1.0;
                let (ps, dps) = self.factor_sups();
                let lip = std::f64::consts::SQRT_2 * terms * terms * ps * dps;
                let margin = lip * (0.5 / n as f64) * std::f64::consts::SQRT_2;
                SumBounds {
                    c_u: (min_u - margin).max(0.0),
                    sup: max_u + margin,
                    margin,
                    sup_ok: max_u <= 1.0 + 1e-9,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateau_values() {
        let p = ProfileSpec::plateau(0.1);
        assert_eq!(p.value([0.3, 0.0]), 1.0);
        assert_eq!(p.value([0.7, 0.0]), 0.0);
        assert!((p.value([0.5, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn antiderivatives_are_consistent() {
        for spec in [ProfileSpec::plateau(0.2), ProfileSpec::scaled_bump(0.4)] {
            let r = spec.support_radius();
            assert!(spec.factor_antiderivative(r + 0.1) == 1.0);
            for i in 0..50 {
                let t = -r + 2.0 * r * i as f64 / 49.0;
                let q = crate::quadrature::adaptive_gk(|s| spec.factor(s), -r - 0.5, t, 1e-14, 1e-14).unwrap();
                assert!((q - spec.factor_antiderivative(t)).abs() < 1e-12, "{spec:?} {t}");
                let e = 1e-6;
                let fd = (spec.factor(t + e) - spec.factor(t - e)) / (2.0 * e);
                assert!((fd - spec.factor_derivative(t)).abs() < 1e-5 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn delta0_values() {
        assert_eq!(ProfileSpec::plateau(0.1).delta0(), 1.0 / 3200.0);
        let g = bump_gradient_sup();
        assert!(g > 1.0 && g < 2.0);
    }
}
