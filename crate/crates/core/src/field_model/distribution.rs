//! Single-coefficient distributions.
//!
//! On scale `k` the coefficient `ω^(k)` has support `[lo·σ_k, hi·σ_k]` and
//! density proportional to `(1 − ((s − c)/w)²)^(τ−1)` (centre `c`, half width
//! `w`), i.e. an affine image of `Beta(τ, τ)`. A point mass at the origin is
//! also available.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::quadrature::adaptive_gk;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistShape {
    Bump,
    #[serde(alias = "point-mass")]
    PointMass,
}

fn minus_one() -> f64 {
    -1.0
}
fn plus_one() -> f64 {
    1.0
}
fn default_c2() -> f64 {
    10.0
}

/// Distribution of the coefficients, per scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    /// Tail exponent; the density vanishes like `dist^(τ−1)` at the support ends.
    pub tau: f64,
    /// Constant in the tail bound `ν_±(h) ≤ c_v h^τ`.
    pub c_v: f64,
    pub shape: DistShape,
    /// Support ends in units of `σ_k`.
    #[serde(default = "minus_one")]
    pub lo: f64,
    #[serde(default = "plus_one")]
    pub hi: f64,
    /// Bound `C` in `∫|v''| ≤ C e^(2ρk)`.
    #[serde(default = "default_c2")]
    pub c_2der: f64,
    /// Scales above this one are point masses at zero.
    #[serde(default)]
    pub max_random_scale: Option<usize>,
}

/// Which extremal value to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl DistributionSpec {
    pub fn bump(tau: f64, c_v: f64) -> Self {
        Self {
            tau,
            c_v,
            shape: DistShape::Bump,
            lo: -1.0,
            hi: 1.0,
            c_2der: default_c2(),
            max_random_scale: None,
        }
    }

    pub fn point_mass() -> Self {
        Self {
            shape: DistShape::PointMass,
            ..Self::bump(3.0, 1.0)
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.shape == DistShape::Bump {
            if !(self.tau >= 1.0) {
                return Err(Error::Config(format!("tau = {} must be at least 1", self.tau)));
            }
            if !(self.lo < self.hi) || self.lo < -1.0 || self.hi > 1.0 {
                return Err(Error::Config(format!(
                    "support [{}, {}] must be a subinterval of [-1, 1]",
                    self.lo, self.hi
                )));
            }
        }
        Ok(())
    }

    fn is_random(&self, k: usize) -> bool {
        self.shape == DistShape::Bump && self.max_random_scale.is_none_or(|m| k <= m)
    }

    /// Essential support `[m₋, m₊]` on scale `k` with bound `σ_k`.
    pub fn support(&self, k: usize, sigma_k: f64) -> (f64, f64) {
        if self.is_random(k) {
            (self.lo * sigma_k, self.hi * sigma_k)
        } else {
            (0.0, 0.0)
        }
    }

    /// `ess sup[ω]_+` (plus) or `−ess sup[−ω]_+` (minus).
    pub fn extremal(&self, k: usize, sigma_k: f64, sign: Sign) -> f64 {
        let (m_lo, m_hi) = self.support(k, sigma_k);
        match sign {
            Sign::Plus => m_hi.max(0.0),
            Sign::Minus => m_lo.min(0.0),
        }
    }

    /// Normalisation of `(1 − s²)^(τ−1)` on `[−1, 1]`: `Γ(τ+½)/(√π Γ(τ))`.
    fn unit_norm(&self) -> f64 {
        let t = self.tau;
        (ln_gamma_real(t + 0.5) - ln_gamma_real(t)).exp() / std::f64::consts::PI.sqrt()
    }

    /// Density of `ω^(k)` at `s`.
    pub fn density(&self, k: usize, sigma_k: f64, s: f64) -> f64 {
        if !self.is_random(k) {
            return 0.0;
        }
        let (a, b) = self.support(k, sigma_k);
        let c = 0.5 * (a + b);
        let w = 0.5 * (b - a);
        let y = (s - c) / w;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        self.unit_norm() * (1.0 - y * y).powf(self.tau - 1.0) / w
    }

    /// Second derivative of the density (away from the support ends).
    pub fn density_second_derivative(&self, k: usize, sigma_k: f64, s: f64) -> f64 {
        if !self.is_random(k) {
            return 0.0;
        }
        let (a, b) = self.support(k, sigma_k);
        let c = 0.5 * (a + b);
        let w = 0.5 * (b - a);
        let y = (s - c) / w;
        if y.abs() >= 1.0 {
            return 0.0;
        }
        let t = self.tau;
        let g = 1.0 - y * y;
        let mut d2 = -2.0 * (t - 1.0) * g.powf(t - 2.0);
        if t != 2.0 {
            d2 += 4.0 * (t - 1.0) * (t - 2.0) * y * y * g.powf(t - 3.0);
        }
        self.unit_norm() * d2 / (w * w * w)
    }

    /// `∫|v^(k)''|`.
    pub fn second_derivative_mass(&self, k: usize, sigma_k: f64) -> f64 {
        if !self.is_random(k) {
            return 0.0;
        }
        let (a, b) = self.support(k, sigma_k);
        let w = 0.5 * (b - a);
        // sign changes of the second derivative split the integral
        let t = self.tau;
        let mut cuts = vec![a, b];
        if t > 1.0 && t != 2.0 {
            let y0 = (1.0 / (2.0 * t - 3.0)).sqrt();
            if 2.0 * t - 3.0 > 0.0 && y0 < 1.0 {
                let c = 0.5 * (a + b);
                cuts.push(c - w * y0);
                cuts.push(c + w * y0);
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|p| {
                adaptive_gk(
                    |s| self.density_second_derivative(k, sigma_k, s).abs(),
                    p[0],
                    p[1],
                    1e-12,
                    1e-10,
                )
                .unwrap_or(f64::INFINITY)
            })
            .sum()
    }

    /// Mass and mean of the density, by quadrature.
    pub fn moments(&self, k: usize, sigma_k: f64) -> (f64, f64) {
        if !self.is_random(k) {
            return (1.0, 0.0);
        }
        let (a, b) = self.support(k, sigma_k);
        let m0 = adaptive_gk(|s| self.density(k, sigma_k, s), a, b, 1e-14, 1e-12).unwrap_or(f64::NAN);
        let m1 = adaptive_gk(|s| s * self.density(k, sigma_k, s), a, b, 1e-14, 1e-12).unwrap_or(f64::NAN);
        (m0, m1)
    }

    /// `ν_+(h) = P(ω^(0) > m₊ − h)` and `ν_−(h) = P(ω^(0) < m₋ + h)`: the
    /// mass within `h` of the upper (lower) end of the essential support.
    pub fn tail_probability(&self, sigma_0: f64, sign: Sign, h: f64) -> Result<f64> {
        if !(h >= 0.0) {
            return Err(Error::Domain(format!("tail width h = {h} must be non-negative")));
        }
        if h == 0.0 {
            return Ok(0.0);
        }
        if !self.is_random(0) {
            return Ok(1.0);
        }
        let (a, b) = self.support(0, sigma_0);
        if h >= b - a {
            return Ok(1.0);
        }
        let (lo, hi) = match sign {
            Sign::Plus => (b - h, b),
            Sign::Minus => (a, a + h),
        };
        let p = adaptive_gk(|s| self.density(0, sigma_0, s), lo, hi, 1e-15, 1e-12)?;
        Ok(p.clamp(0.0, 1.0))
    }

    /// Draw one coefficient on scale `k`.
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, sigma_k: f64, rng: &mut R) -> f64 {
        if !self.is_random(k) {
            return 0.0;
        }
        let (a, b) = self.support(k, sigma_k);
        let beta = Beta::new(self.tau, self.tau).expect("tau checked");
        let x: f64 = beta.sample(rng);
        a + (b - a) * x
    }
}

/// `ln Γ(x)` for real `x > 0` (Lanczos, g = 7).
pub(crate) fn ln_gamma_real(x: f64) -> f64 {
    crate::landau_resolvent::gamma::ln_gamma(num_complex::Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau3_is_the_quartic_bump() {
        let d = DistributionSpec::bump(3.0, 1.0);
        assert!((d.density(0, 1.0, 0.0) - 15.0 / 16.0).abs() < 1e-13);
        let (m0, m1) = d.moments(0, 0.5);
        assert!((m0 - 1.0).abs() < 1e-12 && m1.abs() < 1e-12);
        // v'' = (15/16)(12 s² − 4): ∫|v''| = (15/16)·32/(3√3)
        let want = 15.0 / 16.0 * 32.0 / (3.0 * 3f64.sqrt());
        assert!((d.second_derivative_mass(0, 1.0) - want).abs() < 1e-8);
        assert!((d.second_derivative_mass(2, 0.5) - 4.0 * want).abs() < 1e-7);
    }

    #[test]
    fn tail_limits() {
        let d = DistributionSpec::bump(3.0, 1.0);
        assert_eq!(d.tail_probability(1.0, Sign::Plus, 0.0).unwrap(), 0.0);
        assert_eq!(d.tail_probability(1.0, Sign::Minus, 2.5).unwrap(), 1.0);
        assert!(d.tail_probability(1.0, Sign::Plus, -0.1).is_err());
        let half = d.tail_probability(1.0, Sign::Plus, 1.0).unwrap();
        assert!((half - 0.5).abs() < 1e-12);
    }

    #[test]
    fn extremal_values() {
        let d = DistributionSpec::bump(3.0, 1.0);
        assert_eq!(d.extremal(1, 0.3, Sign::Plus), 0.3);
        let one_sided = DistributionSpec { lo: 0.0, ..d.clone() };
        assert_eq!(one_sided.extremal(1, 0.3, Sign::Minus), 0.0);
        let pm = DistributionSpec::point_mass();
        assert_eq!(pm.extremal(0, 1.0, Sign::Plus), 0.0);
        assert_eq!(pm.extremal(0, 1.0, Sign::Minus), 0.0);
    }
}
