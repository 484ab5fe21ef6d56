use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::confluent::{confluent_u, gamma_u_integral};
use super::gamma::gamma_checked;
use crate::geometry::symplectic;
use crate::{Error, Point, Result};

/// Default pole-exclusion radius around each Landau level, in units of `B₀`.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Arguments of the resolvent kernel of `(p − A)²` with `curl A = B₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub b0: f64,
    pub z: Complex64,
    pub x: Point,
    pub y: Point,
}

impl KernelQuery {
    pub fn new(b0: f64, z: Complex64, x: Point, y: Point) -> Self {
        Self { b0, z, x, y }
    }

    /// `w = ½ − z/(2B₀)`.
    pub fn w(&self) -> Complex64 {
        0.5 - self.z / (2.0 * self.b0)
    }

    /// `ζ = (B₀/2)|x − y|²`.
    pub fn zeta(&self) -> f64 {
        let d = [self.x[0] - self.y[0], self.x[1] - self.y[1]];
        0.5 * self.b0 * (d[0] * d[0] + d[1] * d[1])
    }

    pub fn symplectic(&self) -> f64 {
        symplectic(self.x, self.y)
    }

    /// Distance from `z` to the nearest Landau level `B₀(2n+1)`.
    pub fn level_distance(&self) -> f64 {
        let n = ((self.z.re / self.b0 - 1.0) / 2.0).round().max(0.0);
        (self.z - self.b0 * (2.0 * n + 1.0)).norm()
    }

    pub fn check(&self) -> Result<()> {
        if !(self.b0 > 0.0) {
            return Err(Error::Domain(format!("B0 = {} must be positive", self.b0)));
        }
        let d = self.level_distance();
        if d < POLE_EXCLUSION * self.b0 {
            return Err(Error::PoleProximity {
                re: self.z.re,
                im: self.z.im,
                distance: d,
            });
        }
        Ok(())
    }
}

/// `Γ(w) U(w, 1; ζ)`, avoiding the Gamma function where the integral
/// representation applies directly.
pub fn gamma_u(w: Complex64, zeta: f64, pole_radius: f64) -> Result<Complex64> {
    if w.re >= 0.5 {
        gamma_u_integral(w, zeta)
    } else {
        Ok(gamma_checked(w, pole_radius)? * confluent_u(w, zeta)?)
    }
}

/// `R(z)(x, y) = (1/4π) Γ(w) U(w, 1; ζ) exp(−ζ/2 − i(B₀/2)[x, y])`, the
/// kernel of `((p − A)² − z)^(−1)` in the symmetric gauge
/// `A = (B₀/2)(−x₂, x₁)`.
pub fn landau_kernel(q: &KernelQuery) -> Result<Complex64> {
    q.check()?;
    let zeta = q.zeta();
    if zeta == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let gu = gamma_u(q.w(), zeta, 0.5 * POLE_EXCLUSION)?;
    let phase = Complex64::new(-0.5 * zeta, -0.5 * q.b0 * q.symplectic()).exp();
    Ok(gu * phase / (4.0 * PI))
}
