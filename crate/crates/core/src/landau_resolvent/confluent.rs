//! Tricomi's confluent hypergeometric function `U(a, 1; ζ)` for complex `a`
//! and real `ζ > 0`.
//!
//! For `Re a ≥ ½` the integral
//! `Γ(a) U(a, 1; ζ) = ∫₀^∞ e^(−ζt) t^(a−1) (1+t)^(−a) dt`
//! is split at `t₀ = min(1, 1/ζ)`: tanh-sinh on `[0, t₀]` absorbs the
//! endpoint singularity, exp-sinh covers `[t₀, ∞)`. For `Re a < ½` the
//! three-term recurrence `U(a) = (1+2a+ζ) U(a+1) − (a+1)² U(a+2)` is run
//! downward from the first shift with `Re ≥ ½`.

use num_complex::Complex64;

use super::gamma::gamma_fn;
use crate::quadrature::{exp_sinh, tanh_sinh};
use crate::{Error, Result};

/// Relative stopping tolerance of the double-exponential rules.
pub const QUAD_TOL: f64 = 1e-10;

fn check_zeta(zeta: f64) -> Result<()> {
    if zeta == 0.0 {
        Err(Error::ZeroArgument)
    } else if !(zeta > 0.0) || !zeta.is_finite() {
        Err(Error::Domain(format!("ζ = {zeta} must be positive and finite")))
    } else {
        Ok(())
    }
}

/// `∫₀^∞ e^(−ζt) t^(a−1+p) (1+t)^(−a) dt` for `p ∈ {0, 1}`.
fn moment(a: Complex64, zeta: f64, p: f64) -> Result<Complex64> {
    check_zeta(zeta)?;
    if a.re + p < 0.5 - 1e-12 {
        return Err(Error::Domain(format!(
            "integral representation needs Re a ≥ ½, got {a}"
        )));
    }
    let integrand = |t: f64| -> Complex64 {
        let e = Complex64::new(-zeta * t, 0.0) + (a - 1.0 + p) * t.ln() - a * t.ln_1p();
        e.exp()
    };
    let t0 = (1.0 / zeta).min(1.0);
    let head = tanh_sinh(integrand, t0, QUAD_TOL)?;
    let tail = exp_sinh(integrand, t0, QUAD_TOL)?;
    Ok(head + tail)
}

/// `Γ(a) U(a, 1; ζ)` by quadrature (`Re a ≥ ½`).
pub fn gamma_u_integral(a: Complex64, zeta: f64) -> Result<Complex64> {
    moment(a, zeta, 0.0)
}

/// `Γ(a) ∂_ζ U(a, 1; ζ) = −∫ t e^(−ζt) t^(a−1) (1+t)^(−a) dt` (`Re a ≥ ½`).
pub fn gamma_u_prime_integral(a: Complex64, zeta: f64) -> Result<Complex64> {
    moment(a, zeta, 1.0).map(|v| -v)
}

/// Number of upward shifts that move `a` into `Re ≥ ½`.
pub fn shifts_needed(a: Complex64) -> usize {
    if a.re >= 0.5 {
        0
    } else {
        (0.5 - a.re).ceil() as usize
    }
}

fn direct(a: Complex64, zeta: f64) -> Result<(Complex64, Complex64)> {
    let g = gamma_fn(a)?;
    Ok((gamma_u_integral(a, zeta)? / g, gamma_u_prime_integral(a, zeta)? / g))
}

/// `(U(a,1;ζ), U'(a,1;ζ))` obtained from quadrature at `a+shifts`,
/// `a+shifts+1` and `shifts` downward recurrence steps. Requires
/// `Re(a + shifts) ≥ ½`.
pub fn confluent_u_shifted(a: Complex64, zeta: f64, shifts: usize) -> Result<(Complex64, Complex64)> {
    check_zeta(zeta)?;
    let top = a + shifts as f64;
    let (mut u1, mut d1) = direct(top + 1.0, zeta)?;
    let (mut u0, mut d0) = direct(top, zeta)?;
    for m in (0..shifts).rev() {
        let am = a + m as f64;
        let c = 1.0 + 2.0 * am + zeta;
        let s = (am + 1.0) * (am + 1.0);
        let u = c * u0 - s * u1;
        let d = u0 + c * d0 - s * d1;
        u1 = u0;
        d1 = d0;
        u0 = u;
        d0 = d;
    }
    Ok((u0, d0))
}

/// `U(a, 1; ζ)`.
pub fn confluent_u(a: Complex64, zeta: f64) -> Result<Complex64> {
    check_zeta(zeta)?;
    let k = shifts_needed(a);
    if k == 0 {
        Ok(gamma_u_integral(a, zeta)? / gamma_fn(a)?)
    } else {
        Ok(confluent_u_shifted(a, zeta, k)?.0)
    }
}

/// `∂_ζ U(a, 1; ζ)`.
pub fn confluent_u_prime(a: Complex64, zeta: f64) -> Result<Complex64> {
    check_zeta(zeta)?;
    let k = shifts_needed(a);
    if k == 0 {
        Ok(gamma_u_prime_integral(a, zeta)? / gamma_fn(a)?)
    } else {
        Ok(confluent_u_shifted(a, zeta, k)?.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_one_matches_exponential_integral() {
        // e·E₁(1)
        let u = confluent_u(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert!((u.re - 0.596_347_362_323_194_1).abs() < 1e-12, "{u}");
        assert!(u.im.abs() < 1e-14);
        let d = confluent_u_prime(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert!((d.re + 0.403_652_637_676_805_9).abs() < 1e-12, "{d}");
    }

    #[test]
    fn zero_argument_is_rejected() {
        assert_eq!(confluent_u(Complex64::new(1.0, 0.0), 0.0), Err(Error::ZeroArgument));
    }
}
