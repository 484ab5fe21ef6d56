//! Complex Gamma function (Lanczos approximation, g = 7, nine terms).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_P: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Default exclusion radius around the poles `0, −1, −2, …`.
pub const POLE_RADIUS: f64 = 1e-10;

fn lanczos_sum(z: Complex64) -> (Complex64, Complex64) {
    // z is already shifted by −1
    let mut x = Complex64::new(LANCZOS_P[0], 0.0);
    for (i, &p) in LANCZOS_P.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (x, t)
}

/// `ln Γ(w)` for `Re w ≥ ½` (principal branch of the Lanczos form).
pub fn ln_gamma(w: Complex64) -> Complex64 {
    let z = w - 1.0;
    let (x, t) = lanczos_sum(z);
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// Distance from `w` to the nearest pole of `Γ`.
pub fn pole_distance(w: Complex64) -> f64 {
    let n = w.re.round().min(0.0);
    (w - n).norm()
}

/// `Γ(w)` with the default pole exclusion.
pub fn gamma_fn(w: Complex64) -> Result<Complex64> {
    gamma_checked(w, POLE_RADIUS)
}

/// `Γ(w)`; signals when `w` lies within `radius` of a pole.
pub fn gamma_checked(w: Complex64, radius: f64) -> Result<Complex64> {
    let d = pole_distance(w);
    if d < radius {
        return Err(Error::PoleProximity {
            re: w.re,
            im: w.im,
            distance: d,
        });
    }
    Ok(gamma_unchecked(w))
}

fn gamma_unchecked(w: Complex64) -> Complex64 {
    if w.re < 0.5 {
        // reflection: Γ(w)Γ(1−w) = π / sin(πw)
        PI / ((PI * w).sin() * gamma_unchecked(1.0 - w))
    } else {
        let z = w - 1.0;
        let (x, t) = lanczos_sum(z);
        (2.0 * PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn special_values() {
        let c = |re| Complex64::new(re, 0.0);
        assert!((gamma_fn(c(1.0)).unwrap() - 1.0).norm() < 1e-14);
        assert!((gamma_fn(c(0.5)).unwrap() - PI.sqrt()).norm() < 1e-14);
        assert!((gamma_fn(c(5.0)).unwrap() - 24.0).norm() < 1e-12);
        assert!((gamma_fn(c(-0.5)).unwrap() + 2.0 * PI.sqrt()).norm() < 1e-13);
        assert!(matches!(gamma_fn(c(-2.0)), Err(Error::PoleProximity { .. })));
    }
}
