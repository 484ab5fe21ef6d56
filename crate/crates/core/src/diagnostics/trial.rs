//! Landau trial states and their residuals in slowly varying fields.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stats::{linear_fit, LinearFit};
use crate::field_model::{FieldModelConfig, PeriodicExpr, ScalarField};
use crate::gauge::{line_integral_gauge, VectorPotential};
use crate::lattice::DiscreteHamiltonian;
use crate::quadrature::{gauss_fixed, gauss_legendre_20};
use crate::{Error, Point, Result};

/// `(L_n(x), L_n'(x))` by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut l0, mut l1, mut d1) = (1.0, 1.0 - x, -1.0);
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 - x) * l1 - kf * l0) / (kf + 1.0);
        // L'_{k+1} = L'_k − L_k
        d1 -= l1;
        (l0, l1) = (l1, l2);
    }
    (l1, d1)
}

/// `φ_n(x) = (B̃/2π)^(1/2) L_n(B̃|x−x̃|²/2) e^(−B̃|x−x̃|²/4)`.
pub fn trial_value(n: usize, center: Point, b: f64, x: Point) -> f64 {
    let (dx, dy) = (x[0] - center[0], x[1] - center[1]);
    let rho = 0.5 * b * (dx * dx + dy * dy);
    (b / (2.0 * PI)).sqrt() * laguerre(n, rho).0 * (-0.5 * rho).exp()
}

/// Discretized `φ_n` on the sites of `op`, normalized in the discrete `ℓ²`
/// norm.
pub fn trial_state(op: &DiscreteHamiltonian, n: usize, center: Point, b: f64) -> Result<Vec<Complex64>> {
    if !(b > 0.0) {
        return Err(Error::InvalidInput(format!("trial field {b} must be positive")));
    }
    let len = b.powf(-0.5);
    if op.h > len / 4.0 {
        return Err(Error::Domain(format!(
            "spacing {} does not resolve the magnetic length {len:.4} (need h ≤ {:.4})",
            op.h,
            len / 4.0
        )));
    }
    if let Some(g) = &op.grid {
        let margin = g.rect.sup_dist(center).max(0.0);
        let inner = [
            center[0] - g.rect.min[0],
            g.rect.max[0] - center[0],
            center[1] - g.rect.min[1],
            g.rect.max[1] - center[1],
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        if margin > 0.0 || inner < 6.0 * len {
            return Err(Error::Domain(format!(
                "trial centre is {inner:.3} from the boundary; need at least {:.3}",
                6.0 * len
            )));
        }
    }
    let mut v: Vec<Complex64> = op
        .sites
        .iter()
        .map(|&p| Complex64::new(trial_value(n, center, b, p), 0.0))
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in &mut v {
        *c /= norm;
    }
    Ok(v)
}

/// `‖(H − λ)ψ‖ / ‖ψ‖` on the lattice.
pub fn lattice_residual(op: &DiscreteHamiltonian, psi: &[Complex64], lambda: f64) -> f64 {
    let hp = op.matrix.apply(psi);
    let num: f64 = hp.iter().zip(psi).map(|(a, b)| (a - lambda * b).norm_sqr()).sum();
    let den: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Continuum residual `‖((p − A)² + V − λ)φ_n‖` with `A` the line-integral
/// gauge of `b` based at `center`, `B̃ = b(center)` and
/// `λ = (2n+1)B̃ + V(center)`.
///
/// `φ_n` is radial, so `(p − A)²φ = −Δφ + 2iA·∇φ + i(∇·A)φ + |A|²φ` with
/// `−Δφ = B̃(2n+1 − ρ/2)φ` and `ρ = B̃r²/2`. The plane integral uses
/// Gauss–Legendre in `r` and the trapezoid rule in the angle; `rings`
/// controls the radial resolution.
pub fn continuum_residual(
    b: Arc<dyn ScalarField>,
    v: &dyn ScalarField,
    n: usize,
    center: Point,
    rings: usize,
) -> Result<ContinuumResidual> {
    let bt = b.value(center);
    if !(bt > 0.0) {
        return Err(Error::Domain(format!(
            "field {bt} at the trial centre must be positive"
        )));
    }
    let lambda = (2 * n + 1) as f64 * bt + v.value(center);
    let gauge = line_integral_gauge(b.clone(), center);
    let c = (bt / (2.0 * PI)).sqrt();
    let nf = n as f64;
    let integrand = |x: Point| -> Result<f64> {
        let y = [x[0] - center[0], x[1] - center[1]];
        let rho = 0.5 * bt * (y[0] * y[0] + y[1] * y[1]);
        let (l, dl) = laguerre(n, rho);
        let e = (-0.5 * rho).exp();
        let phi = c * l * e;
        let a = gauge.potential(x)?;
        // ∇·A = −½∫∂₁B(x₁, ξ)dξ + ½∫∂₂B(ξ, x₂)dξ along the gauge's axis paths
        let rule = gauss_legendre_20();
        let d1 = gauss_fixed(rule, center[1], x[1], |s| b.gradient([x[0], s])[0]);
        let d2 = gauss_fixed(rule, center[0], x[0], |s| b.gradient([s, x[1]])[1]);
        let div = -0.5 * d1 + 0.5 * d2;
        let a_dot_y = a[0] * y[0] + a[1] * y[1];
        let real = phi * (bt * (2.0 * nf + 1.0 - 0.5 * rho) + a[0] * a[0] + a[1] * a[1] + v.value(x) - lambda);
        let imag = 2.0 * a_dot_y * c * e * (dl - 0.5 * l) * bt + div * phi;
        Ok(real * real + imag * imag)
    };
    let rho_max = 90.0 + 8.0 * nf;
    let r_max = (2.0 * rho_max / bt).sqrt();
    let plane = |rings: usize, angles: usize| -> Result<f64> {
        let rule = gauss_legendre_20();
        let mut total = 0.0;
        for ring in 0..rings {
            let (r0, r1) = (
                r_max * ring as f64 / rings as f64,
                r_max * (ring + 1) as f64 / rings as f64,
            );
            let mut err = None;
            let part = gauss_fixed(rule, r0, r1, |r| {
                let mut acc = 0.0;
                for t in 0..angles {
                    let th = 2.0 * PI * t as f64 / angles as f64;
                    match integrand([center[0] + r * th.cos(), center[1] + r * th.sin()]) {
                        Ok(v) => acc += v,
                        Err(e) => err = Some(e),
                    }
                }
                acc * r * 2.0 * PI / angles as f64
            });
            if let Some(e) = err {
                return Err(e);
            }
            total += part;
        }
        Ok(total.sqrt())
    };
    let fine = plane(rings, 96)?;
    let coarse = plane(rings.div_ceil(2), 64)?;
    Ok(ContinuumResidual {
        b_tilde: bt,
        lambda,
        residual: fine,
        quadrature_error: (fine - coarse).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumResidual {
    pub b_tilde: f64,
    pub lambda: f64,
    pub residual: f64,
    /// Difference to a coarser quadrature.
    pub quadrature_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualPoint {
    pub b0: f64,
    pub residual: f64,
    pub quadrature_error: f64,
    /// False when the quadrature error is not small against the residual.
    pub usable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualScan {
    pub n: usize,
    pub center: Point,
    pub points: Vec<ResidualPoint>,
    /// Fit of `log residual` against `log B₀` over the usable points.
    pub fit: Option<LinearFit>,
}

/// Residuals of `φ_n` for `B = B₀ + B_var` (the deterministic part of the
/// configuration, random part left out) as `B₀` runs over `b0_list`.
pub fn trial_residual_scan(
    config: &FieldModelConfig,
    n: usize,
    b0_list: &[f64],
    center: Point,
) -> Result<ResidualScan> {
    let v = config.potential();
    let mut points = Vec::with_capacity(b0_list.len());
    for &b0 in b0_list {
        let field = PeriodicExpr::constant(b0);
        let field = PeriodicExpr::from_terms(
            field
                .terms
                .into_iter()
                .chain(config.fields.b_var.terms.iter().cloned())
                .collect(),
        );
        let r = continuum_residual(Arc::new(field), &v, n, center, 24)?;
        points.push(ResidualPoint {
            b0,
            residual: r.residual,
            quadrature_error: r.quadrature_error,
            usable: r.quadrature_error <= 1e-3 * r.residual && r.residual > 0.0,
        });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.usable)
        .map(|p| (p.b0.ln(), p.residual.ln()))
        .unzip();
    let fit = (xs.len() >= 2).then(|| linear_fit(&xs, &ys));
    Ok(ResidualScan { n, center, points, fit })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_closed_forms() {
        for &x in &[0.0, 0.3, 1.7, 5.0] {
            let l2 = 1.0 - 2.0 * x + 0.5 * x * x;
            let l3 = (-x * x * x + 9.0 * x * x - 18.0 * x + 6.0) / 6.0;
            assert!((laguerre(2, x).0 - l2).abs() < 1e-13);
            assert!((laguerre(3, x).0 - l3).abs() < 1e-12);
            assert!((laguerre(2, x).1 - (x - 2.0)).abs() < 1e-13);
            assert!((laguerre(3, x).1 - (-3.0 * x * x + 18.0 * x - 18.0) / 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_residual_vanishes() {
        let b: Arc<dyn ScalarField> = Arc::new(PeriodicExpr::constant(7.0));
        for n in 0..3 {
            let r = continuum_residual(b.clone(), &PeriodicExpr::zero(), n, [0.3, -0.2], 16).unwrap();
            assert!(r.residual < 1e-9, "n = {n}: {}", r.residual);
            assert_eq!(r.lambda, (2 * n + 1) as f64 * 7.0);
        }
    }
}
