//! Empirical constants for the bounds `|Γ(w)| ≤ C(B₀/|z − B₀(2n+1)| + 1)` and
//! `|U(w, 1; ζ)| ≤ C(1 + |ln ζ| + ζ^(n+1))` on the window
//! `Re z ∈ B₀[2n, 2n+2]`, `|Im z| ≤ B₀`.

use num_complex::Complex64;
use serde::Serialize;

use super::confluent::confluent_u;
use super::gamma::gamma_checked;
use super::kernel::{gamma_u, KernelQuery, POLE_EXCLUSION};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRow {
    pub re_z: f64,
    pub im_z: f64,
    pub zeta: f64,
    /// `|R(z)(x, y)|` at `|x − y|² = 2ζ/B₀`.
    pub kernel_abs: f64,
    /// `|U| / (1 + |ln ζ| + ζ^(n+1))`.
    pub bound_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub b0: f64,
    pub n: usize,
    /// Smallest `C` with `|Γ(w)| ≤ C(B₀/|z − B₀(2n+1)| + 1)` on the z-grid.
    pub c_gamma: f64,
    /// Smallest `C` with `|U| ≤ C(1 + |ln ζ| + ζ^(n+1))` on the grids.
    pub c_u: f64,
    pub rows: Vec<AuditRow>,
}

/// Regular grid over the window around level `n`, skipping points closer
/// than `exclusion·B₀` to the level itself.
pub fn window_grid(b0: f64, n: usize, n_re: usize, n_im: usize, exclusion: f64) -> Vec<Complex64> {
    let level = b0 * (2 * n + 1) as f64;
    let mut out = Vec::new();
    for i in 0..n_re {
        let re = b0 * (2 * n) as f64 + 2.0 * b0 * (i as f64 + 0.5) / n_re as f64;
        for j in 0..n_im {
            let im = -b0 + 2.0 * b0 * (j as f64 + 0.5) / n_im as f64;
            let z = Complex64::new(re, im);
            if (z - level).norm() >= exclusion * b0 {
                out.push(z);
            }
        }
    }
    out
}

/// Log-spaced grid on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

pub fn kernel_bound_audit(b0: f64, n: usize, z_grid: &[Complex64], zeta_grid: &[f64]) -> Result<AuditReport> {
    let level = b0 * (2 * n + 1) as f64;
    let mut c_gamma: f64 = 0.0;
    let mut c_u: f64 = 0.0;
    let mut rows = Vec::with_capacity(z_grid.len() * zeta_grid.len());
    for &z in z_grid {
        let q = KernelQuery::new(b0, z, [0.0, 0.0], [0.0, 0.0]);
        q.check()?;
        let w = q.w();
        let g = gamma_checked(w, 0.5 * POLE_EXCLUSION)?;
        c_gamma = c_gamma.max(g.norm() / (b0 / (z - level).norm() + 1.0));
        for &zeta in zeta_grid {
            let u = confluent_u(w, zeta)?;
            let ratio = u.norm() / (1.0 + zeta.ln().abs() + zeta.powi(n as i32 + 1));
            c_u = c_u.max(ratio);
            let k = gamma_u(w, zeta, 0.5 * POLE_EXCLUSION)?.norm() * (-0.5 * zeta).exp() / (4.0 * std::f64::consts::PI);
            rows.push(AuditRow {
                re_z: z.re,
                im_z: z.im,
                zeta,
                kernel_abs: k,
                bound_ratio: ratio,
            });
        }
    }
    Ok(AuditReport {
        b0,
        n,
        c_gamma,
        c_u,
        rows,
    })
}
