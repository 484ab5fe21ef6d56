//! Off-diagonal resolvent decay and eigenvector localization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stats::{linear_fit, LinearFit};
use crate::lattice::{block_resolvent_norm, count_in, BlockNormOptions, DiscreteHamiltonian};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub energy: f64,
    pub window: (f64, f64),
    /// `dist(E, {r, s})`.
    pub eta: f64,
    pub distances: Vec<f64>,
    pub norms: Vec<f64>,
    /// Fit of `log‖1_B R(E) 1_D‖` against the separation; `rate = −slope`.
    pub fit: LinearFit,
    pub rate: f64,
}

/// Sites within sup distance `half` of `c` (periodic on a torus).
fn square_mask(op: &DiscreteHamiltonian, c: Point, half: f64) -> Vec<bool> {
    op.sites
        .iter()
        .map(|&p| op.sup_distance(p, c) <= half + 1e-12)
        .collect()
}

/// Measures `‖1_B (H − E)⁻¹ 1_D‖` for a square `B` of side `2·half` at
/// `source` and squares `D` of the same size whose sup-norm gap to `B` is
/// each entry of `distances` (shifted along the first axis), then fits the
/// exponential rate.
pub fn combes_thomas_fit(
    op: &DiscreteHamiltonian,
    energy: f64,
    window: (f64, f64),
    source: Point,
    half: f64,
    distances: &[f64],
) -> Result<DecayFit> {
    let (r, s) = window;
    if !(r < energy && energy < s) {
        return Err(Error::InvalidInput(format!("energy {energy} is not inside ({r}, {s})")));
    }
    if distances.len() < 2 {
        return Err(Error::InvalidInput("need at least two distances".into()));
    }
    // the edges are usually computed eigenvalues; stay clear of their rounding
    let eps = 1e-8 * r.abs().max(s.abs()).max(1.0);
    let inside = count_in(op, r + eps, s - eps);
    if inside > 0 {
        return Err(Error::Domain(format!(
            "window ({r}, {s}) contains {inside} eigenvalues"
        )));
    }
    let b = square_mask(op, source, half);
    let mut norms = Vec::with_capacity(distances.len());
    for &d in distances {
        let c = [source[0] + 2.0 * half + d, source[1]];
        let dm = square_mask(op, c, half);
        let res = block_resolvent_norm(op, Complex64::new(energy, 0.0), &dm, &b, &BlockNormOptions::default())?;
        norms.push(res.norm);
    }
    let logs: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(distances, &logs);
    Ok(DecayFit {
        energy,
        window,
        eta: (energy - r).min(s - energy),
        distances: distances.to_vec(),
        norms,
        rate: -fit.slope,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Localization {
    pub peak: Point,
    /// `−d log|ψ| / d|x − peak|` from shell maxima.
    pub rate: f64,
    pub r2: f64,
    /// `(Σ|ψ|²)² / Σ|ψ|⁴ · h²`, an area.
    pub participation: f64,
}

fn euclid(op: &DiscreteHamiltonian, p: Point, q: Point) -> f64 {
    let mut d = [(p[0] - q[0]).abs(), (p[1] - q[1]).abs()];
    if let Some(l) = op.periodic {
        for c in &mut d {
            *c = c.rem_euclid(l);
            *c = c.min(l - *c);
        }
    }
    d[0].hypot(d[1])
}

/// Decay rate and participation ratio of an eigenvector. Shells of width
/// `2h` around the amplitude peak contribute their maximum of `log|ψ|` to a
/// least-squares fit against the shell radius, up to `max_radius`.
pub fn localization_length(op: &DiscreteHamiltonian, psi: &[Complex64], max_radius: f64) -> Result<Localization> {
    if psi.len() != op.dim() {
        return Err(Error::InvalidInput(
            "vector length differs from operator dimension".into(),
        ));
    }
    let (peak_idx, _) = psi
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.norm_sqr()))
        .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    let peak = op.sites[peak_idx];
    let width = 2.0 * op.h;
    let shells = (max_radius / width).floor() as usize;
    let mut best = vec![f64::NEG_INFINITY; shells + 1];
    for (p, c) in op.sites.iter().zip(psi) {
        let d = euclid(op, *p, peak);
        let k = (d / width).floor() as usize;
        if k <= shells && c.norm() > 0.0 {
            best[k] = best[k].max(c.norm().ln());
        }
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = best
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(k, &v)| ((k as f64 + 0.5) * width, v))
        .unzip();
    let (rate, r2) = if xs.len() >= 2 {
        let f = linear_fit(&xs, &ys);
        (-f.slope, f.r2)
    } else {
        (0.0, 0.0)
    };
    let s2: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    let s4: f64 = psi.iter().map(|c| c.norm_sqr() * c.norm_sqr()).sum();
    Ok(Localization {
        peak,
        rate,
        r2,
        participation: s2 * s2 / s4 * op.h * op.h,
    })
}
