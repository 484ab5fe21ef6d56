//! Seeded realizations of the random coefficients `ω_z^(k)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::FieldModelConfig;
use super::distribution::Sign;
use crate::{Error, Rect, Result};

/// Coefficients of one scale on the index box `[i0, i0+ni) × [j0, j0+nj)`;
/// index `(i, j)` sits at `z = 2^(−k)(i, j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleCoefficients {
    pub k: usize,
    pub i0: i64,
    pub j0: i64,
    pub ni: usize,
    pub nj: usize,
    /// Row-major, `omega[(j − j0)·ni + (i − i0)]`.
    pub omega: Vec<f64>,
}

impl ScaleCoefficients {
    pub fn spacing(&self) -> f64 {
        0.5f64.powi(self.k as i32)
    }

    pub fn get(&self, i: i64, j: i64) -> Option<f64> {
        let (di, dj) = (i - self.i0, j - self.j0);
        if di < 0 || dj < 0 || di as usize >= self.ni || dj as usize >= self.nj {
            None
        } else {
            Some(self.omega[dj as usize * self.ni + di as usize])
        }
    }

    pub fn position(&self, i: i64, j: i64) -> [f64; 2] {
        let s = self.spacing();
        [i as f64 * s, j as f64 * s]
    }

    /// Iterator over `(i, j, ω)`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.omega.iter().enumerate().map(move |(idx, &w)| {
            let i = self.i0 + (idx % self.ni) as i64;
            let j = self.j0 + (idx / self.ni) as i64;
            (i, j, w)
        })
    }
}

/// A realization `{ω_z^(k)}` for `k ≤ K_max` and every `z` whose bump meets
/// `region`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub seed: u64,
    pub region: Rect,
    /// When set, coefficients missing from the index boxes are zero by
    /// construction (subordinate samples) and evaluation is allowed anywhere.
    pub zero_outside: bool,
    pub scales: Vec<ScaleCoefficients>,
}

/// One entry of the JSON coefficient dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub k: usize,
    pub z: [f64; 2],
    pub omega: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Counter-based seed of the coefficient at `(k, i, j)`.
pub fn coefficient_seed(seed: u64, k: usize, i: i64, j: i64) -> u64 {
    let mut h = splitmix64(seed ^ 0x6D61_676C_6162_0001);
    h = splitmix64(h ^ k as u64);
    h = splitmix64(h ^ i as u64);
    splitmix64(h ^ (j as u64).rotate_left(32))
}

/// Derives an independent stream seed, e.g. per Monte Carlo trial.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed ^ 0x7472_6961_6c00_0000) ^ stream)
}

fn index_box(config: &FieldModelConfig, region: &Rect, k: usize) -> Result<(i64, i64, usize, usize)> {
    let scale = 2f64.powi(k as i32);
    let r = config.support_radius(k);
    let eps = 1e-12;
    let i0 = (scale * (region.min[0] - r) - eps).ceil() as i64;
    let i1 = (scale * (region.max[0] + r) + eps).floor() as i64;
    let j0 = (scale * (region.min[1] - r) - eps).ceil() as i64;
    let j1 = (scale * (region.max[1] + r) + eps).floor() as i64;
    let ni = (i1 - i0 + 1).max(0) as usize;
    let nj = (j1 - j0 + 1).max(0) as usize;
    let requested = ni.saturating_mul(nj);
    if requested > config.model.max_coefficients {
        return Err(Error::MemoryCap {
            scale: k,
            requested,
            cap: config.model.max_coefficients,
        });
    }
    Ok((i0, j0, ni, nj))
}

fn build(
    config: &FieldModelConfig,
    region: Rect,
    seed: u64,
    mut coefficient: impl FnMut(usize, i64, i64) -> f64,
) -> Result<FieldSample> {
    if !(region.width() >= 0.0 && region.height() >= 0.0) || !region.area().is_finite() {
        return Err(Error::InvalidInput(format!(
            "region {region:?} is not a bounded rectangle"
        )));
    }
    let mut scales = Vec::with_capacity(config.model.k_max + 1);
    for k in 0..=config.model.k_max {
        let (i0, j0, ni, nj) = index_box(config, &region, k)?;
        let mut omega = Vec::with_capacity(ni * nj);
        for dj in 0..nj {
            for di in 0..ni {
                omega.push(coefficient(k, i0 + di as i64, j0 + dj as i64));
            }
        }
        scales.push(ScaleCoefficients {
            k,
            i0,
            j0,
            ni,
            nj,
            omega,
        });
    }
    Ok(FieldSample {
        seed,
        region,
        zero_outside: false,
        scales,
    })
}

/// Draws every coefficient whose bump meets `region`. Each coefficient has
/// its own generator seeded from `(seed, k, z)`, so overlapping regions agree
/// and the result does not depend on traversal order.
pub fn sample_field(config: &FieldModelConfig, region: Rect, seed: u64) -> Result<FieldSample> {
    build(config, region, seed, |k, i, j| {
        let mut rng = ChaCha8Rng::seed_from_u64(coefficient_seed(seed, k, i, j));
        config.dist.sample(k, config.sigma(k), &mut rng)
    })
}

/// The configuration `ω_+` (all coefficients at `ess sup[ω]_+`) or `ω_−`.
pub fn extremal_sample(config: &FieldModelConfig, region: Rect, sign: Sign) -> Result<FieldSample> {
    build(config, region, 0, |k, _, _| {
        config.dist.extremal(k, config.sigma(k), sign)
    })
}

impl FieldSample {
    pub fn coefficient_count(&self) -> usize {
        self.scales.iter().map(|s| s.omega.len()).sum()
    }

    /// Applies `f(k, z, ω)` to every stored coefficient.
    pub fn map_coefficients(&self, mut f: impl FnMut(usize, [f64; 2], f64) -> f64) -> FieldSample {
        let mut out = self.clone();
        for s in &mut out.scales {
            let (i0, j0, ni, sp) = (s.i0, s.j0, s.ni, s.spacing());
            for (idx, w) in s.omega.iter_mut().enumerate() {
                let z = [
                    (i0 + (idx % ni) as i64) as f64 * sp,
                    (j0 + (idx / ni) as i64) as f64 * sp,
                ];
                *w = f(s.k, z, *w);
            }
        }
        out
    }

    /// Keeps only coefficients with `z ∈ keep` (closed). The result describes
    /// a field that is defined on the whole plane.
    pub fn subordinate(&self, keep: &Rect) -> FieldSample {
        let mut out = self.map_coefficients(|_, z, w| if keep.contains(z) { w } else { 0.0 });
        out.zero_outside = true;
        out
    }

    /// Keeps only coefficients with `z ∉ drop`.
    pub fn complement(&self, drop: &Rect) -> FieldSample {
        self.map_coefficients(|_, z, w| if drop.contains(z) { 0.0 } else { w })
    }

    /// Largest `|ω_z^(k)| / σ^(k)` over stored coefficients.
    pub fn max_ratio(&self, config: &FieldModelConfig) -> f64 {
        self.scales
            .iter()
            .flat_map(|s| {
                let sig = config.sigma(s.k);
                s.omega.iter().map(move |w| {
                    if sig > 0.0 {
                        w.abs() / sig
                    } else if *w == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                })
            })
            .fold(0.0, f64::max)
    }

    pub fn records(&self) -> Vec<CoefficientRecord> {
        self.scales
            .iter()
            .flat_map(|s| {
                s.iter().map(move |(i, j, omega)| CoefficientRecord {
                    k: s.k,
                    z: s.position(i, j),
                    omega,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.records()).expect("records serialize")
    }
}
