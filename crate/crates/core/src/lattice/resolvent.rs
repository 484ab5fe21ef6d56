//! Resolvents `(H − z)⁻¹` of lattice operators.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::band::{BandLdlt, BandLu};
use super::eigen::count_in;
use super::DiscreteHamiltonian;
use crate::{Error, Result};

/// Shifts closer than this (relative to `max(1, |z|)`) to an eigenvalue are
/// refused.
pub const NEAR_SINGULAR: f64 = 1e-9;

enum Factor {
    Real(BandLdlt),
    Complex(BandLu),
}

/// A factored `H − z` ready for repeated solves.
pub struct Resolvent<'a> {
    pub z: Complex64,
    h: &'a DiscreteHamiltonian,
    factor: Factor,
}

/// Distance from `x` to the spectrum if it is below `radius`, by bisection on
/// the eigenvalue counting function.
pub fn spectral_distance_below(h: &DiscreteHamiltonian, x: f64, radius: f64) -> Option<f64> {
    if count_in(h, x - radius, x + radius) == 0 {
        return None;
    }
    let (mut lo, mut hi) = (0.0, radius);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if count_in(h, x - mid, x + mid) > 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

impl<'a> Resolvent<'a> {
    pub fn new(h: &'a DiscreteHamiltonian, z: Complex64) -> Result<Self> {
        let radius = NEAR_SINGULAR * z.norm().max(1.0);
        if z.im.abs() < radius {
            if let Some(d) = spectral_distance_below(h, z.re, radius) {
                if d.hypot(z.im) < radius {
                    return Err(Error::NearSingular {
                        shift: z.re,
                        distance: d.hypot(z.im),
                    });
                }
            }
        }
        let factor = if z.im == 0.0 {
            Factor::Real(BandLdlt::factor(&h.matrix, z.re))
        } else {
            Factor::Complex(BandLu::factor(&h.matrix, z))
        };
        Ok(Self { z, h, factor })
    }

    fn raw_solve(&self, x: &mut [Complex64]) {
        match &self.factor {
            Factor::Real(f) => f.solve_in_place(x),
            Factor::Complex(f) => f.solve_in_place(x),
        }
    }

    /// `(H − z)⁻¹ b` with one step of iterative refinement.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut y = b.to_vec();
        self.raw_solve(&mut y);
        let hy = self.h.matrix.apply(&y);
        let mut r: Vec<Complex64> = b
            .iter()
            .zip(&hy)
            .zip(&y)
            .map(|((bi, hi), yi)| bi - (hi - self.z * yi))
            .collect();
        self.raw_solve(&mut r);
        for (a, c) in y.iter_mut().zip(&r) {
            *a += c;
        }
        y
    }

    /// `‖(H − z) x − b‖ / ‖b‖`.
    pub fn relative_residual(&self, x: &[Complex64], b: &[Complex64]) -> f64 {
        let hx = self.h.matrix.apply(x);
        let num: f64 = hx
            .iter()
            .zip(x)
            .zip(b)
            .map(|((hi, xi), bi)| (hi - self.z * xi - bi).norm_sqr())
            .sum();
        let den: f64 = b.iter().map(|c| c.norm_sqr()).sum();
        (num / den).sqrt()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BlockNormOptions {
    pub rel_tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for BlockNormOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            max_iter: 400,
            seed: 0xb10c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockNorm {
    pub norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

fn project(v: &mut [Complex64], mask: &[bool]) {
    for (c, &m) in v.iter_mut().zip(mask) {
        if !m {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// `‖P_out (H − z)⁻¹ P_in‖` by power iteration on `Rᴴ P_out R` restricted to
/// the range of `P_in`.
pub fn block_resolvent_norm(
    h: &DiscreteHamiltonian,
    z: Complex64,
    input: &[bool],
    output: &[bool],
    opts: &BlockNormOptions,
) -> Result<BlockNorm> {
    let n = h.dim();
    if input.len() != n || output.len() != n {
        return Err(Error::InvalidInput(
            "mask length differs from operator dimension".into(),
        ));
    }
    if !input.iter().any(|&m| m) || !output.iter().any(|&m| m) {
        return Err(Error::InvalidInput("empty site set".into()));
    }
    let r = Resolvent::new(h, z)?;
    let adjoint = if z.im == 0.0 {
        None
    } else {
        Some(Resolvent::new(h, z.conj())?)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Complex64> = (0..n)
        .map(|_| {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(a, b)
        })
        .collect();
    project(&mut x, input);
    let mut prev = 0.0;
    for it in 1..=opts.max_iter {
        let nx = norm(&x);
        for c in &mut x {
            *c /= nx;
        }
        let mut y = r.solve(&x);
        project(&mut y, output);
        let nu = norm(&y);
        if it > 1 && (nu - prev).abs() <= opts.rel_tol * nu {
            return Ok(BlockNorm {
                norm: nu,
                iterations: it,
                converged: true,
            });
        }
        prev = nu;
        if nu == 0.0 {
            return Ok(BlockNorm {
                norm: 0.0,
                iterations: it,
                converged: true,
            });
        }
        x = match &adjoint {
            Some(a) => a.solve(&y),
            None => r.solve(&y),
        };
        project(&mut x, input);
    }
    Ok(BlockNorm {
        norm: prev,
        iterations: opts.max_iter,
        converged: false,
    })
}
