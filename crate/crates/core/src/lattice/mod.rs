//! Finite-volume lattice Hamiltonians and linear algebra on them.

mod assemble;
pub mod band;
pub mod convergence;
pub mod eigen;
pub mod export;
mod grid;
pub mod resolvent;
pub mod sparse;
pub mod torus;

use serde::{Deserialize, Serialize};

pub use assemble::{assemble, resolution_warning, MAX_B0_H2};
pub use band::{BandLdlt, BandLu};
pub use convergence::{convergence_study, ConvergenceStudy};
pub use eigen::{
    count_below, count_in, eigs_window, full_spectrum, full_spectrum_capped, lowest_eigenvalues, EigenResult,
    WindowOptions, DENSE_CAP,
};
pub use grid::Grid;
pub use resolvent::{block_resolvent_norm, BlockNorm, BlockNormOptions, Resolvent};
pub use sparse::CsrMatrix;
pub use torus::{torus_landau, TorusSpec};

use crate::{Point, Rect};

/// Finite-difference order of the kinetic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    #[default]
    Second,
    Fourth,
}

/// A Hermitian lattice operator together with the positions of its sites.
#[derive(Debug, Clone)]
pub struct DiscreteHamiltonian {
    pub sites: Vec<Point>,
    pub h: f64,
    pub matrix: CsrMatrix,
    /// Present for Dirichlet boxes.
    pub grid: Option<Grid>,
    /// Side length of the periodic cell for operators on a torus.
    pub periodic: Option<f64>,
    pub stencil: Stencil,
}

impl DiscreteHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.n
    }

    pub fn mask(&self, f: impl Fn(Point) -> bool) -> Vec<bool> {
        self.sites.iter().map(|&p| f(p)).collect()
    }

    /// Sites inside `r` (closed).
    pub fn rect_mask(&self, r: &Rect) -> Vec<bool> {
        self.mask(|p| r.contains(p))
    }

    /// Sup-norm distance, periodic when the operator lives on a torus.
    pub fn sup_distance(&self, p: Point, q: Point) -> f64 {
        let mut d = [(p[0] - q[0]).abs(), (p[1] - q[1]).abs()];
        if let Some(l) = self.periodic {
            for c in &mut d {
                *c = c.rem_euclid(l);
                *c = c.min(l - *c);
            }
        }
        d[0].max(d[1])
    }

    /// Sup-norm distance between two site sets.
    pub fn set_distance(&self, a: &[bool], b: &[bool]) -> f64 {
        let pa: Vec<Point> = self.sites.iter().zip(a).filter(|(_, &m)| m).map(|(p, _)| *p).collect();
        let pb: Vec<Point> = self.sites.iter().zip(b).filter(|(_, &m)| m).map(|(p, _)| *p).collect();
        let mut best = f64::INFINITY;
        for p in &pa {
            for q in &pb {
                best = best.min(self.sup_distance(*p, *q));
            }
        }
        best
    }
}
