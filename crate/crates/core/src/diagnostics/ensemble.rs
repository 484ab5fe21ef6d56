//! Per-trial construction of finite-volume operators from field samples.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::field_model::{sample_field, FieldModelConfig, FieldSample, SampledField};
use crate::gauge::{line_integral_gauge, subordinate_field, BoxSpec};
use crate::lattice::{assemble, DiscreteHamiltonian, EigenResult, Stencil};
use crate::{Point, Rect, Result};

/// Eigenvectors with at least this fraction of their mass off the collar
/// count as interior states.
pub const INTERIOR_MASS: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub h: f64,
    #[serde(default)]
    pub stencil: Stencil,
}

impl GridOptions {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            stencil: Stencil::Second,
        }
    }
}

/// A finite-volume operator with the regions of the box it lives on.
#[derive(Debug, Clone)]
pub struct BoxOperator {
    pub op: DiscreteHamiltonian,
    pub bx: BoxSpec,
    /// Sites in `Λ^out = Λ_l ∖ Λ_{l−2}`.
    pub collar: Vec<bool>,
    /// Sites in `Λ^int = Λ_{l/3}`.
    pub interior: Vec<bool>,
}

impl BoxOperator {
    pub fn new(op: DiscreteHamiltonian, bx: BoxSpec) -> Self {
        let collar = op.mask(|p| bx.in_collar(p));
        let interior = op.mask(|p| bx.in_interior(p));
        Self {
            op,
            bx,
            collar,
            interior,
        }
    }

    /// Masks of another box `inner` evaluated on this operator's sites.
    pub fn masks_of(&self, inner: &BoxSpec) -> (Vec<bool>, Vec<bool>) {
        (
            self.op.mask(|p| inner.in_interior(p)),
            self.op.mask(|p| inner.in_collar(p)),
        )
    }

    /// `(λ, collar mass)` for every eigenpair with at most
    /// `1 − INTERIOR_MASS` of its weight on the collar.
    pub fn interior_states(&self, res: &EigenResult) -> Vec<(f64, f64)> {
        (0..res.len())
            .filter_map(|k| {
                let m = res.mass_fraction(k, &self.collar)?;
                (m <= 1.0 - INTERIOR_MASS).then_some((res.values[k], m))
            })
            .collect()
    }
}

/// Sample region `Λ̃` of a box.
pub fn sample_region(config: &FieldModelConfig, bx: &BoxSpec) -> Rect {
    bx.expanded(config.c_delta())
}

/// Field sample covering `Λ̃` of `bx`.
pub fn sample_for_box(config: &FieldModelConfig, bx: &BoxSpec, seed: u64) -> Result<FieldSample> {
    sample_field(config, sample_region(config, bx), seed)
}

fn assemble_with(
    config: &FieldModelConfig,
    sample: Arc<FieldSample>,
    bx: BoxSpec,
    base: Point,
    grid: &GridOptions,
) -> Result<BoxOperator> {
    let field = Arc::new(SampledField::new(config, sample));
    let gauge = line_integral_gauge(field, base);
    let v = config.potential();
    let op = assemble(bx.rect(), &gauge, &v, grid.h, grid.stencil)?;
    Ok(BoxOperator::new(op, bx))
}

/// `H_Λ(A_ω)` on `bx` with the line-integral gauge of `B_ω` based at the
/// box centre.
pub fn box_operator(
    config: &FieldModelConfig,
    bx: &BoxSpec,
    sample: Arc<FieldSample>,
    grid: &GridOptions,
) -> Result<BoxOperator> {
    assemble_with(config, sample, *bx, bx.center, grid)
}

/// Finite-volume stand-in for `H(Ã_Λ)`: the box of side `factor·l` around
/// `bx` carrying the subordinate field `B̃_Λ`.
pub fn proxy_operator(
    config: &FieldModelConfig,
    bx: &BoxSpec,
    sample: &FieldSample,
    factor: f64,
    grid: &GridOptions,
) -> Result<BoxOperator> {
    let sub = subordinate_field(config, sample, bx)?;
    let big = BoxSpec::new(bx.center, factor * bx.side);
    assemble_with(config, Arc::new(sub), big, bx.center, grid)
}
