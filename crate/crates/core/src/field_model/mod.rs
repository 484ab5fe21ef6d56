//! Random magnetic field model `B_ω = B₀ + B_var + μ Σ_k Σ_z ω_z^(k) u(2^k(x − z))`
//! and the periodic potential `V`.

pub mod config;
pub mod distribution;
pub mod expr;
pub mod field;
pub mod profile;
pub mod sample;
pub mod validate;

pub use config::{FieldModelConfig, Fields, ModelParams};
pub use distribution::{DistShape, DistributionSpec, Sign};
pub use expr::{PeriodicExpr, Term, TermKind};
pub use field::{field_gradient, field_value, FnField, SampledField, ScalarField};
pub use profile::{ProfileFamily, ProfileSpec, SumBounds};
pub use sample::{
    coefficient_seed, derive_seed, extremal_sample, sample_field, CoefficientRecord, FieldSample, ScaleCoefficients,
};
pub use validate::{validate_model, Check, ValidationReport};

use crate::Point;

/// `Σ_{z∈Z²} u(x − z)`.
pub fn profile_sum(spec: &ProfileSpec, x: Point) -> f64 {
    spec.lattice_sum(x)
}

/// `(c_u, sup U)` from a unit-cell scan with Lipschitz margin.
pub fn profile_sum_bounds(spec: &ProfileSpec, resolution: usize) -> SumBounds {
    spec.lattice_sum_bounds(resolution)
}

/// `u(x)`.
pub fn profile_value(spec: &ProfileSpec, x: Point) -> f64 {
    spec.value(x)
}

/// Sup-norm error `Σ_{k>K_max} σ^(k)` of the scale truncation.
pub fn truncation_bound(config: &FieldModelConfig) -> f64 {
    config.truncation_bound()
}
