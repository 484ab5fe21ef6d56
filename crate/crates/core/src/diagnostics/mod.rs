//! Measurements built on the lattice operators.

pub mod bands;
pub mod boxes;
pub mod decay;
pub mod ensemble;
pub mod ids;
pub mod lifshitz;
pub mod multiscale;
pub mod pool;
pub mod record;
pub mod stats;
pub mod trial;
pub mod wegner;

pub use bands::{
    band_sandwich_mc, calibrate_c_ext, constant_field_box, discretization_budget, edge_scaling, forbidden_interval_mc,
    landau_clusters, lattice_level, ClusterReport, EdgeScaling, EdgeScalingParams, ForbiddenParams, ForbiddenResult,
    SandwichParams, SandwichResult,
};
pub use boxes::{balanced_mc, good_box_mc, BalancedParams, BalancedResult, GoodBoxParams, GoodBoxResult};
pub use decay::{combes_thomas_fit, localization_length, DecayFit, Localization};
pub use ensemble::{box_operator, proxy_operator, sample_for_box, BoxOperator, GridOptions, INTERIOR_MASS};
pub use ids::{ids_histogram, IdsParams, IdsResult};
pub use lifshitz::{lifshitz_tail_mc, LifshitzParams, LifshitzResult};
pub use multiscale::MultiscaleParams;
pub use record::{content_hash, DiagnosticRecord};
pub use stats::{linear_fit, wilson, CiMethod, Estimate, LinearFit};
pub use trial::{continuum_residual, trial_residual_scan, trial_state, ResidualScan};
pub use wegner::{wegner_mc, WegnerParams, WegnerResult};
