//! Exact resolvent kernel of the constant-field Landau Hamiltonian.

pub mod audit;
pub mod confluent;
pub mod gamma;
pub mod kernel;

pub use audit::{kernel_bound_audit, log_grid, window_grid, AuditReport, AuditRow};
pub use confluent::{confluent_u, confluent_u_prime, confluent_u_shifted, gamma_u_integral, shifts_needed};
pub use gamma::{gamma_checked, gamma_fn, ln_gamma, pole_distance};
pub use kernel::{gamma_u, landau_kernel, KernelQuery, POLE_EXCLUSION};
