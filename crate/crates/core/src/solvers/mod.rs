//! Spectral initialization, block coordinate descent and ADMM.

mod config;
mod critical;
mod expected;
mod finite;
mod spectral;
mod trace;

pub use config::{InitVariant, RhoPolicy, SolverConfig, SpectralVariant, THEOREM_RHO_RELATIVE};
pub use critical::{check_critical_point, CriticalPointReport};
pub use expected::{bcd_expected_step_w, bcd_expected_step_z, run_bcd_expected};
pub use finite::{admm_finite_step, augmented_lagrangian, bcd_finite_step, run_admm_finite, run_bcd_finite};
pub use spectral::{initial_point, spectral_init};
pub use trace::{IterateTrace, SolveResult, SolveStatus, TraceRecord};
