//! Biconvex splitting for real Gaussian phase retrieval.
//!
//! The signal `x` is recovered (up to global sign) from magnitudes
//! `y_k = |a_kᵀx|` by duplicating the unknown into a pair `(z, w)` with the
//! coupling constraint `z = w`. The crate provides
//!
//! * [`model`]: the measurement ensemble, the finite-sample objective `f`,
//!   the closed-form expected objective `g`, their derivatives and the basin
//!   `N_x` around the truth;
//! * [`solvers`]: spectral initialization, block coordinate descent on `g`
//!   with rank-one closed-form updates, and BCD/ADMM on `f`;
//! * [`theory`]: numerical certificates for strong convexity, block
//!   Lipschitz bounds, descent inequalities, the no-escape algebra and the
//!   linear-rate constants;
//! * [`numerics`]: seeded Gaussian streams and the small dense kernel
//!   (SPD solves, extremal eigenpairs) everything else builds on.

pub mod error;
pub mod model;
pub mod numerics;
pub mod solvers;
pub mod theory;

pub use error::{Error, Result};
pub use model::{EstimatePair, GroundTruth, MeasurementEnsemble};
pub use numerics::{RandomStream, SymMat, Vector};
pub use solvers::{InitVariant, IterateTrace, RhoPolicy, SolveResult, SolveStatus, SolverConfig};
pub use theory::CertificateReport;
