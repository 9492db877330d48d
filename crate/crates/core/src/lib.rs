//! Low-rank nodal discontinuous Galerkin solver for the 1d2v Boltzmann–BGK
//! equation.
//!
//! The distribution function at every spatial DG node is stored as a
//! truncated-SVD factorisation `Θ S Ψᵀ` over the tensor velocity grid. Time
//! integration is a stiffly accurate second-order IMEX Runge–Kutta scheme:
//! the conserved moments are advanced explicitly, post-processed by an
//! optional slope limiter, converted into discrete Maxwellians with
//! quadrature-corrected moments (QCM), and then used in the implicit BGK
//! relaxation of the kinetic solution.
//!
//! Module overview:
//!
//! - [`lowrank`]: factored matrices, truncated sums and weighted integrals.
//! - [`discretization`]: Gauss–Legendre DG tables and the velocity grid.
//! - [`transport`]: upwind DG flux operators and boundary conditions.
//! - [`moments`]: discrete moments and the moment-system right-hand side.
//! - [`qcm`]: discrete Maxwellians and the QCM Newton solver.
//! - [`limiter`]: troubled-cell detection, minmod and WENO limiters.
//! - [`integrator`]: the IMEX step and time loop.
//! - [`problems`]: smooth, standing-shock and Sod benchmark data.
//! - [`driver`]: run configuration, experiment drivers and CSV output.

pub mod discretization;
pub mod driver;
pub mod error;
pub mod integrator;
pub mod limiter;
pub mod lowrank;
pub mod moments;
pub mod problems;
pub mod qcm;
pub mod transport;

pub use discretization::{gauss_legendre, DGDiscretization, VelocityGrid};
pub use error::{Error, LowRankError, QcmError, Result};
pub use integrator::{cfl_dt, DiagnosticsRecord, ImexTableau, RunOutput, Solver, StepConfig};
pub use limiter::{LimiterKind, TroubledMask};
pub use lowrank::LowRankMatrix;
pub use moments::{compute_moments, MomentField, MomentVector};
pub use problems::{ProblemKind, ProblemSpec};
pub use qcm::{QcmOptions, QcmParams};
pub use transport::{BoundaryCondition, SolutionState};
