//! One-dimensional nonlinear thermoelasticity.
//!
//! The crate integrates the hyperbolic-parabolic system
//!
//! ```text
//! u_tt = u_xx - (f(Θ))_x,    Θ_t = Θ_xx - f(Θ) u_xt,    u = Θ_x = 0 on the boundary,
//! ```
//!
//! directly (leapfrog for the wave part, implicit heat step) and through its
//! fourth-order parabolic regularization with parameter ε (IMEX schemes), and
//! evaluates the identities and stability constants that govern well-posedness
//! of the problem for rough initial data.
//!
//! Module map:
//!
//! * [`grid`]: uniform mesh, boundary-aware difference operators, norms, interval
//!   embedding constants.
//! * [`banded`]: Thomas and pentadiagonal LU solvers.
//! * [`material`]: constitutive function `f` and the weight `f'/f`.
//! * [`solver`]: regularized and limit integrators, trajectories.
//! * [`diagnostics`]: energy/mass identities, weak-form residuals, difference norms.
//! * [`bounds`]: explicit constants of the difference and short-time estimates.
//! * [`experiments`]: end-to-end verification studies.
//! * [`io`]: config parsing, exports, plot scripts.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod banded;
pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod grid;
pub mod init;
pub mod io;
pub mod material;
pub mod solver;

pub use error::{Error, Result};
pub use exec::Exec;
pub use grid::{BcKind, Field, Grid};
pub use material::{Material, MaterialKind};
pub use solver::{Scheme, SolverConfig, State, ThetaCoupling, Trajectory};
