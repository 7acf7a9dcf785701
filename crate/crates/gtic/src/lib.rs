//! Analytical barrier of the game of two identical cars.
//!
//! Two vehicles with unit speed and unit minimum turn radius play pursuit
//! and evasion on the plane; the pursuer wins by bringing the evader
//! within a capture circle of radius `ell`. After reduction to the
//! pursuer-fixed frame the game has the single parameter `ell`, and the
//! set of initial states from which capture can be forced is bounded by a
//! two-dimensional barrier surface in `(x, y, theta)`.
//!
//! This crate computes that barrier in closed form for every `ell`:
//!
//! - [`kinematics`]: reduced dynamics, adjoint dynamics, retrograde
//!   flows, switch functions and candidate control laws;
//! - [`roots`]: the transcendental equations fixing the junction
//!   constants, regime roots and crossing parameters;
//! - [`barrier`]: the surface/line parametrizations, regime-dependent
//!   caps, crossings, dispersal line and slice sampling;
//! - [`classify`]: state-vector parametrizations, frame sets, layer
//!   membership and the optimal feedback controls on the barrier;
//! - [`sim`]: forward integration with capture detection,
//!   semipermeability audits and a brute-force discretized game used as
//!   independent ground truth.
//!
//! With the default `parallel` feature the audit sweeps, slice sampling
//! and game-tree search fan out over a rayon pool; disabling it yields a
//! dependency-light sequential build with identical results.

// Negated float comparisons are used deliberately: `!(x < gate)` fails
// closed when `x` is NaN, which audit gates and bracket checks rely on.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod classify;
mod error;
pub mod kinematics;
pub mod roots;
pub mod sim;

pub use barrier::{
    BarrierModel, IntersectionPair, PieceId, PieceParams, Regime, Side, SlicePoint, SurfaceFamily,
    SurfaceParams,
};
pub use classify::{LayerConfig, PieceMatch};
pub use error::{Error, Result};
pub use kinematics::{ControlPair, ControlSet, Costate, State};
pub use roots::RootResult;
