//! Two-qubit X-states and teleportation fidelity.
//!
//! The crate computes purity, concurrence, optimal teleportation fidelity and
//! Uhlmann fidelity to the Bell states for seven-parameter X-states, each in
//! closed form and through an independent dense-matrix oracle. It also
//! inverts the closed forms: given a target purity and concurrence (plus one
//! auxiliary parameter) it recovers `sin²θ`, synthesizes a concrete state and
//! reports the optimal fidelity that state achieves.
//!
//! Modules, bottom up:
//!
//! - [`linalg`]: Jacobi eigensolver, PSD square root, singular values, Pauli expectations.
//! - [`xstate`]: parameters, validation, rank taxonomy, density-matrix conversion.
//! - [`metrics`]: closed forms paired with oracles, and [`metrics::report`].
//! - [`relations`]: fidelity as a function of purity and concurrence per rank, inverse solvers, synthesis.
//! - [`sweep`]: figure presets, parameter sweeps and CSV output.
//! - [`verify`]: seeded closed-vs-oracle harness.

pub mod error;
pub mod linalg;
pub mod metrics;
pub mod poly;
pub mod relations;
pub mod sampling;
pub mod sweep;
pub mod verify;
pub mod xstate;

pub use error::{Error, RejectedRoot, Result};
pub use linalg::{CorrelationMatrix, DensityMatrix4};
pub use metrics::{report, BellState, MetricsReport};
pub use num_complex::Complex64 as Complex;
pub use relations::{synthesize_state, InverseSolveResult, Relation, RelationInput};
pub use sweep::{figure_preset, run_sweep, SweepRelation, SweepRow, SweepSpec, SweepVariable, Trend};
pub use xstate::{classify_rank, from_density, to_density, validate, DerivedCoefficients, RankClass, RankKind, RawParams, XParams};
