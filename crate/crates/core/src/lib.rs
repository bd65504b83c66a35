//! Shortcut-to-adiabaticity state transfer in time-modulated two-level
//! non-Hermitian systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: 2×2 complex operators, vectors and closed-form exponentials.
//! - [`model`]: the hyperboloid parameter map `(x, y) → (k, κ, ε, Δ)`, the
//!   Hamiltonians `H₀`, `H₁`, `Hₘ` and their biorthogonal eigensystems.
//! - [`trajectory`]: closed encircling loops in the `(x, y)` chart, the
//!   complex phase velocity `φ̇` and branch-cut unwrapping.
//! - [`integrator`]: an embedded Dormand–Prince 5(4) pair with dense output.
//! - [`evolution`]: non-unitary propagation and biorthogonal fidelities.
//! - [`experiments`]: spectrum surfaces, control-pulse shapes, transfer runs,
//!   sensitivity sweeps and their CSV/JSON persistence.
//!
//! The numerical core is generic over the scalar type (`f32` or `f64`, see
//! [`Real`]); the experiment pipelines are fixed to `f64`. Concrete aliases
//! for both precisions live at the crate root.

pub mod error;
pub mod evolution;
pub mod experiments;
pub mod integrator;
pub mod linalg;
pub mod model;
pub mod scalar;
pub mod trajectory;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex number.
pub type C64 = num_complex::Complex<f64>;
/// Single-precision complex number.
pub type C32 = num_complex::Complex<f32>;

pub type ChartPoint64 = model::ChartPoint<f64>;
pub type ChartPoint32 = model::ChartPoint<f32>;
pub type PhasePoint64 = model::PhasePoint<f64>;
pub type PhasePoint32 = model::PhasePoint<f32>;
pub type Operator64 = linalg::Operator2<f64>;
pub type Operator32 = linalg::Operator2<f32>;
pub type Basis64 = model::BiorthoBasis<f64>;
pub type Basis32 = model::BiorthoBasis<f32>;
pub type Trajectory64 = trajectory::TrajectorySpec<f64>;
pub type Trajectory32 = trajectory::TrajectorySpec<f32>;
pub type EvolutionConfig64 = evolution::EvolutionConfig<f64>;
pub type EvolutionConfig32 = evolution::EvolutionConfig<f32>;
pub type FidelitySeries64 = evolution::FidelitySeries<f64>;
pub type FidelitySeries32 = evolution::FidelitySeries<f32>;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
