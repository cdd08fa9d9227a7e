//! Numerics for certifying pure quantum states with local single-qubit
//! Haar-random measurements: Pauli-size decompositions of observables,
//! Husimi-function sampling of the measurement protocol, classical-shadow
//! estimators, and the fluctuation lower bounds they obey.
//!
//! The core is generic over the floating-point scalar (see [`Scalar`]);
//! concrete `f64`/`f32` aliases are exported below, and the `f64` set is the
//! documented contract. All stochastic routines take explicit random streams
//! ([`stream::RngStream`]) and produce thread-count-independent results.

pub mod error;
pub mod scalar;
pub mod stream;

pub mod sampling;

pub mod bounds;
pub mod husimi;
pub mod observables;
pub mod pauli;
pub mod qstate;
pub mod shadows;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Version tag carried by every serialized artifact.
pub const SCHEMA: &str = "certbound/1";

// Concrete aliases at the crate root.

pub type StateVector64 = qstate::StateVector<f64>;
pub type StateVector32 = qstate::StateVector<f32>;
pub type Operator64 = qstate::HermitianOperator<f64>;
pub type Operator32 = qstate::HermitianOperator<f32>;
pub type Decomposition64 = pauli::PauliDecomposition<f64>;
pub type Decomposition32 = pauli::PauliDecomposition<f32>;
pub type SizeDistribution64 = pauli::SizeDistribution<f64>;
pub type SizeDistribution32 = pauli::SizeDistribution<f32>;
pub type CoherentConfig64 = husimi::CoherentConfig<f64>;
pub type CoherentConfig32 = husimi::CoherentConfig<f32>;
pub type McEstimate64 = husimi::McEstimate<f64>;
pub type McEstimate32 = husimi::McEstimate<f32>;
pub type BoundReport64 = bounds::BoundReport<f64>;
pub type BoundReport32 = bounds::BoundReport<f32>;
pub type ValidVariation64 = bounds::ValidVariation<f64>;
pub type ValidVariation32 = bounds::ValidVariation<f32>;
pub type FluctuationEstimate64 = shadows::FluctuationEstimate<f64>;
pub type FluctuationEstimate32 = shadows::FluctuationEstimate<f32>;
