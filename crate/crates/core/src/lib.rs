//! Logarithmic score, Bregman divergences and sufficiency on finite
//! alphabets.
//!
//! The crate collects the pieces that connect relative entropy to
//! optimization problems:
//!
//! - [`simplex`]: probability vectors, column-stochastic kernels, entropy
//!   and relative entropy (nats throughout).
//! - [`bregman`]: convex generators, Bregman divergences, regret of finite
//!   action families and integer code lengths.
//! - [`scoring`]: proper scoring rules built from generators and the
//!   strictly local rule extracted from them.
//! - [`sufficiency`]: sufficient kernel pairs, recovery by linear
//!   feasibility, and divergence invariance checks.
//! - [`portfolio`]: doubling rates, log-optimal portfolios with
//!   Kuhn–Tucker certificates, and wealth simulation.
//! - [`thermo`]: Gibbs states and extractable work `kT·D(s₁‖s₂)`.

pub mod bregman;
pub mod error;
pub mod json;
pub mod portfolio;
pub mod sample;
pub mod scoring;
pub mod simplex;
pub mod sufficiency;
pub mod thermo;

pub use error::{Error, Result};
pub use simplex::{apply_kernel, entropy, kl_divergence, mixture, Kernel, MixtureWeights, ProbVec};
