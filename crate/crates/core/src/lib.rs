//! Stochastic toolkit for the kinetic energy of a damped, noise-driven
//! particle.
//!
//! The velocity of a particle of mass `m` with linear damping `gamma` and
//! white-noise forcing of amplitude `sigma` follows the linear SDE
//!
//! ```text
//! m dV_t = -gamma V_t dt + sigma dW_t
//! ```
//!
//! whose kinetic energy `K_t = m V_t^2 / 2` can be described either by an
//! Ito equation (unique solution, leaves zero immediately) or by a
//! Stratonovich equation (zero is absorbing and the solution is wildly
//! non-unique). This crate provides:
//!
//! - [`model`]: parameter sets, uniform time grids, reproducible noise
//!   streams, and validated path containers;
//! - [`specfun`]: Dawson integrals, their antiderivative, the normal CDF,
//!   a 2F2 hypergeometric series, and adaptive quadrature;
//! - [`exact`]: distributionally exact sampling of the velocity process and
//!   the closed-form mean-energy law;
//! - [`integrators`]: Euler-Maruyama for the Ito energy equation and a Heun
//!   predictor-corrector for the Stratonovich one;
//! - [`spurious`]: construction of non-physical Stratonovich solutions that
//!   park at zero energy for arbitrary waiting times, plus a discrete
//!   residual metric that certifies them;
//! - [`mfpt`]: the closed-form mean first-passage time to zero energy, its
//!   finite-boundary counterpart, and an ODE-residual verifier;
//! - [`stats`]: streaming ensemble statistics, empirical first-passage
//!   estimation, moment and Kolmogorov-Smirnov tests, and a demonstration
//!   of the divergent kinetic energy of the undamped Brownian scaling.
//!
//! The crate is `no_std` (with `alloc`); all floating-point special
//! functions route through `libm`. Randomness is counter-seeded per path so
//! that every ensemble is bit-reproducible regardless of thread count.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod exact;
pub mod integrators;
pub mod mfpt;
pub mod model;
pub mod specfun;
pub mod spurious;
pub mod stats;

pub use error::{Error, Result};
