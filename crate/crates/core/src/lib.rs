//! Stochastic SEIR epidemics with Gamma-distributed latent and infectious
//! periods.
//!
//! - [`analytic`]: final size, major-outbreak probability, Malthusian growth
//!   rate and the inversions used for estimating `R0`.
//! - [`simulator`]: exact event-driven simulation of the finite-population
//!   model and of its branching-process limit.
//! - [`estimation`]: growth-rate estimation from incidence data and the
//!   `R0` uncertainty table over interval-valued period parameters.
//! - [`bayes`]: grid posterior of the infectious-period CV given an observed
//!   final size.
//! - [`io`]: CSV and JSON formats plus figure-data emission.

pub mod analytic;
pub mod bayes;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimation;
pub mod io;
pub mod quadrature;
pub mod rng;
pub mod roots;
pub mod simulator;
pub mod special;

pub use distributions::GammaSpec;
pub use error::{Error, Result};
