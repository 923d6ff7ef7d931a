//! Bayesian optimisation with a pluggable Gaussian-process prior mean.
//!
//! The crate is organised bottom-up:
//!
//! * [`gp`]: Matérn 5/2 Gaussian-process posterior and hyperparameter fitting.
//! * [`mean`]: the eight prior mean functions (constants, ridge polynomials,
//!   RBF network, Extra-Trees).
//! * [`acquisition`]: expected improvement, upper confidence bound and their
//!   multistart maximisation over the unit cube.
//! * [`benchmarks`] and [`design`]: synthetic test problems and maximin Latin
//!   hypercube designs.
//! * [`engine`]: the sequential optimisation loop and experiment grids.
//! * [`analysis`]: median/MAD summaries, paired Wilcoxon tests with Holm
//!   correction, convergence traces and the NRMSE model-error study.

pub mod acquisition;
pub mod analysis;
pub mod benchmarks;
pub mod design;
pub mod engine;
pub mod gp;
pub mod mean;
pub mod optimize;
pub mod rng;
