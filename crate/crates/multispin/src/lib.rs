//! Partition functions E e^{lambda f} of multi-spin systems: exact
//! enumeration, rigorous log-scale bounds on a zero-free disc, and a
//! polynomial-interpolation approximation scheme, for discrete spin models
//! and a Gaussian-measure analogue.
//!
//! The central objects are [`spinmodel::SpinSystem`] (finite probability
//! spaces with low-arity Lipschitz factors) and [`gaussian::GaussianModel`]
//! (Gaussian coordinates with a certified factor catalog). For admissible
//! coupling strengths the partition function is zero-free on an explicit
//! disc, its modulus is bounded above and below, and
//! [`interpolate::approximate_partition`] computes log E e^{lambda f} to
//! any requested additive accuracy from polynomially many moments.

pub mod builders;
pub mod corpus;
pub mod error;
pub mod exact;
pub mod formats;
pub mod gaussian;
pub mod interpolate;
pub mod moments;
pub mod spinmodel;

pub use error::{Error, Result};
