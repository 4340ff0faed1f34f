//! Densities of linearly normalized maxima, Rényi entropies of max-stable
//! laws, and convergence-rate experiments for the Fréchet and Gumbel
//! max-domains of attraction.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: quadrature, root finding, sup-norm search, log-log fits.
//! - [`distributions`]: parent laws with tail-accurate survival functions.
//! - [`maxstable`]: the Fréchet, Weibull and Gumbel limit laws.
//! - [`norming`]: norming constants, auxiliary function, von Mises remainders.
//! - [`maxima`]: density and df of the normalized maximum, penultimate family.
//! - [`entropy`]: Rényi/Shannon entropies and entropy gaps.
//! - [`rates`]: n-sweeps, rate fits and uniform-bound verification.
//! - [`cli`]: configuration and table output for the `evt-renyi` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod numerics;
pub mod distributions;
pub mod maxstable;
pub mod norming;
pub mod maxima;
pub mod entropy;
pub mod rates;
pub mod cli;

pub use distributions::{DistributionModel, DomainTag};
pub use error::{Error, Result};
pub use maxstable::{limit_for, MaxStableLaw};
