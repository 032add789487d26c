//! Core numerics for directional-asymmetry analysis of bivariate data.
//!
//! The pipeline estimates marginal densities with the self-consistent
//! (frequency-domain) kernel density estimator, turns them into plug-in
//! differential entropies, and cross-fits the asymmetry coefficient
//! `C_{X→Y} = H(X) − H(Y)` together with its asymptotic variance, so that
//! one-sided tests of directionality under contracting or expanding
//! dynamics are possible. Monte Carlo runners and a spline-based noise
//! diagnostic sit on top of the estimator stack.
//!
//! The crate is `no_std` (with `alloc`); all floating-point math routes
//! through [`float::FloatExt`] so the same code builds with or without
//! the standard library.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod diagnostic;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod float;
pub mod gem;
pub mod inference;
pub mod quad;
pub mod sce;
pub mod stats;

pub use error::{Error, Result};
