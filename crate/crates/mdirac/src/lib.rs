//! Matrix Dirac equation toolkit.
//!
//! The matrix Dirac equation iγ^μ∂_μψ = m(ψN + γ⁵ψK) couples a 4×l wave
//! function to an l×l parameter pair (N,K). This crate builds the gamma
//! algebra, the (N,K) parameter classes and their canonical forms, the
//! commutant Lie algebra L(l,N,K) with its orthogonal projector, conserved
//! currents, the Yang-Mills coupling, and the polar gauge — each with the
//! identities they satisfy expressed as tolerance-checked properties.
//!
//! Every structural claim is executable: `suites::verify_all` runs the full
//! property battery and the `mdirac` binary exposes it on the command line.

#![allow(clippy::needless_range_loop)]

pub mod commutant;
pub mod dirac;
pub mod error;
pub mod field;
pub mod gamma;
pub mod gauge;
pub mod jsonio;
pub mod linalg;
pub mod nk;
pub mod report;
pub mod rng;
pub mod suites;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, Tolerances, C64};
