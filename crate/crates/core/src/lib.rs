//! Exact and floating-point machinery for families of commuting Hamiltonians
//! of Gaudin and argument-shift type on modules of simple Lie algebras,
//! together with the differential-equation side: connections on the
//! projective line, canonical coordinates, and numerical monodromy.
//!
//! Layout:
//! - [`scalar`], [`mat`], [`poly`]: arithmetic kernels, generic over an exact
//!   or floating scalar field.
//!
//! The exact/floating boundary is a single conversion ([`Scalar::to_c64`]):
//! every algebraic identity is established in rational (or Gaussian rational)
//! arithmetic, and floating point is entered only for eigensolvers and ODE
//! transport.

pub mod classical;
pub mod gaudin;
pub mod json;
pub mod mat;
pub mod modules;
pub mod monodromy;
pub mod mpoly;
pub mod normal_form;
pub mod ode;
pub mod opers;
pub mod pbw;
pub mod poly;
pub mod quantum;
pub mod ratmat;
pub mod roots;
pub mod scalar;
pub mod spectra;

mod error;

pub use error::{Error, Result};
pub use roots::{RootSystemData, Series, TypeLabel, Weight};
pub use scalar::{C64, GaussRat, Rat, Scalar};

/// Crate version, for run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exact rational matrices.
pub type QMat = mat::Mat<Rat>;
/// Gaussian-rational matrices.
pub type GMat = mat::Mat<GaussRat>;
/// Complex floating-point matrices.
pub type CMat = mat::Mat<C64>;
