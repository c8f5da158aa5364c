//! Exact computer algebra for graded quasi-Hopf structures, twistors and
//! elliptic R-matrices of quantum supergroups.
//!
//! Everything here is exact: coefficients are multivariate rational functions
//! over arbitrary-precision rationals, formal series are truncated per
//! variable, and every verified identity reduces to a literal zero rather
//! than a small number.
//!
//! Module layout:
//! - [`rat`], [`poly`], [`ratfunc`], [`series`], [`qseries`] — scalar and
//!   series arithmetic (rationals, Laurent polynomials, rational functions,
//!   truncated power series, q-Pochhammer / basic hypergeometric kernels).
//! - [`superop`] — Z2-graded linear algebra on tensor powers of C^{1|1}.
//! - [`tensor`], [`uqsl11`] — PBW computer algebra for U_q[sl(1|1)], the
//!   universal R-matrix, face twistor, twisting and the axiom verifier.
//! - [`affine`] — the 2-dimensional evaluation representation of the affine
//!   algebra, Drinfeld generator images, R_VV(z) and its product formula.
//! - [`face`], [`vertex`] — face/vertex type twistor images, difference
//!   equations, elliptic R-matrices and dynamical Yang-Baxter checks.
//! - [`rootdata`] — the all-fermionic simple root system of affine sl(n|n).
//! - [`report`] — structured pass/fail records with residual witnesses.
//!
//! The crate is `no_std` + `alloc`; IO, CLI and file formats live in the
//! companion `ellipq-cli` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod affine;
pub mod budget;
pub mod error;
pub mod face;
pub mod poly;
pub mod qseries;
pub mod rat;
pub mod ratfunc;
pub mod report;
pub mod rootdata;
pub mod series;
pub mod superop;
pub mod tensor;
pub mod uqsl11;
pub mod vertex;

pub use error::Error;
pub use rat::Rat;

/// Crate result alias.
pub type Result<T> = core::result::Result<T, Error>;
