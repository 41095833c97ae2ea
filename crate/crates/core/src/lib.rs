//! Two-place means on real intervals.
//!
//! The crate is organised around a single abstraction, [`TwoPlaceFunction`]:
//! an evaluable map `F: [a,b]² → [a,b]`. On top of it sit
//!
//! * [`means`]: constructors for quasi-arithmetic, weighted, translative and
//!   min/max ("gap function") operations, plus a catalog of named means;
//! * [`verify`]: grid and seeded randomized checks of reflexivity, symmetry,
//!   bisymmetry, associativity, strictness, cancellativity and neutral
//!   elements, each returning a report with a reproducible witness;
//! * [`extract`]: recovery of the generator `f` of a bisymmetric mean on the
//!   dyadic rationals via `f((d1+d2)/2) = F(f(d1), f(d2))`, with consistency,
//!   monotonicity and gap diagnostics and a reconstruction check.

// `!(a < b)` style comparisons are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dyadic;
pub mod error;
pub mod extract;
pub mod function;
pub mod interval;
pub mod means;
pub mod sampling;
pub mod tolerance;
pub mod verify;

pub use dyadic::DyadicRational;
pub use error::{Error, Result};
pub use function::{Provenance, TwoPlaceFunction};
pub use interval::Interval;
pub use tolerance::ToleranceConfig;
