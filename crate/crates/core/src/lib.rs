//! Construction and numerical verification of proper-biharmonic Legendre
//! curves in Sasakian space forms, flow cylinders over them, and
//! proper-biharmonic Hopf cylinders over Takagi hypersurfaces of `CP^n`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axioms;
pub mod bitension;
pub mod classify;
pub mod constructors;
pub mod curves;
pub mod diff;
pub mod error;
pub mod hopf;
pub mod models;
pub mod oracle;
pub mod tolerances;

pub use error::{Error, Result};
