//! Fitted P1 finite elements for elliptic interface problems, conservative
//! flux recovery, and reduction of the interface data to a few modes.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod experiments;
pub mod fem;
pub mod flux;
pub mod linalg;
pub mod mesh;
pub mod quadrature;
pub mod reduction;

pub use error::{Error, Result};
