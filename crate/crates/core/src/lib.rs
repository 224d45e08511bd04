#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
pub mod error;
pub mod hyperbolic;
pub mod barriers;
pub mod boundary;
pub mod catenoid;
pub mod hull;
pub mod io;
pub mod mesh;
pub mod obstruction;
pub mod ode;
pub mod quadrature;
pub mod translation;
pub mod verify;

pub use error::{Error, Result};
