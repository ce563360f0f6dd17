//! Numerical toolkit for the Yamabe problem on spaces with isolated conic
//! singularities.

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod certifier;
pub mod consts;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod io;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod spectrum;

pub use consts::YamabeConstants;
pub use error::{Error, Result};
