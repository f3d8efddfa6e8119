//! fflab: a numerical laboratory for weighted Fekete sets, Fejer
//! constants, orthogonal polynomials, and weighted interpolation
//! operators on the real line.

pub mod analysis;
pub mod error;
pub mod fekete;
pub mod induced;
pub mod interp;
pub mod linalg;
pub mod orthopoly;
pub mod quad;
pub mod weights;

pub use error::{Error, Result};
