//! De Bruijn covering codes: cyclic strings whose consecutive `n`-windows form
//! a radius-`R` covering code, for q-ary Hamming space and for permutations
//! (order types) under the transposition metric.

pub mod analysis;
pub mod construct;
pub mod coverage;
mod error;
pub mod search;
pub mod spaces;
pub mod windows;

pub use error::{Error, Result};
