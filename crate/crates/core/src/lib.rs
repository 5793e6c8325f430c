//! Numerical toolkit for mixed maximally entangled states.

pub mod channels;
pub mod error;
pub mod locc;
pub mod measures;
pub mod mmes;
pub mod qmat;
pub mod teleport;
pub mod weyl;

pub use error::{Error, Result};
