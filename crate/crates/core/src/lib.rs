//! Boundary GL₂ quantum statistical mechanics and limiting modular symbols.

pub mod arith;
pub mod cf;
pub mod coset;
pub mod cusp;
pub mod error;
pub mod linalg;
pub mod lms;
pub mod modsym;
pub mod par;
pub mod qsm;
pub mod red;
pub mod zeta;

pub use error::{Error, Result};
