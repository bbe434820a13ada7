//! Littlewood-Richardson coefficients, Schur-Weyl spectrum estimation and
//! numerical witnesses for Horn's problem on density operators.

pub mod check;
pub mod cli;
pub mod converse_scan;
pub mod error;
pub mod horn_realize;
pub mod linalg;
pub mod lr;
pub mod schur_weyl;
pub mod symfun;
pub mod weights;

pub use error::{Error, Result};
