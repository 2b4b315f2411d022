//! Quaternion matrix algebra and solvers for coupled Sylvester-type systems.

pub mod cli;
pub mod decomp;
pub mod error;
pub mod eta;
pub mod harness;
pub mod io;
pub mod qcore;
pub mod qmatrix;
pub mod solvers;

pub use error::{Error, Result};
pub use qcore::{Eta, Quaternion};
pub use qmatrix::QMatrix;
