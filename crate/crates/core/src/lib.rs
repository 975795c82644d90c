//! Reductions from 3SAT constraint systems to smooth label cover games,
//! with exact distributions, spectral certificates and defect accounting
//! for explicit finite-dimensional strategies.

pub mod clm;
pub mod cs;
pub mod error;
pub mod expanders;
pub mod games;
pub mod linalg;
pub mod reductions;
mod parallel;
pub mod rational;
pub mod values;

pub use error::{Error, Result};
