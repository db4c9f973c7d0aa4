//! Saturability analysis and optimal-measurement synthesis for the
//! multiparameter quantum Cramér-Rao bound.

pub mod construct;
pub mod error;
pub mod geometry;
pub mod hollow;
pub mod io;
pub mod linalg;
pub mod model;
pub mod quasipure;
pub mod report;
pub mod sample;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
