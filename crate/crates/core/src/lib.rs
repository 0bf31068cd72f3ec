//! Well-balanced central finite-volume solver for two-dimensional ideal MHD
//! with gravity.

pub mod bc;
pub mod cases;
pub mod ctm;
pub mod driver;
pub mod error;
pub mod grid;
pub mod limiter;
pub mod physics;
pub mod scheme;
pub mod wavespeed;

pub use error::{Error, Result};
