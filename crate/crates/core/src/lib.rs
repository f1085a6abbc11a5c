pub mod error;
pub mod operators;
pub mod selftest;
pub mod sim;
pub mod solvers;
pub mod spectral;
pub mod volume;

pub use error::{Error, Result};
