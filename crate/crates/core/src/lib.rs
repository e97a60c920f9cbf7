pub mod dd;
pub mod error;
pub mod quadrature;
pub mod spectral_core;

pub use error::{Error, Result};
pub mod kernel;
pub mod signals;
pub mod predictor;
pub mod analysis;
pub mod cli;
