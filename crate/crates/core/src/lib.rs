pub mod bus_model;
pub mod classification;
pub mod codebook;
pub mod codec;
pub mod error;
pub mod evaluation;
pub mod surd;

pub use error::{Error, Result};
