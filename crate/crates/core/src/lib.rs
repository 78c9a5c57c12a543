pub mod ctj;
pub mod error;
pub mod four_dim;
pub mod kahler;
pub mod models;
pub mod operators;
pub mod spectral;
pub mod tensor;
pub mod verify;

pub use error::{CoskError, Result};
