pub mod ball;
pub mod error;
pub mod eval;
pub mod hecke;
pub mod qexp;

pub use ball::{BallComplex, BallReal};
pub use error::{Error, Result};
