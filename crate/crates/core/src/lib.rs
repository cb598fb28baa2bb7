pub mod effective;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod numerics;

pub use error::{Error, Result, Threshold};
