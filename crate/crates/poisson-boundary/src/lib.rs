//! Computations in the noncommutative Poisson boundary of the full Fock space.

pub mod arith;
pub mod choi_effros;
pub mod classification;
pub mod cuntz;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod modular;
pub mod quantization;
pub mod random;
pub mod scalar;
pub mod structure;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
