pub mod error;
pub mod extension;
pub mod hamiltonian;
pub mod poly;
pub mod random;
pub mod threefold;
pub mod trunc_aut;
pub mod truncated;
pub mod words;

pub use error::{Error, Result};
