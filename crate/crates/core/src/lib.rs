pub mod arrangement;
pub mod charts;
pub mod decomposition;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod nested;
pub mod verify;

pub use error::{Error, Result};
