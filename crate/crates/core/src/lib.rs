pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod filter;
pub mod hermite;
pub mod moments;
pub mod multi_index;
pub mod reference;
pub mod simulation;
pub mod solver;

pub use error::{ConfigError, Error, Result};
