pub mod automata;
pub mod error;
pub mod inference;
pub mod logic;
pub mod numbers;
pub mod relations;
pub mod theorems;

pub use error::{Error, Result};
