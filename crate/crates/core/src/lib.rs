pub mod arith;
pub mod cli;
pub mod construct;
pub mod error;
pub mod family;
pub mod io;
pub mod matrix;
pub mod poly;
pub mod search;

pub use error::{Error, Result};
