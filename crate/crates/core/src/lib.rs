pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod mechanics;

pub use error::{Error, Result};
