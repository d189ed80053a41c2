pub mod analysis;
pub mod catalog;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod neural;
pub mod record;
pub mod sampling;

pub use error::{Error, Result};
