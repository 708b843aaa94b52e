pub mod approximation;
pub mod error;
pub mod harness;
pub mod geometry;
pub mod inradius;
pub mod lp;
pub mod witness;

pub use error::{Error, Result};
