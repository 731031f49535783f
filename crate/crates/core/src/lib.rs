pub mod channel;
pub mod closed_form;
pub mod coupling;
pub mod error;
pub mod geometry;
pub mod monte_carlo;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
