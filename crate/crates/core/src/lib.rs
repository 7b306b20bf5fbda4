pub mod corpus;
pub mod error;
pub mod homogeneous;
pub mod possibility;
pub mod prolate;
pub mod quadrature;
pub mod signal;
pub mod spreading;
pub mod suite;
pub mod weights;

pub use error::{Error, Result};
