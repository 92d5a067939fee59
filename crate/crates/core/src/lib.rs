pub mod annotation;
pub mod baseline;
pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod lm;
pub mod metrics;
pub mod seed;
pub mod text;
pub mod tree;

pub use error::{Error, Result};
