//! Metric approximations of finitely generated groups.

pub mod certify;
pub mod construct;
pub mod error;
pub mod groups;
pub mod profiles;
pub mod targets;

pub use error::{Error, Result};
