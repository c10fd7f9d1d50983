#![doc = include_str!("../../../README.md")]

pub mod budget;
pub mod dense;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod oracle;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
