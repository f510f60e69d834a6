//! Datasets, diagram pipelines and the benchmark protocol behind the
//! `perskern` command-line tool.

pub mod config;
pub mod data;
pub mod error;
pub mod grams;
pub mod pipeline;
pub mod protocol;
pub mod sweep;

pub use error::{BenchError, Result};
