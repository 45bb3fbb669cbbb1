//! Command-line pipeline, file formats and the synthetic demo corpus built
//! on `rxnsplit-core`.

pub mod config;
pub mod demo;
pub mod error;
pub mod formats;
pub mod pipeline;
