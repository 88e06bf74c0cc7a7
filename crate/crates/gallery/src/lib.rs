//! Example catalog, acceptance harness and report plumbing for the
//! associative deformation toolkit.

pub mod acceptance;
pub mod algebra;
pub mod catalog;
pub mod config;
pub mod examples;
pub mod probes;
pub mod report;
pub mod surfaces;

pub use catalog::{ExampleName, ExampleParams, ExampleSpec};
pub use config::RunConfig;
pub use examples::run_example;
pub use report::{Check, Report};

#[derive(Debug, thiserror::Error)]
pub enum GalleryError {
    /// Bad flags, config file or parameter ranges.
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] assoc_core::Error),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
}

impl GalleryError {
    /// 2 for configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            GalleryError::Config(_) => 2,
            _ => 1,
        }
    }
}
