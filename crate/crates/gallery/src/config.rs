//! Run configuration, from flags or a JSON file mirroring them.

use crate::catalog::ExampleParams;
use crate::report::Format;
use crate::GalleryError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 20240611;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Directory receiving reports; nothing is written when absent.
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    /// Zero all timings so reruns with one seed are byte-identical.
    pub bit_reproducible: bool,
    /// Run independent examples concurrently.
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { out: None, format: Format::Json, seed: DEFAULT_SEED, bit_reproducible: false, parallel: false }
    }
}

/// The JSON config file: every field optional, flags win over file values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub bit_reproducible: Option<bool>,
    pub parallel: Option<bool>,
    pub resolution: Option<usize>,
    pub rho: Option<f64>,
    pub lambda: Option<f64>,
    pub a: Option<f64>,
    pub e: Option<[f64; 7]>,
    pub axes: Option<[f64; 3]>,
    pub level: Option<usize>,
    pub tol: Option<f64>,
    pub refine: Option<Vec<usize>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, GalleryError> {
        let text = std::fs::read_to_string(path).map_err(|e| GalleryError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| GalleryError::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn params(&self) -> ExampleParams {
        ExampleParams {
            resolution: self.resolution,
            rho: self.rho,
            lambda: self.lambda,
            a: self.a,
            e: self.e,
            axes: self.axes,
            level: self.level,
            tol: self.tol,
            refine: self.refine.clone(),
        }
    }
}
