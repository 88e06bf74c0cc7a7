//! Run reports: JSON with a versioned schema, CSV spectra, atomic writes.

use assoc_core::dirac::{Scheme, SpectralReport};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Singular values kept inline per spectrum; the CSV carries all of them.
pub const INLINE_SINGULAR_VALUES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// `value ≤ tolerance`.
    AtMost,
    /// `value ≥ expected`.
    AtLeast,
    /// `value == expected` exactly.
    Equals,
    /// `|value − expected| ≤ tolerance`.
    Near,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Short statement of the property being checked.
    pub reference: String,
    pub pass: bool,
    pub comparison: Comparison,
    pub value: Option<f64>,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Check {
    pub fn at_most(name: &str, reference: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            reference: reference.into(),
            pass: value <= tolerance,
            comparison: Comparison::AtMost,
            value: finite(value),
            expected: None,
            tolerance: Some(tolerance),
        }
    }

    pub fn at_least(name: &str, reference: &str, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            reference: reference.into(),
            pass: value >= bound,
            comparison: Comparison::AtLeast,
            value: finite(value),
            expected: Some(bound),
            tolerance: None,
        }
    }

    pub fn equals(name: &str, reference: &str, value: f64, expected: f64) -> Self {
        Self {
            name: name.into(),
            reference: reference.into(),
            pass: value == expected,
            comparison: Comparison::Equals,
            value: finite(value),
            expected: Some(expected),
            tolerance: Some(0.0),
        }
    }

    pub fn near(name: &str, reference: &str, value: f64, expected: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            reference: reference.into(),
            pass: (value - expected).abs() <= tolerance,
            comparison: Comparison::Near,
            value: finite(value),
            expected: Some(expected),
            tolerance: Some(tolerance),
        }
    }

    /// A boolean property; `value` is 1 when it holds.
    pub fn holds(name: &str, reference: &str, ok: bool) -> Self {
        Self::equals(name, reference, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    /// A step that failed with an error instead of producing a value.
    pub fn errored(name: &str, reference: &str, err: &dyn std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            reference: format!("{reference} (error: {err})"),
            pass: false,
            comparison: Comparison::Equals,
            value: None,
            expected: None,
            tolerance: None,
        }
    }
}

/// A spectral report with the singular values truncated for inline storage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub label: String,
    pub scheme: Scheme,
    pub resolution: Vec<usize>,
    pub tolerance: f64,
    pub dim_ker: usize,
    pub dim_coker: usize,
    pub index: i64,
    pub gap_ratio: f64,
    pub converged: bool,
    pub residuals: BTreeMap<String, f64>,
    /// Smallest singular values, ascending.
    pub singular_values: Vec<f64>,
    pub singular_value_count: usize,
    pub wall_time_ms: u64,
    #[serde(skip)]
    pub all_singular_values: Vec<f64>,
}

impl SpectrumSummary {
    pub fn new(label: &str, r: &SpectralReport) -> Self {
        Self {
            label: label.into(),
            scheme: r.scheme,
            resolution: r.resolution.clone(),
            tolerance: r.tolerance,
            dim_ker: r.dim_ker,
            dim_coker: r.dim_coker,
            index: r.index,
            // An exact zero below the threshold leaves no finite ratio.
            gap_ratio: if r.gap_ratio.is_finite() { r.gap_ratio } else { f64::MAX },
            converged: r.converged,
            residuals: r.residuals.clone(),
            singular_values: r.singular_values.iter().take(INLINE_SINGULAR_VALUES).copied().collect(),
            singular_value_count: r.singular_values.len(),
            wall_time_ms: r.wall_time_ms,
            all_singular_values: r.singular_values.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub label: String,
    pub euler_characteristic: i64,
    pub component_genera: Vec<u32>,
    /// `c₁(ν_X)`.
    pub c1: i64,
    pub c1_mu: i64,
    pub c1_tangent: i64,
    /// `|c₁(μ_X) + c₁(ν_X) + c₁(T∂Y)|`.
    pub tensor_residual: i64,
    pub index: i64,
    pub expected_index: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub example: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub spectra: Vec<SpectrumSummary>,
    pub indices: Vec<IndexSummary>,
    pub checks: Vec<Check>,
    /// Diagnostic values that are reported but not judged.
    pub measurements: BTreeMap<String, f64>,
    pub pass: bool,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(example: &str, seed: u64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            example: example.into(),
            parameters: BTreeMap::new(),
            seed,
            spectra: Vec::new(),
            indices: Vec::new(),
            checks: Vec::new(),
            measurements: BTreeMap::new(),
            pass: true,
            wall_time_ms: 0,
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl Serialize) {
        self.parameters.insert(key.into(), serde_json::to_value(value).expect("parameters serialize"));
    }

    /// Non-finite values are dropped; JSON has no representation for them.
    pub fn measure(&mut self, key: &str, value: f64) {
        if value.is_finite() {
            self.measurements.insert(key.into(), value);
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn spectrum(&mut self, s: SpectrumSummary) {
        self.spectra.push(s);
    }

    /// Drops every timing so reruns are byte-identical.
    pub fn strip_timings(&mut self) {
        self.wall_time_ms = 0;
        for s in &mut self.spectra {
            s.wall_time_ms = 0;
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// `label,position,singular_value` for every stored spectrum.
    pub fn spectra_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["label", "position", "singular_value"]).expect("in-memory write");
        for s in &self.spectra {
            for (i, v) in s.all_singular_values.iter().enumerate() {
                w.write_record([s.label.clone(), i.to_string(), format!("{v:e}")]).expect("in-memory write");
            }
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    pub fn checks_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "pass", "value", "expected", "tolerance", "reference"]).expect("in-memory write");
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for c in &self.checks {
            w.write_record([c.name.clone(), c.pass.to_string(), opt(c.value), opt(c.expected), opt(c.tolerance), c.reference.clone()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "report path has no file name"))?;
    let tmp: PathBuf = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Both,
}

/// Writes `<dir>/<example>.json` and/or `<example>.spectra.csv` and `<example>.checks.csv`.
pub fn write_report(report: &Report, dir: &Path, format: Format) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if matches!(format, Format::Json | Format::Both) {
        let p = dir.join(format!("{}.json", report.example));
        write_atomic(&p, &report.to_json())?;
        written.push(p);
    }
    if matches!(format, Format::Csv | Format::Both) {
        let p = dir.join(format!("{}.spectra.csv", report.example));
        write_atomic(&p, &report.spectra_csv())?;
        written.push(p);
        let p = dir.join(format!("{}.checks.csv", report.example));
        write_atomic(&p, &report.checks_csv())?;
        written.push(p);
    }
    Ok(written)
}
