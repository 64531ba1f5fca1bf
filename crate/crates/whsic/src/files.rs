//! JSON file formats: vectors, block parameters, and reports.
//!
//! All floating-point numbers are serialized as decimal strings with 17
//! significant digits (`{:.16e}`), which round-trips IEEE 754 doubles
//! bit-exactly. Maps use ordered keys so identical inputs produce
//! byte-identical files.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::whbasis::{block_shape, WhBasisParams};

/// Formats a double as a decimal string with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses a decimal string produced by [`format_f64`] (or any `f64` literal).
pub fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::FileFormat(format!("invalid decimal {s:?}: {e}")))
}

fn entry_of(z: Complex64) -> [String; 2] {
    [format_f64(z.re), format_f64(z.im)]
}

fn entry_to_complex(entry: &[String; 2]) -> Result<Complex64> {
    Ok(Complex64::new(parse_f64(&entry[0])?, parse_f64(&entry[1])?))
}

/// What a [`VectorFile`] holds: a length-d fiducial or a length-d² basis
/// vector of the tensor square.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorKind {
    Fiducial,
    BasisVector,
}

/// A complex vector on disk, with entries as `[re, im]` decimal-string pairs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorFile {
    pub d: usize,
    pub kind: VectorKind,
    pub entries: Vec<[String; 2]>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl VectorFile {
    /// Wraps a length-d fiducial vector.
    pub fn fiducial(f: &CVec, metadata: BTreeMap<String, String>) -> Self {
        Self {
            d: f.len(),
            kind: VectorKind::Fiducial,
            entries: f.iter().map(|&z| entry_of(z)).collect(),
            metadata,
        }
    }

    /// Wraps a length-d² basis vector of the tensor square.
    pub fn basis_vector(b: &CVec, d: usize, metadata: BTreeMap<String, String>) -> Self {
        debug_assert_eq!(b.len(), d * d);
        Self {
            d,
            kind: VectorKind::BasisVector,
            entries: b.iter().map(|&z| entry_of(z)).collect(),
            metadata,
        }
    }

    /// Expected entry count for the declared kind.
    pub fn expected_len(&self) -> usize {
        match self.kind {
            VectorKind::Fiducial => self.d,
            VectorKind::BasisVector => self.d * self.d,
        }
    }

    /// Decodes the entries, validating the count against the kind.
    pub fn to_vector(&self) -> Result<CVec> {
        let expected = self.expected_len();
        if self.entries.len() != expected {
            return Err(Error::FileFormat(format!(
                "vector file kind {:?} with d = {} needs {} entries, found {}",
                self.kind,
                self.d,
                expected,
                self.entries.len()
            )));
        }
        let mut v = CVec::zeros(expected);
        for (k, entry) in self.entries.iter().enumerate() {
            v[k] = entry_to_complex(entry)?;
        }
        Ok(v)
    }

    /// Reads and parses a vector file.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Writes the file as pretty-printed JSON with a trailing newline.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Block-unitary parameters on disk: one row-major complex matrix per block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamsFile {
    pub d: usize,
    pub blocks: Vec<Vec<[String; 2]>>,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
}

impl ParamsFile {
    /// Serializes basis parameters.
    pub fn from_params(params: &WhBasisParams, metadata: BTreeMap<String, String>) -> Self {
        Self {
            d: params.d(),
            blocks: params
                .blocks()
                .iter()
                .map(|u| u.iter_rows_row_major().map(entry_of).collect())
                .collect(),
            metadata,
        }
    }

    /// Decodes and validates the parameters.
    pub fn to_params(&self, tol: f64) -> Result<WhBasisParams> {
        let (count, size) = block_shape(self.d);
        if self.blocks.len() != count {
            return Err(Error::FileFormat(format!(
                "params file for d = {} needs {count} blocks, found {}",
                self.d,
                self.blocks.len()
            )));
        }
        let mut blocks = Vec::with_capacity(count);
        for (c, flat) in self.blocks.iter().enumerate() {
            if flat.len() != size * size {
                return Err(Error::FileFormat(format!(
                    "block {c} needs {} entries for size {size}, found {}",
                    size * size,
                    flat.len()
                )));
            }
            let mut u = CMat::zeros(size, size);
            for (pos, entry) in flat.iter().enumerate() {
                u[(pos / size, pos % size)] = entry_to_complex(entry)?;
            }
            blocks.push(u);
        }
        WhBasisParams::new(self.d, blocks, tol)
    }

    /// Reads and parses a params file.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Writes the file as pretty-printed JSON with a trailing newline.
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

trait RowMajorIter {
    fn iter_rows_row_major(&self) -> RowMajor<'_>;
}

struct RowMajor<'a> {
    m: &'a CMat,
    pos: usize,
}

impl Iterator for RowMajor<'_> {
    type Item = Complex64;
    fn next(&mut self) -> Option<Complex64> {
        let n = self.m.ncols();
        if self.pos >= self.m.nrows() * n {
            return None;
        }
        let z = self.m[(self.pos / n, self.pos % n)];
        self.pos += 1;
        Some(z)
    }
}

impl RowMajorIter for CMat {
    fn iter_rows_row_major(&self) -> RowMajor<'_> {
        RowMajor { m: self, pos: 0 }
    }
}

/// One named verdict inside a report: the quantity checked, its numeric
/// value, the threshold applied, and whether it passed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub value: String,
    pub threshold: String,
    pub pass: bool,
}

impl CheckEntry {
    /// Builds a verdict comparing `value < threshold`.
    pub fn less_than(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value: format_f64(value),
            threshold: format_f64(threshold),
            pass: value < threshold,
        }
    }

    /// Builds a verdict comparing `value ≥ threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value: format_f64(value),
            threshold: format_f64(threshold),
            pass: value >= threshold,
        }
    }
}

/// A command report: the command and configuration echo, the verdicts with
/// their residuals, free-form result data, the overall outcome, and
/// wall-clock time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<CheckEntry>,
    #[serde(default)]
    pub results: BTreeMap<String, serde_json::Value>,
    pub pass: bool,
    pub elapsed_seconds: f64,
}

impl ReportFile {
    /// Starts an empty passing report for `command`.
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            config: BTreeMap::new(),
            checks: Vec::new(),
            results: BTreeMap::new(),
            pass: true,
            elapsed_seconds: 0.0,
        }
    }

    /// Records a configuration key.
    pub fn config_entry(&mut self, key: &str, value: impl ToString) {
        self.config.insert(key.to_string(), value.to_string());
    }

    /// Appends a verdict and folds it into the overall outcome.
    pub fn push_check(&mut self, check: CheckEntry) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    /// Records a free-form result value.
    pub fn result(&mut self, key: &str, value: serde_json::Value) {
        self.results.insert(key.to_string(), value);
    }

    /// Records a list of doubles as decimal strings.
    pub fn result_floats(&mut self, key: &str, values: &[f64]) {
        let list: Vec<serde_json::Value> = values
            .iter()
            .map(|&x| serde_json::Value::String(format_f64(x)))
            .collect();
        self.results
            .insert(key.to_string(), serde_json::Value::Array(list));
    }

    /// Records a complex matrix as rows of `[re, im]` string pairs.
    pub fn result_matrix(&mut self, key: &str, m: &CMat) {
        let rows: Vec<serde_json::Value> = (0..m.nrows())
            .map(|i| {
                let row: Vec<serde_json::Value> = (0..m.ncols())
                    .map(|j| {
                        let e = entry_of(m[(i, j)]);
                        serde_json::json!([e[0], e[1]])
                    })
                    .collect();
                serde_json::Value::Array(row)
            })
            .collect();
        self.results
            .insert(key.to_string(), serde_json::Value::Array(rows));
    }

    /// Serializes to pretty JSON (with trailing newline).
    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    /// Writes the report to a file.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
