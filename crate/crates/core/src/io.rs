//! CSV ingestion, the pit props fixture and persisted result records.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matcore::{Matrix, SymMatrix};

const PITPROPS_CSV: &str = include_str!("../fixtures/pitprops.csv");

/// Variable names of the pit props data, in fixture order.
pub const PITPROPS_VARIABLES: [&str; 13] = [
    "topdiam", "length", "moist", "testsg", "ovensg", "ringtop", "ringbut", "bowmax", "bowdist",
    "whorls", "clear", "knots", "diaknot",
];

/// The 13×13 pit props correlation matrix.
pub fn pitprops() -> SymMatrix {
    let m = parse_matrix(PITPROPS_CSV, b',', false).expect("fixture parses");
    to_symmetric(&m).expect("fixture is symmetric")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// A square symmetric matrix.
    MatrixCsv,
    /// Observations in rows, variables in columns.
    DataCsv,
    /// Binary bag-of-words, documents in rows.
    BowCsv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub path: PathBuf,
    pub format: Format,
    pub delimiter: u8,
    pub header: bool,
    pub center: bool,
}

impl DatasetSpec {
    pub fn new(path: impl Into<PathBuf>, format: Format) -> Self {
        Self {
            path: path.into(),
            format,
            delimiter: b',',
            header: false,
            center: true,
        }
    }
}

/// Parses delimited numeric text. Blank lines are skipped; rows must all have
/// the same width. Row and column numbers in errors are 1-based.
pub fn parse_matrix(text: &str, delimiter: u8, header: bool) -> Result<Matrix> {
    let delim = delimiter as char;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (li, line) in text.lines().enumerate() {
        if header && li == 0 {
            continue;
        }
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(delim)
            .enumerate()
            .map(|(ci, field)| {
                let f = field.trim();
                let v: f64 = f.parse().map_err(|_| Error::Parse {
                    row: li + 1,
                    col: ci + 1,
                    message: format!("not a number: {f:?}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        row: li + 1,
                        col: ci + 1,
                        message: "non-finite value".into(),
                    });
                }
                Ok(v)
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    row: li + 1,
                    col: row.len().min(first.len()) + 1,
                    message: format!("expected {} fields, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("no data rows".into()));
    }
    Matrix::from_rows(&rows)
}

fn to_symmetric(m: &Matrix) -> Result<SymMatrix> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch {
            expected: m.rows(),
            found: m.cols(),
        });
    }
    SymMatrix::new(m.rows(), m.as_slice().to_vec())
}

pub fn read_table(spec: &DatasetSpec) -> Result<Matrix> {
    let text = fs::read_to_string(&spec.path)?;
    parse_matrix(&text, spec.delimiter, spec.header)
}

/// Loads a matrix according to `spec`: `MatrixCsv` as is, `DataCsv` as
/// `CᵀC`, `BowCsv` as the document gram matrix `EEᵀ`.
pub fn load_matrix(spec: &DatasetSpec) -> Result<SymMatrix> {
    let m = read_table(spec)?;
    match spec.format {
        Format::MatrixCsv => to_symmetric(&m),
        Format::DataCsv => covariance_from_data(&m, spec.center, false),
        Format::BowCsv => gram_from_bow(&m),
    }
}

/// `CᵀC` of the (optionally column-centered) data; divided by `p − 1` when
/// `scaled`.
pub fn covariance_from_data(data: &Matrix, center: bool, scaled: bool) -> Result<SymMatrix> {
    let p = data.rows();
    if p == 0 || data.cols() == 0 {
        return Err(Error::InvalidInput("empty data matrix".into()));
    }
    let c = if center {
        crate::scca::center_columns(data)
    } else {
        data.clone()
    };
    let g = c.gram();
    if scaled {
        if p < 2 {
            return Err(Error::InvalidInput(
                "scaled covariance needs at least two rows".into(),
            ));
        }
        Ok(g.scaled(1.0 / (p - 1) as f64))
    } else {
        Ok(g)
    }
}

fn check_binary(docs: &Matrix) -> Result<()> {
    for i in 0..docs.rows() {
        for (j, v) in docs.row(i).iter().enumerate() {
            if *v != 0.0 && *v != 1.0 {
                return Err(Error::Parse {
                    row: i + 1,
                    col: j + 1,
                    message: format!("non-binary entry {v}"),
                });
            }
        }
    }
    Ok(())
}

/// `EEᵀ` for a binary document-by-word matrix `E`.
pub fn gram_from_bow(docs: &Matrix) -> Result<SymMatrix> {
    check_binary(docs)?;
    Ok(docs.transpose().gram())
}

/// Word co-occurrence `EᵀE` for a binary document-by-word matrix `E`.
pub fn vocabulary_gram(docs: &Matrix) -> Result<SymMatrix> {
    check_binary(docs)?;
    Ok(docs.gram())
}

/// Canonical content hash: shape and little-endian bit patterns of every
/// block, in order.
pub fn fingerprint(blocks: &[(&str, usize, usize, &[f64])]) -> String {
    let mut h = Sha256::new();
    for (name, rows, cols, data) in blocks {
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        h.update((*rows as u64).to_le_bytes());
        h.update((*cols as u64).to_le_bytes());
        for v in *data {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

pub fn fingerprint_sym(s: &SymMatrix) -> String {
    fingerprint(&[("A", s.n(), s.n(), s.as_slice())])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub solver: String,
    pub config: BTreeMap<String, serde_json::Value>,
    /// One solution vector per component.
    pub x: Vec<Vec<f64>>,
    pub objective: Vec<f64>,
    pub cardinality: Vec<usize>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_step_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub fingerprint: String,
}

impl ResultRecord {
    pub fn new(solver: impl Into<String>, fingerprint: String) -> Self {
        Self {
            solver: solver.into(),
            config: BTreeMap::new(),
            x: Vec::new(),
            objective: Vec::new(),
            cardinality: Vec::new(),
            iterations: Vec::new(),
            converged: Vec::new(),
            final_step_norm: None,
            extra: BTreeMap::new(),
            timestamp: None,
            fingerprint,
        }
    }
}

pub fn save_result(record: &ResultRecord, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(record)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn load_result(path: &Path) -> Result<ResultRecord> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Seconds since the Unix epoch, for optional record timestamps.
pub fn unix_timestamp() -> String {
    let d = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .unwrap_or_default();
    d.as_secs().to_string()
}
