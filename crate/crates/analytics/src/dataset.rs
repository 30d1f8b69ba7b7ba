//! Ingestion of observation tables for the analytics pipeline.
//!
//! The on-disk shape is a comma-delimited table: one header row naming
//! the columns, one row per observation, the rightmost column being the
//! target (average energy per delivered packet). Lines starting with `#`
//! are commentary (generators prepend their configuration that way) and
//! are skipped along with blank lines.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("no header row found")]
    MissingHeader,
    #[error("need at least one parameter column plus the target, got {0} columns")]
    TooFewColumns(usize),
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("line {line}: expected {expected} fields, got {got}")]
    MalformedRow {
        line: usize,
        got: usize,
        expected: usize,
    },
    #[error("line {line}: cannot parse {value:?} as a number")]
    BadNumber { line: usize, value: String },
    #[error("line {line}: non-finite value")]
    NonFinite { line: usize },
    #[error("header present but no data rows")]
    NoRows,
    #[error("column_names has {names} entries but rows have {width} parameters")]
    ShapeMismatch { names: usize, width: usize },
    #[error("feature matrix has {rows} rows but y has {targets}")]
    LengthMismatch { rows: usize, targets: usize },
}

/// Parameter observations plus the target vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    /// Names of the parameter columns, in `x` column order.
    pub column_names: Vec<String>,
    pub target_name: String,
    /// Row-major observations, one inner vector per sample.
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl Dataset {
    /// Assemble a dataset from in-memory pieces, enforcing the same
    /// shape and finiteness rules as the parser.
    pub fn from_parts(
        column_names: Vec<String>,
        target_name: String,
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
    ) -> Result<Self, DatasetError> {
        if x.len() != y.len() {
            return Err(DatasetError::LengthMismatch {
                rows: x.len(),
                targets: y.len(),
            });
        }
        if x.is_empty() {
            return Err(DatasetError::NoRows);
        }
        let width = x[0].len();
        if column_names.len() != width {
            return Err(DatasetError::ShapeMismatch {
                names: column_names.len(),
                width,
            });
        }
        if width == 0 {
            return Err(DatasetError::TooFewColumns(1));
        }
        for (i, name) in column_names.iter().enumerate() {
            if column_names[..i].contains(name) || *name == target_name {
                return Err(DatasetError::DuplicateColumn(name.clone()));
            }
        }
        for (i, row) in x.iter().enumerate() {
            if row.len() != width {
                return Err(DatasetError::MalformedRow {
                    line: i + 2,
                    got: row.len() + 1,
                    expected: width + 1,
                });
            }
            if row.iter().any(|v| !v.is_finite()) || !y[i].is_finite() {
                return Err(DatasetError::NonFinite { line: i + 2 });
            }
        }
        Ok(Dataset {
            column_names,
            target_name,
            x,
            y,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.y.len()
    }

    pub fn n_parameters(&self) -> usize {
        self.column_names.len()
    }

    /// Copy of parameter column `j` as a series.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.x.iter().map(|row| row[j]).collect()
    }

    /// Serialize back to the delimited form `parse_dataset` reads.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.column_names.join(","));
        out.push(',');
        out.push_str(&self.target_name);
        out.push('\n');
        for (row, target) in self.x.iter().zip(&self.y) {
            for v in row {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{target}\n"));
        }
        out
    }
}

/// Parse the delimited observation table described in the module docs.
pub fn parse_dataset(text: &str) -> Result<Dataset, DatasetError> {
    let mut header: Option<(usize, Vec<String>)> = None;
    let mut x: Vec<Vec<f64>> = Vec::new();
    let mut y: Vec<f64> = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match &header {
            None => {
                if fields.len() < 2 {
                    return Err(DatasetError::TooFewColumns(fields.len()));
                }
                let names: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
                for (i, name) in names.iter().enumerate() {
                    if names[..i].contains(name) {
                        return Err(DatasetError::DuplicateColumn(name.clone()));
                    }
                }
                header = Some((line_no + 1, names));
            }
            Some((_, names)) => {
                if fields.len() != names.len() {
                    return Err(DatasetError::MalformedRow {
                        line: line_no + 1,
                        got: fields.len(),
                        expected: names.len(),
                    });
                }
                let mut row = Vec::with_capacity(fields.len());
                for field in &fields {
                    let v: f64 = field.parse().map_err(|_| DatasetError::BadNumber {
                        line: line_no + 1,
                        value: (*field).to_string(),
                    })?;
                    if !v.is_finite() {
                        return Err(DatasetError::NonFinite { line: line_no + 1 });
                    }
                    row.push(v);
                }
                y.push(row.pop().expect("header guarantees >= 2 fields"));
                x.push(row);
            }
        }
    }

    let (_, mut names) = header.ok_or(DatasetError::MissingHeader)?;
    if y.is_empty() {
        return Err(DatasetError::NoRows);
    }
    let target_name = names.pop().expect("header has >= 2 names");
    Ok(Dataset {
        column_names: names,
        target_name,
        x,
        y,
    })
}
