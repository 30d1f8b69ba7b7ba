//! Rendering of command results to delimited text or JSON.
//!
//! Every file starts with a commented header block echoing the
//! experiment configuration (runtime-only knobs like worker count are
//! deliberately excluded so identical inputs yield identical bytes).

use std::fmt;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

/// One table cell. Numbers keep their type so JSON output stays typed;
/// text renders bare in the delimited form.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum CellValue {
    UInt(u64),
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for CellValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellValue::UInt(v) => write!(f, "{v}"),
            CellValue::Int(v) => write!(f, "{v}"),
            CellValue::Float(v) => write!(f, "{v}"),
            CellValue::Text(v) => write!(f, "{v}"),
        }
    }
}

impl From<u64> for CellValue {
    fn from(v: u64) -> Self {
        CellValue::UInt(v)
    }
}
impl From<usize> for CellValue {
    fn from(v: usize) -> Self {
        CellValue::UInt(v as u64)
    }
}
impl From<i64> for CellValue {
    fn from(v: i64) -> Self {
        CellValue::Int(v)
    }
}
impl From<f64> for CellValue {
    fn from(v: f64) -> Self {
        CellValue::Float(v)
    }
}
impl From<&str> for CellValue {
    fn from(v: &str) -> Self {
        CellValue::Text(v.to_string())
    }
}
impl From<String> for CellValue {
    fn from(v: String) -> Self {
        CellValue::Text(v)
    }
}

/// A rendered command result: echoed settings, free-form notes, and one
/// or more titled tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    /// Ordered (key, value) pairs echoing the effective configuration.
    pub settings: Vec<(String, String)>,
    /// Extra header lines, e.g. exclusion counts.
    pub notes: Vec<String>,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    /// Short name; announces the section in delimited output when a
    /// report carries more than one table.
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<CellValue>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Table {
            title: title.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<CellValue>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.to_string(),
            settings: Vec::new(),
            notes: Vec::new(),
            tables: Vec::new(),
        }
    }

    pub fn setting(&mut self, key: &str, value: impl fmt::Display) {
        self.settings.push((key.to_string(), value.to_string()));
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => {
                let mut s =
                    serde_json::to_string_pretty(self).expect("report serialization cannot fail");
                s.push('\n');
                s
            }
        }
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# wsn-cli {}\n", self.command));
        for (k, v) in &self.settings {
            out.push_str(&format!("# {k} = {v}\n"));
        }
        for note in &self.notes {
            out.push_str(&format!("# {note}\n"));
        }
        let announce = self.tables.len() > 1;
        for table in &self.tables {
            if announce {
                out.push_str(&format!("# table: {}\n", table.title));
            }
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(CellValue::to_string).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }
}

/// Open the output file up front, so a bad path fails before any
/// simulation work starts. `None` means stdout at write time.
pub fn open_output(path: Option<&Path>) -> Result<Option<File>, std::io::Error> {
    path.map(File::create).transpose()
}

/// Write the rendered report to the file opened by [`open_output`], or
/// to stdout.
pub fn write_rendered(target: Option<File>, rendered: &str) -> Result<(), std::io::Error> {
    match target {
        Some(mut f) => f.write_all(rendered.as_bytes()),
        None => std::io::stdout().write_all(rendered.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_report() -> Report {
        let mut report = Report::new("sweep");
        report.setting("base_seed", 7);
        report.setting("node_counts", "100,150");
        report.note("excluded_rows = 2 (zero delivered packets)");
        let mut table = Table::new("results", &["n", "method", "energy"]);
        table.push_row(vec![100usize.into(), "pdtm".into(), 1234.5.into()]);
        table.push_row(vec![150usize.into(), "ddtm".into(), 99.0.into()]);
        report.tables.push(table);
        report
    }

    #[test]
    fn csv_layout_is_header_then_columns_then_rows() {
        let text = sample_report().render(OutputFormat::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# wsn-cli sweep");
        assert_eq!(lines[1], "# base_seed = 7");
        assert_eq!(lines[2], "# node_counts = 100,150");
        assert_eq!(lines[3], "# excluded_rows = 2 (zero delivered packets)");
        assert_eq!(lines[4], "n,method,energy");
        assert_eq!(lines[5], "100,pdtm,1234.5");
        assert_eq!(lines[6], "150,ddtm,99");
        assert_eq!(lines.len(), 7);
    }

    #[test]
    fn single_table_reports_skip_the_section_marker() {
        let text = sample_report().render(OutputFormat::Csv);
        assert!(!text.contains("# table:"));
    }

    #[test]
    fn multiple_tables_are_announced() {
        let mut report = sample_report();
        report.tables.push(Table::new("metrics", &["k", "v"]));
        let text = report.render(OutputFormat::Csv);
        assert!(text.contains("# table: results\n"));
        assert!(text.contains("# table: metrics\n"));
    }

    #[test]
    fn json_round_trips_through_serde() {
        let text = sample_report().render(OutputFormat::Json);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["command"], "sweep");
        assert_eq!(value["tables"][0]["rows"][0][0], 100);
        assert_eq!(value["tables"][0]["rows"][0][1], "pdtm");
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = sample_report().render(OutputFormat::Csv);
        let b = sample_report().render(OutputFormat::Csv);
        assert_eq!(a, b);
        let ja = sample_report().render(OutputFormat::Json);
        let jb = sample_report().render(OutputFormat::Json);
        assert_eq!(ja, jb);
    }

    #[test]
    fn bad_output_path_fails_fast() {
        let err = open_output(Some(Path::new("/nonexistent-dir/deep/file.csv")));
        assert!(err.is_err());
    }
}
