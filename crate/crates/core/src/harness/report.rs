//! Structured-text experiment reports.
//!
//! A report is a block of `key=value` lines followed by zero or more tables,
//! each table separated from what precedes it by a single blank line and laid
//! out as a comma-separated header row followed by data rows. Rendering is a
//! pure function of the record contents, so identical records produce
//! byte-identical files — reports double as regression artifacts that can be
//! diffed across runs.
//!
//! Values are formatted with Rust's shortest-round-trip float formatting;
//! writing a field twice with the same bits yields the same text.

use crate::error::Result;
use std::fmt::Display;
use std::fs;
use std::path::Path;

/// One comma-separated table: a header row plus data rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    header: String,
    rows: Vec<String>,
}

impl Table {
    /// Start a table from its header row, e.g. `"t,estimate,true,err"`.
    pub fn new(header: &str) -> Self {
        Table { header: header.to_owned(), rows: Vec::new() }
    }

    /// Append one pre-joined data row.
    pub fn push_row(&mut self, row: String) {
        self.rows.push(row);
    }

    /// Append one row from its cells.
    pub fn push_cells(&mut self, cells: &[String]) {
        self.rows.push(cells.join(","));
    }

    pub fn header(&self) -> &str {
        &self.header
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// An experiment report: ordered `key=value` pairs plus ordered tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    kvs: Vec<(String, String)>,
    tables: Vec<Table>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// Record `key=value`. Keys keep insertion order; nothing deduplicates,
    /// so callers own the discipline of writing each key once.
    pub fn push_kv(&mut self, key: &str, value: impl Display) {
        self.kvs.push((key.to_owned(), value.to_string()));
    }

    /// Record an optional value as either its contents or the literal
    /// `none`, keeping reports grep-stable across parameterizations.
    pub fn push_opt<T: Display>(&mut self, key: &str, value: Option<T>) {
        match value {
            Some(v) => self.push_kv(key, v),
            None => self.push_kv(key, "none"),
        }
    }

    pub fn push_table(&mut self, table: Table) {
        self.tables.push(table);
    }

    /// Look up the first value recorded under `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.kvs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.kvs.iter().map(|(k, _)| k.as_str())
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    /// Render the full document. Every line ends with `\n`; tables are
    /// separated by single blank lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.kvs {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        for table in &self.tables {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push_str(&table.header);
            out.push('\n');
            for row in &table.rows {
                out.push_str(row);
                out.push('\n');
            }
        }
        out
    }
}

/// Write `report` to `path`. The write is one `fs::write` of the rendered
/// document, so two emissions of the same record are byte-identical.
pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    fs::write(path, report.render())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new();
        r.push_kv("kind", "counter-bench");
        r.push_kv("T", 4usize);
        r.push_kv("eps", 0.5f64);
        r.push_opt::<f64>("bound", None);
        let mut t = Table::new("t,estimate,true,err");
        t.push_row("1,0.5,1,0.5".to_owned());
        t.push_cells(&["2".to_owned(), "1.25".to_owned(), "1".to_owned(), "0.25".to_owned()]);
        r.push_table(t);
        r
    }

    #[test]
    fn render_layout_is_exact() {
        let text = sample().render();
        assert_eq!(
            text,
            "kind=counter-bench\nT=4\neps=0.5\nbound=none\n\n\
             t,estimate,true,err\n1,0.5,1,0.5\n2,1.25,1,0.25\n"
        );
        println!("[PASS] report renders key=value block plus comma tables");
    }

    #[test]
    fn same_record_twice_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.txt");
        let b = dir.path().join("b.txt");
        emit_report(&sample(), &a).unwrap();
        emit_report(&sample(), &b).unwrap();
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert!(!fs::read(&a).unwrap().is_empty());
        println!("[PASS] identical records emit byte-identical files");
    }

    #[test]
    fn unwritable_path_reports_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("missing-subdir").join("r.txt");
        let err = emit_report(&sample(), &bad).unwrap_err();
        assert!(matches!(err, crate::Error::Io(_)), "got {err:?}");
        println!("[PASS] unwritable path surfaces as an I/O error");
    }

    #[test]
    fn lookup_and_float_stability() {
        let r = sample();
        assert_eq!(r.get("eps"), Some("0.5"));
        assert_eq!(r.get("bound"), Some("none"));
        assert_eq!(r.get("absent"), None);
        // Shortest-round-trip formatting is a pure function of the bits.
        let third = 1.0f64 / 3.0;
        let mut r2 = Report::new();
        r2.push_kv("q", third);
        let mut r3 = Report::new();
        r3.push_kv("q", third);
        assert_eq!(r2.render(), r3.render());
        println!("[PASS] key lookup and float formatting are stable");
    }
}
