//! CSV tables with `#` comment headers, written atomically.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Render with 17 significant digits; non-finite values become `nan`,
/// `inf` or `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

#[derive(Default)]
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self { header: header.iter().map(|s| s.as_ref().to_string()).collect(), ..Self::default() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(
            row.into_iter()
                .map(|c| match c {
                    Cell::Num(x) => fmt_f64(x),
                    Cell::Text(s) => s,
                })
                .collect(),
        );
    }

    /// Move the comments and rows of `other` (which must share the header,
    /// or `self` must have none) onto `self`.
    pub fn append(&mut self, other: Table) {
        if self.header.is_empty() {
            self.header = other.header;
        }
        self.comments.extend(other.comments);
        self.rows.extend(other.rows);
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for c in &self.comments {
            writeln!(out, "# {c}").map_err(CliError::Io)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    /// Write to `path` through a temporary file in the same directory, or to
    /// stdout when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.render()?;
        match path {
            None => std::io::stdout().write_all(&bytes).map_err(CliError::Io),
            Some(path) => {
                let dir = match path.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d,
                    _ => Path::new("."),
                };
                let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::Io)?;
                tmp.write_all(&bytes).map_err(CliError::Io)?;
                tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for x in [411.39, -1.0577e-3, 1e-300, std::f64::consts::PI, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(fmt_f64(f64::NAN), "nan");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn comments_come_first() {
        let mut t = Table::new(&["x", "y"]);
        t.comment("preset = fig3");
        t.push(vec![1.0.into(), "a".into()]);
        let s = String::from_utf8(t.render().unwrap()).unwrap();
        assert_eq!(s, "# preset = fig3\nx,y\n1.0000000000000000e0,a\n");
    }
}
