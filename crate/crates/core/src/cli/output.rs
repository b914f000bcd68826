//! Tables and their text renderings.

use crate::error::Result;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Svg,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Table => "txt",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn table(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.10e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Seventeen significant digits, enough to round-trip any `f64`.
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Two-column `key value` table.
    pub fn summary(name: impl Into<String>, pairs: Vec<(&str, Cell)>) -> Self {
        let mut t = Self::new(name, &["key", "value"]);
        for (k, v) in pairs {
            t.push(vec![k.into(), v]);
        }
        t
    }

    pub fn render_table(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::table).collect()).collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| cells.iter().map(|r| r[c].len()).chain([self.columns[c].len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, items: &[String]| {
            let parts: Vec<String> = items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(&mut out, &self.columns.iter().map(|c| c.to_string()).collect::<Vec<_>>());
        for r in &cells {
            line(&mut out, r);
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            let parts: Vec<String> = r.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", parts.join(","));
        }
        out
    }
}

/// Everything a subcommand produces.
#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    /// Standalone SVG document, if the subcommand draws one.
    pub plot: Option<String>,
}

impl Report {
    /// Text written to stdout when no output directory is given.
    pub fn render(&self, format: Format) -> String {
        if format == Format::Svg {
            return self.plot.clone().unwrap_or_default();
        }
        let many = self.tables.len() > 1;
        let mut out = String::new();
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            if many {
                let _ = writeln!(out, "# {}", t.name);
            }
            out.push_str(&match format {
                Format::Csv => t.render_csv(),
                _ => t.render_table(),
            });
        }
        out
    }

    /// One file per table, named `<table>.<ext>`, plus `<stem>.svg` for a plot.
    /// Returns the written paths in order.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<Vec<std::path::PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let text_format = if format == Format::Svg { Format::Table } else { format };
        for t in &self.tables {
            let path = dir.join(format!("{}.{}", t.name, text_format.extension()));
            let body = match text_format {
                Format::Csv => t.render_csv(),
                _ => t.render_table(),
            };
            std::fs::write(&path, body)?;
            written.push(path);
        }
        if format == Format::Svg {
            if let Some(svg) = &self.plot {
                let path = dir.join(format!("{stem}.svg"));
                std::fs::write(&path, svg)?;
                written.push(path);
            }
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["q", "value", "note"]);
        t.push(vec![3usize.into(), 0.1.into(), "a,b".into()]);
        t.push(vec![10usize.into(), (-2.5e-12).into(), "x".into()]);
        t
    }

    #[test]
    fn csv_round_trips_floats() {
        let csv = sample().render_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "q,value,note");
        assert_eq!(lines[1], "3,1.0000000000000001e-1,\"a,b\"");
        let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(v, -2.5e-12);
    }

    #[test]
    fn table_is_right_aligned() {
        let text = sample().render_table();
        let widths: Vec<usize> = text.lines().map(str::len).collect();
        assert!(widths.iter().all(|w| *w == widths[0]));
    }

    #[test]
    fn sections_only_for_several_tables() {
        let one = Report {
            tables: vec![sample()],
            plot: None,
        };
        assert!(!one.render(Format::Csv).contains('#'));
        let two = Report {
            tables: vec![sample(), sample()],
            plot: None,
        };
        assert_eq!(two.render(Format::Table).matches("# demo").count(), 2);
    }
}
