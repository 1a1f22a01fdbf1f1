//! Numeric result tables and their CSV form.
//!
//! Tables are rectangular, columns are unique, and every emitted file
//! carries a provenance header (tool version, seed, scenario hash) as
//! `#`-prefixed comment lines above the RFC-4180-style body: comma
//! separators, a header row, `.` decimals, LF line endings. Values are
//! written with the shortest representation that round-trips exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Identifies the run that produced a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub tool: String,
    pub seed: u64,
    pub scenario_hash: String,
}

/// Ordered numeric columns with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl ResultTable {
    pub fn new(columns: Vec<String>, provenance: Provenance) -> Result<Self> {
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].contains(c) {
                return Err(Error::Validation {
                    path: "table.columns".into(),
                    message: format!("duplicate column `{c}`"),
                });
            }
        }
        Ok(Self {
            columns,
            rows: Vec::new(),
            provenance,
        })
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Validation {
                path: "table.rows".into(),
                message: format!(
                    "row has {} values for {} columns",
                    row.len(),
                    self.columns.len()
                ),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Index of a named column.
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// All values of a named column.
    pub fn column_values(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// CSV text with the provenance comment header.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# tool: {}", self.provenance.tool).unwrap();
        writeln!(out, "# seed: {}", self.provenance.seed).unwrap();
        writeln!(out, "# scenario_hash: {}", self.provenance.scenario_hash).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for row in &self.rows {
            let line = row
                .iter()
                .map(|v| format_value(*v))
                .collect::<Vec<_>>()
                .join(",");
            writeln!(out, "{line}").unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    /// Parse a table back from its CSV text. Comment lines are read into
    /// the provenance where recognized.
    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut tool = String::new();
        let mut seed = 0u64;
        let mut scenario_hash = String::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("tool:") {
                    tool = v.trim().to_string();
                } else if let Some(v) = comment.strip_prefix("seed:") {
                    seed = v.trim().parse().unwrap_or(0);
                } else if let Some(v) = comment.strip_prefix("scenario_hash:") {
                    scenario_hash = v.trim().to_string();
                }
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(|s| s.to_string()).collect()),
                Some(cols) => {
                    let values: Vec<f64> = line
                        .split(',')
                        .map(|s| {
                            s.parse::<f64>().map_err(|e| Error::Validation {
                                path: format!("csv line {}", lineno + 1),
                                message: format!("`{s}` is not a number: {e}"),
                            })
                        })
                        .collect::<Result<_>>()?;
                    if values.len() != cols.len() {
                        return Err(Error::Validation {
                            path: format!("csv line {}", lineno + 1),
                            message: format!("{} values for {} columns", values.len(), cols.len()),
                        });
                    }
                    rows.push(values);
                }
            }
        }
        let columns = columns.ok_or_else(|| Error::Validation {
            path: "csv".into(),
            message: "missing header row".into(),
        })?;
        let mut table = ResultTable::new(
            columns,
            Provenance {
                tool,
                seed,
                scenario_hash,
            },
        )?;
        for row in rows {
            table.push_row(row)?;
        }
        Ok(table)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }
}

/// Shortest decimal form that parses back to the identical f64.
fn format_value(v: f64) -> String {
    format!("{v}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn provenance() -> Provenance {
        Provenance {
            tool: "pulsesync 0.1.0".into(),
            seed: 42,
            scenario_hash: "abcdef012345".into(),
        }
    }

    #[test]
    fn round_trip_preserves_values_exactly() {
        let mut t = ResultTable::new(
            vec!["a".into(), "b".into(), "c".into()],
            provenance(),
        )
        .unwrap();
        t.push_row(vec![0.1, 2.0 / 3.0, 857.7708764e-6]).unwrap();
        t.push_row(vec![-1.5e-300, 1e300, 0.0]).unwrap();
        let csv = t.to_csv_string();
        let parsed = ResultTable::from_csv_str(&csv).unwrap();
        assert_eq!(parsed, t);
        // Emission is deterministic.
        assert_eq!(csv, t.to_csv_string());
    }

    #[test]
    fn csv_shape_and_endings() {
        let mut t = ResultTable::new(vec!["x".into(), "y".into()], provenance()).unwrap();
        t.push_row(vec![1.0, 2.5]).unwrap();
        let csv = t.to_csv_string();
        assert!(csv.starts_with("# tool: pulsesync"));
        assert!(csv.contains("# seed: 42\n"));
        assert!(csv.contains("# scenario_hash: abcdef012345\n"));
        assert!(csv.contains("\nx,y\n"));
        assert!(csv.ends_with("1,2.5\n"));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn shape_violations_rejected() {
        assert!(ResultTable::new(vec!["a".into(), "a".into()], provenance()).is_err());
        let mut t = ResultTable::new(vec!["a".into(), "b".into()], provenance()).unwrap();
        assert!(t.push_row(vec![1.0]).is_err());
        assert!(t.column_index("missing").is_err());
        assert!(ResultTable::from_csv_str("# only a comment\n").is_err());
        assert!(ResultTable::from_csv_str("a,b\n1,2,3\n").is_err());
        assert!(ResultTable::from_csv_str("a,b\n1,oops\n").is_err());
    }
}
