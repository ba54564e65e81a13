//! Plain-text table helpers shared by the CSV writers and readers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A numeric CSV table held column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(headers: Vec<String>, columns: Vec<Vec<f64>>) -> Self {
        Self { headers, columns }
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::Csv(format!("missing column `{name}`")))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Csv("empty file".into()))?;
        let headers: Vec<String> = header.split(',').map(|h| h.trim().to_string()).collect();
        let mut columns = vec![Vec::new(); headers.len()];
        for (n, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != headers.len() {
                return Err(Error::Csv(format!("row {} has {} fields, expected {}", n + 1, fields.len(), headers.len())));
            }
            for (col, f) in columns.iter_mut().zip(fields) {
                let v = f.trim().parse::<f64>().map_err(|_| Error::Csv(format!("row {}: bad number `{f}`", n + 1)))?;
                col.push(v);
            }
        }
        Ok(Self { headers, columns })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Writes the table; integer-named columns (`t`, `i`, `j`, `step`, `k`) are printed without decimals.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", self.headers.join(","))?;
        let integral: Vec<bool> = self.headers.iter().map(|h| matches!(h.as_str(), "t" | "i" | "j" | "step" | "k" | "row")).collect();
        for r in 0..self.rows() {
            let row: Vec<String> = self
                .columns
                .iter()
                .zip(&integral)
                .map(|(c, &int)| if int { format!("{}", c[r] as i64) } else { fmt_f64(c[r]) })
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to a Vec cannot fail");
        write_file(path, &buf)
    }
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789, std::f64::consts::PI] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
            assert_eq!(s.split('e').next().unwrap().replace(['-', '.'], "").len(), 17);
        }
    }

    #[test]
    fn table_parse_rejects_ragged_rows() {
        assert!(Table::parse("a,b\n1,2\n3\n").is_err());
        let t = Table::parse("t,x\n0,1.5\n1,2.5\n").unwrap();
        assert_eq!(t.column("x").unwrap(), &[1.5, 2.5]);
        assert!(t.column("y").is_err());
    }
}
