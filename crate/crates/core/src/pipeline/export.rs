//! Tidy CSV exports of run artifacts, one observation per row, for external plotting.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::asom::load_grid;
use crate::dimension::DimensionReport;
use crate::embedding::delay_embed;
use crate::error::{Error, Result};
use crate::io::{fmt_f64, Table};
use crate::neighbors::NeighborIndex;

use super::{dimension_curves_csv, read_series, snapshots_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportKind {
    /// Embedded `X`, `Y` (and `Z`) with neighborhoods of `X` highlighted in all of them.
    Manifold,
    DimensionCurves,
    /// The trained grid, one row per node.
    Grid,
    Snapshots,
    Readout,
}

impl ExportKind {
    pub const NAMES: [&'static str; 5] = ["manifold", "dimension-curves", "grid", "snapshots", "readout"];
}

impl FromStr for ExportKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "manifold" => ExportKind::Manifold,
            "dimension-curves" => ExportKind::DimensionCurves,
            "grid" => ExportKind::Grid,
            "snapshots" => ExportKind::Snapshots,
            "readout" => ExportKind::Readout,
            other => return Err(Error::UnknownExportKind(other.to_string())),
        })
    }
}

/// Settings of the manifold export.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldOptions {
    pub m: usize,
    pub tau: usize,
    /// Leading samples to embed.
    pub samples: usize,
    pub neighbors: usize,
    /// Seed rows of the highlighted patches; empty picks rows at 1/3 and 2/3.
    pub seed_rows: Vec<usize>,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        Self { m: 3, tau: 1, samples: 5_000, neighbors: 20, seed_rows: Vec::new() }
    }
}

/// Renders the `kind` export of the artifacts in `dir` as CSV text.
///
/// Reads `series.csv`, `dimension_report.json`, `grid.asom`, `snapshots.csv`
/// or `readout.csv` as the kind requires.
pub fn export_figure_data(kind: ExportKind, dir: &Path, manifold: &ManifoldOptions) -> Result<String> {
    let need = |name: &str| {
        let p = dir.join(name);
        if p.exists() {
            Ok(p)
        } else {
            Err(Error::Config(format!("artifact {} not found", p.display())))
        }
    };
    match kind {
        ExportKind::Manifold => manifold_csv(&read_series(&need("series.csv")?)?, manifold),
        ExportKind::DimensionCurves => {
            let path = need("dimension_report.json")?;
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let report: DimensionReport = serde_json::from_str(&text)?;
            Ok(dimension_curves_csv(&report))
        }
        ExportKind::Grid => {
            let grid = load_grid(&need("grid.asom")?)?;
            let mut t = snapshots_table(&[(0, grid)]);
            t.headers.remove(0);
            t.columns.remove(0);
            Ok(table_text(&t))
        }
        ExportKind::Snapshots => {
            let t = Table::read(&need("snapshots.csv")?)?;
            expect_headers(&t, &["step", "i", "j"])?;
            Ok(table_text(&t))
        }
        ExportKind::Readout => {
            let t = Table::read(&need("readout.csv")?)?;
            expect_headers(&t, &["t", "z_norm", "zhat_norm"])?;
            Ok(table_text(&t))
        }
    }
}

fn expect_headers(t: &Table, prefix: &[&str]) -> Result<()> {
    if t.headers.len() < prefix.len() || t.headers.iter().zip(prefix).any(|(h, p)| h != p) {
        return Err(Error::Csv(format!("expected columns starting with {prefix:?}, found {:?}", t.headers)));
    }
    Ok(())
}

fn table_text(t: &Table) -> String {
    let mut buf = Vec::new();
    t.write(&mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("table output is UTF-8")
}

fn manifold_csv(series: &crate::dynamics::SimulationOutput, o: &ManifoldOptions) -> Result<String> {
    let n = o.samples.min(series.len());
    let x = delay_embed(&series.x[..n], o.m, o.tau)?;
    let y = delay_embed(&series.y[..n], o.m, o.tau)?;
    let z = series.z.as_ref().map(|z| delay_embed(&z[..n], o.m, o.tau)).transpose()?;
    let rows = x.rows();
    let seeds = if o.seed_rows.is_empty() { vec![rows / 3, 2 * rows / 3] } else { o.seed_rows.clone() };
    let index = NeighborIndex::new(&x)?;
    let mut patch = vec![0usize; rows];
    for (p, &s) in seeds.iter().enumerate() {
        if s >= rows {
            return Err(Error::InvalidParameter(format!("seed row {s} outside {rows} rows")));
        }
        for t in std::iter::once(s).chain(index.knn(s, o.neighbors, true)?.into_iter().map(|nb| nb.index)) {
            if patch[t] == 0 {
                patch[t] = p + 1;
            }
        }
    }
    let mut out = String::from("manifold,t");
    for c in 0..o.m {
        write!(out, ",c{c}").unwrap();
    }
    out.push_str(",patch\n");
    let mut emit = |name: &str, e: &crate::embedding::EmbeddedSeries| {
        for (t, row) in e.iter_rows().enumerate() {
            write!(out, "{name},{t}").unwrap();
            for v in row {
                write!(out, ",{}", fmt_f64(*v)).unwrap();
            }
            writeln!(out, ",{}", patch[t]).unwrap();
        }
    };
    emit("X", &x);
    emit("Y", &y);
    if let Some(z) = &z {
        emit("Z", z);
    }
    Ok(out)
}
