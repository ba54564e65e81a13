// Run a short demo into a directory and export every figure table from it.
//
//     cargo run --release --example export_figures -- out/figures

use std::path::Path;

use hidden_driver::pipeline::export::ManifoldOptions;
use hidden_driver::pipeline::{export_figure_data, run_demo, ExperimentConfig, ExportKind};

pub fn run_example(dir: &Path) -> hidden_driver::Result<()> {
    let cfg = ExperimentConfig {
        length: 6_000,
        train: 4_000,
        test: 2_000,
        dimension_chunk: 3_000,
        iterations: 2_000,
        snapshot_steps: vec![0, 100, 2_000],
        ..ExperimentConfig::default()
    };
    run_demo(&cfg, Some(dir))?;

    for name in ExportKind::NAMES {
        let kind: ExportKind = name.parse()?;
        let csv = export_figure_data(kind, dir, &ManifoldOptions::default())?;
        let path = dir.join(format!("fig_{name}.csv"));
        std::fs::write(&path, &csv).map_err(|e| hidden_driver::Error::io(&path, e))?;
        println!("{name:<17} {:>6} rows  {}", csv.lines().count() - 1, csv.lines().next().unwrap_or(""));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hidden_driver::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "out/figures".into());
    std::fs::create_dir_all(&dir).map_err(|e| hidden_driver::Error::io(Path::new(&dir), e))?;
    run_example(Path::new(&dir))
}
