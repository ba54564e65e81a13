// Fifty randomly drawn systems per family, four reconstruction methods each.
//
//     cargo run --release --example batch_comparison -- [logistic|tent] [runs]

use std::time::Instant;

use hidden_driver::pipeline::{run_batch, ExperimentConfig, Method, Preset};

pub fn run_example(family: &str, runs: usize) -> hidden_driver::Result<()> {
    let preset = if family == "tent" { Preset::BatchTent } else { Preset::BatchLogistic };
    let cfg = ExperimentConfig { runs, ..ExperimentConfig::preset(preset) };

    let start = Instant::now();
    let out = run_batch(&cfg, None)?;
    println!(
        "{family}: {}/{} runs completed in {:.1?}",
        out.runs_completed,
        out.runs_requested,
        start.elapsed()
    );
    let redraws: usize = out.runs.iter().map(|r| r.param_draws - 1).sum();
    println!("parameter redraws after divergence: {redraws}");
    for f in &out.failed {
        println!("  run {} failed: {}", f.run_id, f.error);
    }

    println!("{:<8} {:>7} {:>7} {:>7} {:>7}", "method", "median", "q1", "q3", "mad");
    for m in Method::ALL {
        if let Some(s) = out.summaries.get(&m) {
            println!(
                "{:<8} {:>7.3} {:>7.3} {:>7.3} {:>7.3}",
                m.name(),
                s.median,
                s.q1,
                s.q3,
                s.median_absolute_deviation
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hidden_driver::Result<()> {
    let mut args = std::env::args().skip(1);
    let family = args.next().unwrap_or_else(|| "logistic".into());
    let runs = args.next().map_or(50, |r| r.parse().expect("runs must be an integer"));
    run_example(&family, runs)
}
