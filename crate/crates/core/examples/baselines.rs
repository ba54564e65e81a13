// Linear baselines on the demonstration split: a phase-randomized copy of the
// driver as the chance level, the first principal component of both
// embeddings, and the first canonical pair.

use hidden_driver::pipeline::{baseline_estimate, score, simulate, split, ExperimentConfig, Method, StageSeeds};

pub fn run_example() -> hidden_driver::Result<()> {
    let cfg = ExperimentConfig::default();
    let seeds = StageSeeds::new(cfg.seed);
    let data = split(&cfg, &simulate(&cfg, &seeds)?.series)?;

    for method in [Method::Random, Method::Pca, Method::Cca] {
        let estimate = baseline_estimate(method, &data, &seeds)?;
        let report = score(method, &estimate, &data, cfg.max_lag, usize::MAX)?;
        println!("{:<6} |rho| {:.3}, best lag {:>3} ({:+.3})", method.name(), report.abs_rho, report.best_lag, report.best_lag_rho);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hidden_driver::Result<()> {
    run_example()
}
