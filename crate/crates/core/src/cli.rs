//! Command-line front end.
//!
//! Every subcommand resolves an [`ExperimentConfig`] from `--config`, an
//! optional `--preset` and `--seed`, then writes its artifacts under `--out`.
//! Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::asom::{check_readout_correlation, load_grid, readout, save_grid};
use crate::dynamics::SampledExperiment;
use crate::embedding::{delay_embed, joint_embed, standardize, time_permute_joint, EmbeddedSeries, JointConstant};
use crate::error::{Error, Result};
use crate::evaluation::evaluate;
use crate::io::{write_file, Table};
use crate::pipeline::{
    self, baseline_estimate, dimension_analysis, dimension_curves_csv, evaluation_csv, export_figure_data,
    parse_methods, read_series, readout_table, snapshots_table, split, train_grid, write_series, EvaluationRow,
    ExperimentConfig, ExportKind, Method, Preset, StageSeeds,
};
use crate::pipeline::export::ManifoldOptions;

#[derive(Debug, Parser)]
#[command(name = "hidden-driver", version, about = "Reconstruct a hidden common driver from two observed chaotic signals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML configuration; keys not given keep their preset values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Preset applied before the config file: demo, batch-logistic, batch-tent.
    #[arg(long)]
    pub preset: Option<String>,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the configured system into series.csv.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Delay-embed x and y of a series (X.csv, Y.csv, joint J.csv, permuted I.csv).
    Embed {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        tau: Option<usize>,
    },
    /// Intrinsic dimensions of X, Y, their joint and its permuted copy.
    Dimension {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Train the anisotropic grid on the training split.
    Train {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Read the driver estimate of the test split from a trained grid.
    Infer {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        grid: PathBuf,
    },
    /// Score a `t,z_norm,zhat_norm` table. Positive lags mean the truth trails the estimate.
    Evaluate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Method label of the estimate.
        #[arg(long, default_value = "asom")]
        method: String,
    },
    /// Driver estimate of a baseline: random, pca or cca.
    Baseline {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        method: String,
    },
    /// Repeat simulation and reconstruction over sampled systems.
    Batch {
        #[command(flatten)]
        common: Common,
        /// Comma-separated methods, overriding the config.
        #[arg(long)]
        method: Option<String>,
        /// Number of runs, overriding the config.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Tidy CSV of a run directory for external plotting.
    Export {
        #[command(flatten)]
        common: Common,
        /// Run directory holding the artifacts.
        #[arg(long)]
        input: PathBuf,
        /// manifold, dimension-curves, grid, snapshots or readout.
        #[arg(long)]
        kind: String,
    },
    /// The full single-system workflow.
    Demo {
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate { common }
            | Command::Embed { common, .. }
            | Command::Dimension { common, .. }
            | Command::Train { common, .. }
            | Command::Infer { common, .. }
            | Command::Evaluate { common, .. }
            | Command::Baseline { common, .. }
            | Command::Batch { common, .. }
            | Command::Export { common, .. }
            | Command::Demo { common } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Simulate { .. } => "simulate",
            Command::Embed { .. } => "embed",
            Command::Dimension { .. } => "dimension",
            Command::Train { .. } => "train",
            Command::Infer { .. } => "infer",
            Command::Evaluate { .. } => "evaluate",
            Command::Baseline { .. } => "baseline",
            Command::Batch { .. } => "batch",
            Command::Export { .. } => "export",
            Command::Demo { .. } => "demo",
        }
    }
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_config() {
        2
    } else {
        3
    }
}

/// Parses `args`, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn resolve(common: &Common, fallback: Preset) -> Result<ExperimentConfig> {
    let preset = common.preset.as_deref().map(str::parse).transpose()?.unwrap_or(fallback);
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            if text.lines().any(|l| l.trim_start().starts_with("preset")) {
                ExperimentConfig::parse(&text)?
            } else {
                ExperimentConfig::parse(&format!("preset = \"{}\"\n{text}", preset_name(preset)))?
            }
        }
        None => ExperimentConfig::preset(preset),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn preset_name(p: Preset) -> &'static str {
    match p {
        Preset::Demo => "demo",
        Preset::BatchLogistic => "batch-logistic",
        Preset::BatchTent => "batch-tent",
    }
}

fn out_dir(common: &Common, name: &str) -> Result<PathBuf> {
    let dir = common.out.clone().unwrap_or_else(|| ExperimentConfig::default_out(name));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    Ok(dir)
}

fn json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn embedded_csv(e: &EmbeddedSeries, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    e.write_csv(&mut buf).map_err(|err| Error::io(path, err))?;
    write_file(path, &buf)
}

#[derive(Serialize)]
struct SystemRecord<'a> {
    seeds: StageSeeds,
    experiment: &'a SampledExperiment,
    resample_count: usize,
    param_draws: usize,
}

/// Runs a parsed command.
pub fn run(cli: &Cli) -> Result<()> {
    let cmd = &cli.command;
    let common = cmd.common();
    let fallback = if matches!(cmd, Command::Batch { .. }) { Preset::BatchLogistic } else { Preset::Demo };
    let mut cfg = resolve(common, fallback)?;
    let seeds = StageSeeds::new(cfg.seed);
    let out = out_dir(common, cmd.name())?;
    match cmd {
        Command::Simulate { .. } => {
            let sim = pipeline::simulate(&cfg, &seeds)?;
            write_series(&sim.series, &out.join("series.csv"))?;
            json(
                &SystemRecord {
                    seeds,
                    experiment: &sim.experiment,
                    resample_count: sim.series.resample_count,
                    param_draws: sim.param_draws,
                },
                &out.join("system.json"),
            )?;
            println!("{} samples -> {}", sim.series.len(), out.join("series.csv").display());
        }
        Command::Embed { input, m, tau, .. } => {
            let series = read_series(input)?;
            let (m, tau) = (m.unwrap_or(cfg.som_m), tau.unwrap_or(cfg.som_tau));
            let x = delay_embed(&series.x, m, tau)?;
            let y = delay_embed(&series.y, m, tau)?;
            let a = JointConstant::new(cfg.joint_a)?;
            embedded_csv(&x, &out.join("X.csv"))?;
            embedded_csv(&y, &out.join("Y.csv"))?;
            embedded_csv(&joint_embed(&x, &y, a)?, &out.join("J.csv"))?;
            embedded_csv(&time_permute_joint(&x, &y, a, seeds.permute)?, &out.join("I.csv"))?;
            println!("{} rows of dimension {m} -> {}", x.rows(), out.display());
        }
        Command::Dimension { input, .. } => {
            let report = dimension_analysis(&cfg, &read_series(input)?, &seeds)?;
            json(&report, &out.join("dimension_report.json"))?;
            write_file(&out.join("dimension_curves.csv"), dimension_curves_csv(&report).as_bytes())?;
            println!(
                "D_X {:.3}  D_Y {:.3}  D_J {:.3}  D_I {:.3}  D_Z {:.3}  {}",
                report.d_x.mean, report.d_y.mean, report.d_j.mean, report.d_i.mean, report.d_z, report.relation
            );
        }
        Command::Train { input, .. } => {
            let data = split(&cfg, &read_series(input)?)?;
            let (grid, trace) = train_grid(&cfg, &data, &seeds)?;
            save_grid(&grid, &out.join("grid.asom"))?;
            snapshots_table(&trace.snapshots).save(&out.join("snapshots.csv"))?;
            println!("{}x{} grid, {} updates -> {}", grid.n1(), grid.n2(), trace.updates, out.display());
        }
        Command::Infer { input, grid, .. } => {
            let grid = load_grid(grid)?;
            let data = split(&cfg, &read_series(input)?)?;
            let r = readout(&grid, &data.y_test)?;
            let table = match &data.z_test {
                Some(z) => readout_table(data.test_start, &standardize(z)?, &r.standardized),
                None => {
                    let t = (0..r.standardized.len()).map(|i| (data.test_start + i) as f64).collect();
                    Table::new(vec!["t".into(), "zhat_norm".into()], vec![t, r.standardized.clone()])
                }
            };
            table.save(&out.join("readout.csv"))?;
            if r.collapse_warning() {
                eprintln!("warning: only {} driver levels in use", r.distinct_levels);
            }
            println!("{} rows, {} levels -> {}", r.standardized.len(), r.distinct_levels, out.join("readout.csv").display());
        }
        Command::Evaluate { input, method, .. } => {
            let method: Method = method.parse()?;
            let table = Table::read(input)?;
            let (z, zhat) = (table.column("z_norm")?, table.column("zhat_norm")?);
            let report = evaluate(zhat, z, cfg.max_lag)?;
            if method == Method::Asom {
                let mut levels: Vec<u64> = zhat.iter().map(|v| v.to_bits()).collect();
                levels.sort_unstable();
                levels.dedup();
                check_readout_correlation(report.rho, levels.len())?;
            }
            let row = EvaluationRow {
                run_id: 0,
                method,
                abs_rho: report.abs_rho,
                best_lag: report.best_lag,
                best_lag_rho: report.best_lag_rho,
                seed: cfg.seed,
            };
            let text = evaluation_csv(&[row]);
            write_file(&out.join("evaluation.csv"), text.as_bytes())?;
            print!("{text}");
        }
        Command::Baseline { input, method, .. } => {
            let method: Method = method.parse()?;
            if method == Method::Asom {
                return Err(Error::Config("baseline methods are random, pca and cca".into()));
            }
            let data = split(&cfg, &read_series(input)?)?;
            let estimate = standardize(&baseline_estimate(method, &data, &seeds)?)?;
            let path = out.join(format!("baseline_{}.csv", method.name()));
            let table = match &data.z_test {
                Some(z) => readout_table(data.test_start, &standardize(z)?, &estimate),
                None => {
                    let t = (0..estimate.len()).map(|i| (data.test_start + i) as f64).collect();
                    Table::new(vec!["t".into(), "zhat_norm".into()], vec![t, estimate])
                }
            };
            table.save(&path)?;
            println!("{method} estimate -> {}", path.display());
        }
        Command::Batch { method, runs, .. } => {
            if let Some(list) = method {
                cfg.methods = parse_methods(list)?;
            }
            if let Some(n) = runs {
                cfg.runs = *n;
            }
            cfg.validate()?;
            let outcome = pipeline::run_batch(&cfg, Some(&out))?;
            println!("{}/{} runs completed", outcome.runs_completed, outcome.runs_requested);
            for (m, s) in &outcome.summaries {
                println!("{:<7} median {:.3}  q1 {:.3}  q3 {:.3}  mad {:.3}", m.name(), s.median, s.q1, s.q3, s.median_absolute_deviation);
            }
        }
        Command::Export { input, kind, .. } => {
            let kind: ExportKind = kind.parse()?;
            let text = export_figure_data(kind, input, &ManifoldOptions::default())?;
            let name = ExportKind::NAMES[kind as usize];
            let path = out.join(format!("{name}.csv"));
            write_file(&path, text.as_bytes())?;
            println!("{} rows -> {}", text.lines().count().saturating_sub(1), path.display());
        }
        Command::Demo { .. } => {
            let o = pipeline::run_demo(&cfg, Some(&out))?;
            let d = &o.dimensions;
            println!(
                "D_X {:.3}  D_Y {:.3}  D_J {:.3}  D_I {:.3}  {}",
                d.d_x.mean, d.d_y.mean, d.d_j.mean, d.d_i.mean, d.relation
            );
            let e = &o.summary.evaluation;
            println!("|rho| {:.3}  best lag {} ({:.3})  -> {}", e.abs_rho, e.best_lag, e.best_lag_rho, out.display());
        }
    }
    Ok(())
}
