//! End-to-end workflows built from the other modules.
//!
//! [`run_demo`] walks the full analysis on one system: dimensions, grid shape,
//! anisotropic training and readout. [`run_batch`] repeats simulation and
//! reconstruction over many randomly drawn systems and compares methods.
//! Everything downstream of a master seed is reproducible bit for bit.

pub mod config;
pub mod export;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asom::{
    bounding_box, check_readout_correlation, init_grid, init_grid_in_box, readout, save_grid, train, Readout, SomGrid,
    TrainingTrace,
};
use crate::baselines::{cca_first_pair, concat_features, pca_first_component, phase_shuffle};
use crate::dimension::{
    classify_relation, dimension_over_k_range, mutual_dimension, som_shape_from_dims, DimensionReport, SomShape,
};
use crate::dynamics::{sample_experiment_params, SampledExperiment, SimulationOutput, SystemFamily};
use crate::embedding::{delay_embed, joint_embed, time_permute_joint, EmbeddedSeries};
use crate::error::{Error, Result};
use crate::evaluation::{batch_summary, evaluate, BatchSummary, EvaluationReport};
use crate::io::{fmt_f64, write_file, Table};
use crate::rng::{derive_seed, stage};

pub use config::{parse_methods, ExperimentConfig, GridInit, Method, ParamSource, Preset};
pub use export::{export_figure_data, ExportKind};

/// Per-stage seeds fanned out from one master seed with [`derive_seed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageSeeds {
    pub master: u64,
    pub simulate: u64,
    pub params: u64,
    pub permute: u64,
    pub grid_init: u64,
    pub train: u64,
    pub phase: u64,
}

impl StageSeeds {
    pub fn new(master: u64) -> Self {
        Self {
            master,
            simulate: derive_seed(master, stage::SIMULATE),
            params: derive_seed(master, stage::PARAMS),
            permute: derive_seed(master, stage::PERMUTE),
            grid_init: derive_seed(master, stage::GRID_INIT),
            train: derive_seed(master, stage::TRAIN),
            phase: derive_seed(master, stage::PHASE),
        }
    }

    /// Seeds of batch run `run_id`.
    pub fn for_run(master: u64, run_id: usize) -> Self {
        Self::new(derive_seed(master, stage::RUN_BASE + run_id as u64))
    }
}

/// A simulated system ready for analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct Simulated {
    pub experiment: SampledExperiment,
    pub series: SimulationOutput,
    /// Parameter sets drawn, including the accepted one.
    pub param_draws: usize,
}

/// Simulates the configured system.
///
/// Sampled parameter sets that keep diverging after `max_restarts` fresh
/// initial conditions are discarded and redrawn, up to `max_param_draws`.
pub fn simulate(cfg: &ExperimentConfig, seeds: &StageSeeds) -> Result<Simulated> {
    let opts = cfg.sim_options();
    match cfg.params {
        ParamSource::Fixed => {
            let experiment = cfg.fixed_experiment()?;
            let series = experiment.simulate(cfg.length, seeds.simulate, opts)?;
            Ok(Simulated { experiment, series, param_draws: 1 })
        }
        ParamSource::Sampled => {
            let mut last = None;
            for draw in 0..cfg.max_param_draws {
                let experiment = with_coupling(
                    sample_experiment_params(cfg.family, derive_seed(seeds.params, draw as u64)),
                    cfg,
                );
                match experiment.simulate(cfg.length, derive_seed(seeds.simulate, draw as u64), opts) {
                    Ok(series) => return Ok(Simulated { experiment, series, param_draws: draw + 1 }),
                    Err(e @ Error::Diverged { .. }) => last = Some(e),
                    Err(e) => return Err(e),
                }
            }
            Err(last.expect("max_param_draws is positive"))
        }
    }
}

fn with_coupling(exp: SampledExperiment, cfg: &ExperimentConfig) -> SampledExperiment {
    match exp {
        SampledExperiment::Logistic { mut params, init } => {
            params.coupling = cfg.logistic_coupling;
            SampledExperiment::Logistic { params, init }
        }
        SampledExperiment::Tent { mut params, init } => {
            params.coupling = cfg.tent_coupling;
            SampledExperiment::Tent { params, init }
        }
    }
}

/// Training and test embeddings for the reconstruction methods.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitData {
    pub x_train: EmbeddedSeries,
    pub y_train: EmbeddedSeries,
    pub x_test: EmbeddedSeries,
    pub y_test: EmbeddedSeries,
    /// Driver aligned with the test rows: row `r` starts at time `test_start + r`.
    pub z_test: Option<Vec<f64>>,
    pub test_start: usize,
}

/// Embeds `[0, train)` and `[train, train + test)` separately, so no test
/// sample enters a training row.
pub fn split(cfg: &ExperimentConfig, series: &SimulationOutput) -> Result<SplitData> {
    let end = cfg.train + cfg.test;
    if series.len() < end {
        return Err(Error::SeriesTooShort { needed: end, got: series.len() });
    }
    let (m, tau) = (cfg.som_m, cfg.som_tau);
    let x_test = delay_embed(&series.x[cfg.train..end], m, tau)?;
    let rows = x_test.rows();
    Ok(SplitData {
        x_train: delay_embed(&series.x[..cfg.train], m, tau)?,
        y_train: delay_embed(&series.y[..cfg.train], m, tau)?,
        y_test: delay_embed(&series.y[cfg.train..end], m, tau)?,
        x_test,
        z_test: series.z.as_ref().map(|z| z[cfg.train..cfg.train + rows].to_vec()),
        test_start: cfg.train,
    })
}

/// Initializes and trains a grid on the training split.
pub fn train_grid(cfg: &ExperimentConfig, data: &SplitData, seeds: &StageSeeds) -> Result<(SomGrid, TrainingTrace)> {
    let grid = match cfg.grid_init {
        GridInit::Unit => init_grid(cfg.n1, cfg.n2, cfg.som_m, seeds.grid_init)?,
        GridInit::Bbox => {
            let (lo, hi) = bounding_box(&data.y_train);
            init_grid_in_box(cfg.n1, cfg.n2, cfg.som_m, &lo, &hi, seeds.grid_init)?
        }
    };
    let steps: Vec<usize> = cfg.snapshot_steps.iter().copied().filter(|&s| s <= cfg.iterations).collect();
    train(grid, &data.x_train, &data.y_train, &cfg.schedule(), seeds.train, &steps)
}

/// Driver estimate of a baseline method on the test rows.
///
/// PCA and CCA are fitted on the training rows and applied to the test rows;
/// the random baseline phase-shuffles the true test driver.
pub fn baseline_estimate(method: Method, data: &SplitData, seeds: &StageSeeds) -> Result<Vec<f64>> {
    match method {
        Method::Random => {
            let z = data.z_test.as_ref().ok_or_else(|| Error::Config("the random baseline needs a z column".into()))?;
            phase_shuffle(z, seeds.phase)
        }
        Method::Pca => {
            let fit = pca_first_component(&concat_features(&data.x_train, &data.y_train)?)?;
            fit.component.apply(&concat_features(&data.x_test, &data.y_test)?)
        }
        Method::Cca => cca_first_pair(&data.x_train, &data.y_train)?.model.estimate(&data.x_test, &data.y_test),
        Method::Asom => Err(Error::InvalidParameter("asom is not a baseline".into())),
    }
}

/// Scores an estimate against the test driver; ASOM scores also face the readout ceiling.
pub fn score(method: Method, estimate: &[f64], data: &SplitData, max_lag: usize, levels: usize) -> Result<EvaluationReport> {
    let z = data.z_test.as_ref().ok_or_else(|| Error::Config("evaluation needs a z column".into()))?;
    let report = evaluate(estimate, z, max_lag)?;
    if method == Method::Asom {
        check_readout_correlation(report.rho, levels)?;
    }
    Ok(report)
}

/// One row of an evaluation CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub run_id: usize,
    pub method: Method,
    pub abs_rho: f64,
    pub best_lag: i64,
    pub best_lag_rho: f64,
    pub seed: u64,
}

pub const EVALUATION_HEADER: &str = "run_id,method,abs_rho,best_lag,best_lag_rho,seed";

pub fn evaluation_csv(rows: &[EvaluationRow]) -> String {
    let mut out = format!("{EVALUATION_HEADER}\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.run_id,
            r.method,
            fmt_f64(r.abs_rho),
            r.best_lag,
            fmt_f64(r.best_lag_rho),
            r.seed
        )
        .unwrap();
    }
    out
}

/// Tidy `manifold,k,dimension` rows of the per-k curves.
pub fn dimension_curves_csv(report: &DimensionReport) -> String {
    let mut out = String::from("manifold,k,dimension\n");
    for (name, curve) in &report.per_k_curves {
        for (k, d) in curve {
            writeln!(out, "{name},{k},{}", fmt_f64(*d)).unwrap();
        }
    }
    out
}

/// `step,i,j,c0..` rows, one per node per snapshot.
pub fn snapshots_table(snapshots: &[(usize, SomGrid)]) -> Table {
    let m = snapshots.first().map_or(0, |(_, g)| g.dim());
    let mut headers = vec!["step".to_string(), "i".to_string(), "j".to_string()];
    headers.extend((0..m).map(|c| format!("c{c}")));
    let mut columns = vec![Vec::new(); 3 + m];
    for (step, grid) in snapshots {
        for i in 0..grid.n1() {
            for j in 0..grid.n2() {
                columns[0].push(*step as f64);
                columns[1].push(i as f64);
                columns[2].push(j as f64);
                for (c, v) in grid.center(i, j).iter().enumerate() {
                    columns[3 + c].push(*v);
                }
            }
        }
    }
    Table::new(headers, columns)
}

/// `t,z_norm,zhat_norm` readout table; `t` indexes the recorded series.
pub fn readout_table(test_start: usize, z_norm: &[f64], zhat_norm: &[f64]) -> Table {
    let t = (0..z_norm.len()).map(|r| (test_start + r) as f64).collect();
    Table::new(
        vec!["t".into(), "z_norm".into(), "zhat_norm".into()],
        vec![t, z_norm.to_vec(), zhat_norm.to_vec()],
    )
}

/// Reads a `t,z,x,y` or `t,x,y` series CSV.
pub fn read_series(path: &Path) -> Result<SimulationOutput> {
    let table = Table::read(path)?;
    let x = table.column("x")?.to_vec();
    let y = table.column("y")?.to_vec();
    let z = table.column("z").ok().map(<[f64]>::to_vec);
    Ok(SimulationOutput { z, x, y, resample_count: 0 })
}

pub fn write_series(series: &SimulationOutput, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    series.write_csv(&mut buf).map_err(|e| Error::io(path, e))?;
    write_file(path, &buf)
}

pub(crate) fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

/// Dimension analysis of the leading `dimension_chunk` samples, one tagged step at a time.
pub fn dimension_analysis(cfg: &ExperimentConfig, series: &SimulationOutput, seeds: &StageSeeds) -> Result<DimensionReport> {
    let settings = cfg.dimension_settings();
    let chunk = cfg.dimension_chunk;
    if series.len() < chunk {
        return Err(Error::SeriesTooShort { needed: chunk, got: series.len() }.at_step(1, "delay embedding"));
    }
    let (m, tau) = (settings.m, settings.tau);
    let (ex, ey) = (|| Ok::<_, Error>((delay_embed(&series.x[..chunk], m, tau)?, delay_embed(&series.y[..chunk], m, tau)?)))()
        .map_err(|e| e.at_step(1, "delay embedding"))?;
    let (ej, ei) = (|| {
        Ok::<_, Error>((joint_embed(&ex, &ey, settings.joint)?, time_permute_joint(&ex, &ey, settings.joint, seeds.permute)?))
    })()
    .map_err(|e| e.at_step(2, "joint embedding"))?;
    let (k_min, k_max) = (settings.k_min, settings.k_max);
    let est = |p: &EmbeddedSeries| dimension_over_k_range(p, k_min, k_max);
    let (dx, dy, dj, di) = (|| Ok::<_, Error>((est(&ex)?, est(&ey)?, est(&ej)?, est(&ei)?)))()
        .map_err(|e| e.at_step(3, "dimension estimation"))?;
    let d_z = mutual_dimension(dx.mean, dy.mean, dj.mean);
    if !d_z.is_finite() {
        return Err(Error::InvalidParameter("mutual dimension is not finite".into()).at_step(4, "mutual dimension"));
    }
    let relation = classify_relation(dx.mean, dy.mean, dj.mean, di.mean, settings.tolerance);
    let per_k_curves = [("X", &dx), ("Y", &dy), ("J", &dj), ("I", &di)]
        .into_iter()
        .map(|(name, e)| (name.to_string(), e.per_k.clone()))
        .collect();
    Ok(DimensionReport {
        m,
        tau,
        k_min,
        k_max,
        d_x: (&dx).into(),
        d_y: (&dy).into(),
        d_j: (&dj).into(),
        d_i: (&di).into(),
        d_z,
        per_k_curves,
        relation,
        tolerance: settings.tolerance,
    })
}

/// Step 5: the grid shape implied by `D_Y` and `D_Z`.
pub fn grid_shape(cfg: &ExperimentConfig, report: &DimensionReport) -> Result<SomShape> {
    som_shape_from_dims(report.d_y.mean, report.d_z, cfg.n1, cfg.n2).map_err(|e| e.at_step(5, "grid shape"))
}

/// Summary written to `run.json` by [`run_demo`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSummary {
    pub seeds: StageSeeds,
    pub experiment: SampledExperiment,
    pub resample_count: usize,
    pub param_draws: usize,
    pub shape: SomShape,
    pub distinct_levels: usize,
    pub collapse_warning: bool,
    pub training_updates: usize,
    pub evaluation: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoOutcome {
    pub summary: DemoSummary,
    pub dimensions: DimensionReport,
    pub grid: SomGrid,
    pub trace: TrainingTrace,
    pub readout: Readout,
    pub z_norm: Vec<f64>,
    pub test_start: usize,
}

/// The single-system workflow.
///
/// Steps: 0 simulate, 1 delay embedding, 2 joint embedding, 3 dimension
/// estimation, 4 mutual dimension and relation, 5 grid shape, 6 training,
/// 7 readout, 8 evaluation. Errors carry the failing step. With `out`, every
/// artifact is written there:
///
/// | file | content |
/// |------|---------|
/// | `config.toml` | the resolved configuration |
/// | `series.csv` | `t,z,x,y` |
/// | `dimension_report.json`, `dimension_curves.csv` | dimensions and per-k curves |
/// | `grid.asom` | trained grid |
/// | `snapshots.csv` | `step,i,j,c0..` |
/// | `readout.csv` | `t,z_norm,zhat_norm` |
/// | `evaluation.csv` | `run_id,method,abs_rho,best_lag,best_lag_rho,seed` |
/// | `run.json` | seeds, system, shape, evaluation |
pub fn run_demo(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<DemoOutcome> {
    cfg.validate()?;
    let seeds = StageSeeds::new(cfg.seed);
    let sim = simulate(cfg, &seeds).map_err(|e| e.at_step(0, "simulation"))?;
    let dimensions = dimension_analysis(cfg, &sim.series, &seeds)?;
    let shape = grid_shape(cfg, &dimensions)?;
    let data = split(cfg, &sim.series).map_err(|e| e.at_step(1, "delay embedding"))?;
    let (grid, trace) = train_grid(cfg, &data, &seeds).map_err(|e| e.at_step(6, "anisotropic training"))?;
    let readout = readout(&grid, &data.y_test).map_err(|e| e.at_step(7, "readout"))?;
    let evaluation = score(Method::Asom, &readout.standardized, &data, cfg.max_lag, readout.distinct_levels)
        .map_err(|e| e.at_step(8, "evaluation"))?;
    let z_norm = crate::embedding::standardize(data.z_test.as_ref().expect("triads record z"))
        .map_err(|e| e.at_step(8, "evaluation"))?;

    let summary = DemoSummary {
        seeds,
        experiment: sim.experiment,
        resample_count: sim.series.resample_count,
        param_draws: sim.param_draws,
        shape,
        distinct_levels: readout.distinct_levels,
        collapse_warning: readout.collapse_warning(),
        training_updates: trace.updates,
        evaluation,
    };
    let outcome = DemoOutcome { summary, dimensions, grid, trace, readout, z_norm, test_start: data.test_start };
    if let Some(dir) = out {
        write_demo(cfg, &sim.series, &outcome, dir)?;
    }
    Ok(outcome)
}

fn write_demo(cfg: &ExperimentConfig, series: &SimulationOutput, o: &DemoOutcome, dir: &Path) -> Result<()> {
    write_file(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;
    write_series(series, &dir.join("series.csv"))?;
    write_json(&o.dimensions, &dir.join("dimension_report.json"))?;
    write_file(&dir.join("dimension_curves.csv"), dimension_curves_csv(&o.dimensions).as_bytes())?;
    save_grid(&o.grid, &dir.join("grid.asom"))?;
    snapshots_table(&o.trace.snapshots).save(&dir.join("snapshots.csv"))?;
    readout_table(o.test_start, &o.z_norm, &o.readout.standardized).save(&dir.join("readout.csv"))?;
    let e = &o.summary.evaluation;
    let row = EvaluationRow {
        run_id: 0,
        method: Method::Asom,
        abs_rho: e.abs_rho,
        best_lag: e.best_lag,
        best_lag_rho: e.best_lag_rho,
        seed: cfg.seed,
    };
    write_file(&dir.join("evaluation.csv"), evaluation_csv(&[row]).as_bytes())?;
    write_json(&o.summary, &dir.join("run.json"))
}

/// One batch run's system and bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub experiment: SampledExperiment,
    pub param_draws: usize,
    pub resample_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedRun {
    pub run_id: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchOutcome {
    pub family: SystemFamily,
    pub runs_requested: usize,
    pub runs_completed: usize,
    pub methods: Vec<Method>,
    /// Robust summary of `|rho|` per method over the completed runs.
    pub summaries: BTreeMap<Method, BatchSummary>,
    pub runs: Vec<RunRecord>,
    pub failed: Vec<FailedRun>,
    #[serde(skip)]
    pub rows: Vec<EvaluationRow>,
}

impl BatchOutcome {
    pub fn median(&self, method: Method) -> Option<f64> {
        self.summaries.get(&method).map(|s| s.median)
    }
}

/// Everything one batch run produces; a failure in any method fails the run.
fn batch_run(cfg: &ExperimentConfig, run_id: usize) -> std::result::Result<(RunRecord, Vec<EvaluationRow>), FailedRun> {
    let seeds = StageSeeds::for_run(cfg.seed, run_id);
    let fail = |e: Error| FailedRun { run_id, seed: seeds.master, error: e.to_string() };
    let sim = simulate(cfg, &seeds).map_err(fail)?;
    let data = split(cfg, &sim.series).map_err(fail)?;
    let mut rows = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let (estimate, levels) = if method == Method::Asom {
            let (grid, _) = train_grid(cfg, &data, &seeds).map_err(fail)?;
            let r = readout(&grid, &data.y_test).map_err(fail)?;
            (r.standardized, r.distinct_levels)
        } else {
            (baseline_estimate(method, &data, &seeds).map_err(fail)?, usize::MAX)
        };
        let e = score(method, &estimate, &data, cfg.max_lag, levels).map_err(fail)?;
        rows.push(EvaluationRow {
            run_id,
            method,
            abs_rho: e.abs_rho,
            best_lag: e.best_lag,
            best_lag_rho: e.best_lag_rho,
            seed: seeds.master,
        });
    }
    let record = RunRecord {
        run_id,
        seed: seeds.master,
        experiment: sim.experiment,
        param_draws: sim.param_draws,
        resample_count: sim.series.resample_count,
    };
    Ok((record, rows))
}

/// Repeats simulation and reconstruction `cfg.runs` times in parallel.
///
/// Run `i` uses the seeds of [`StageSeeds::for_run`]. Failed runs are listed
/// and left out of every summary. With `out`, writes `batch.csv` (evaluation
/// rows), `batch_summary.json` and `config.toml`.
pub fn run_batch(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<BatchOutcome> {
    cfg.validate()?;
    let results: Vec<_> = (0..cfg.runs).into_par_iter().map(|run_id| batch_run(cfg, run_id)).collect();
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for r in results {
        match r {
            Ok((record, mut r)) => {
                runs.push(record);
                rows.append(&mut r);
            }
            Err(f) => failed.push(f),
        }
    }
    let mut summaries = BTreeMap::new();
    if !runs.is_empty() {
        for &method in &cfg.methods {
            let values: Vec<f64> = rows.iter().filter(|r| r.method == method).map(|r| r.abs_rho).collect();
            summaries.insert(method, batch_summary(&values)?);
        }
    }
    let outcome = BatchOutcome {
        family: cfg.family,
        runs_requested: cfg.runs,
        runs_completed: runs.len(),
        methods: cfg.methods.clone(),
        summaries,
        runs,
        failed,
        rows,
    };
    if let Some(dir) = out {
        write_file(&dir.join("config.toml"), cfg.to_toml().as_bytes())?;
        write_file(&dir.join("batch.csv"), evaluation_csv(&outcome.rows).as_bytes())?;
        write_json(&outcome, &dir.join("batch_summary.json"))?;
    }
    Ok(outcome)
}
