//! Experiment configuration: a flat TOML file of documented keys.
//!
//! ```toml
//! preset = "demo"        # demo | batch-logistic | batch-tent, applied first
//! seed = 7
//! iterations = 5000
//! methods = ["asom", "pca"]
//! ```
//!
//! Every other key overrides one field of [`ExperimentConfig`]. Unknown keys
//! are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asom::TrainingSchedule;
use crate::dimension::{DimensionSettings, DEFAULT_K_MAX, DEFAULT_K_MIN, DEFAULT_RELATION_TOL};
use crate::dynamics::{
    LogisticCoupling, LogisticTriadParams, SampledExperiment, SimOptions, SystemFamily, TentCoupling, TentTriadParams,
    DEFAULT_BURN_IN, DEFAULT_MAX_RESTARTS,
};
use crate::embedding::JointConstant;
use crate::error::{Error, Result};

/// Where a run's map parameters come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamSource {
    /// The explicit `r_*`, `alpha_*`, `beta_*` and `init_*` keys.
    Fixed,
    /// Drawn per run from the run seed.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridInit {
    /// Uniform in the unit cube.
    Unit,
    /// Uniform in the bounding box of the training `Y` rows.
    Bbox,
}

/// A driver-reconstruction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Asom,
    Random,
    Pca,
    Cca,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Asom, Method::Random, Method::Pca, Method::Cca];

    pub fn name(self) -> &'static str {
        match self {
            Method::Asom => "asom",
            Method::Random => "random",
            Method::Pca => "pca",
            Method::Cca => "cca",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown method `{s}` (expected asom, random, pca or cca)")))
    }
}

/// Parses a comma-separated method list such as `asom,pca`.
pub fn parse_methods(list: &str) -> Result<Vec<Method>> {
    let mut out: Vec<Method> = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    out.dedup();
    if out.is_empty() {
        return Err(Error::Config("empty method list".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Demo,
    BatchLogistic,
    BatchTent,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "demo" => Ok(Preset::Demo),
            "batch-logistic" => Ok(Preset::BatchLogistic),
            "batch-tent" => Ok(Preset::BatchTent),
            other => Err(Error::Config(format!("unknown preset `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: SystemFamily,
    pub params: ParamSource,

    pub r_z: f64,
    pub r_x: f64,
    pub r_y: f64,
    pub alpha_z: f64,
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
    pub noise_sd: f64,
    pub init_z: f64,
    pub init_x: f64,
    pub init_y: f64,
    pub logistic_coupling: LogisticCoupling,
    pub tent_coupling: TentCoupling,

    pub burn_in: usize,
    /// Fresh initial conditions tried per parameter set.
    pub max_restarts: usize,
    /// Parameter sets tried per sampled run before it is recorded as failed.
    pub max_param_draws: usize,

    /// Recorded samples after burn-in.
    pub length: usize,
    pub train: usize,
    /// Evaluation window, starting right after the training block.
    pub test: usize,

    /// Leading training samples used for the dimension analysis.
    pub dimension_chunk: usize,
    pub dimension_m: usize,
    pub dimension_tau: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub relation_tol: f64,
    pub joint_a: f64,

    pub som_m: usize,
    pub som_tau: usize,
    pub n1: usize,
    pub n2: usize,
    pub grid_init: GridInit,
    pub iterations: usize,
    pub neighbors: usize,
    pub sigma1_0: f64,
    pub sigma2_0: f64,
    pub epsilon_0: f64,
    pub sigma1_shrink: f64,
    pub sigma2_shrink: f64,
    pub epsilon_shrink: f64,
    pub snapshot_steps: Vec<usize>,

    pub methods: Vec<Method>,
    pub runs: usize,
    pub max_lag: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(Preset::Demo)
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let demo = LogisticTriadParams::demo();
        let sch = TrainingSchedule::default();
        let base = Self {
            family: SystemFamily::Logistic,
            params: ParamSource::Fixed,
            r_z: demo.r_z,
            r_x: demo.r_x,
            r_y: demo.r_y,
            alpha_z: 0.3,
            alpha_x: 0.3,
            alpha_y: 0.3,
            beta_x: demo.beta_x,
            beta_y: demo.beta_y,
            noise_sd: demo.noise_sd,
            init_z: 0.3,
            init_x: 0.4,
            init_y: 0.5,
            logistic_coupling: LogisticCoupling::default(),
            tent_coupling: TentCoupling::default(),
            burn_in: DEFAULT_BURN_IN,
            max_restarts: DEFAULT_MAX_RESTARTS,
            max_param_draws: 1,
            length: 20_000,
            train: 10_000,
            test: 10_000,
            dimension_chunk: 5_000,
            dimension_m: 4,
            dimension_tau: 1,
            k_min: DEFAULT_K_MIN,
            k_max: DEFAULT_K_MAX,
            relation_tol: DEFAULT_RELATION_TOL,
            joint_a: JointConstant::default().value(),
            som_m: 3,
            som_tau: 1,
            n1: 40,
            n2: 20,
            grid_init: GridInit::Unit,
            iterations: sch.iterations,
            neighbors: sch.neighbors,
            sigma1_0: sch.sigma1_0,
            sigma2_0: sch.sigma2_0,
            epsilon_0: sch.epsilon_0,
            sigma1_shrink: sch.sigma1_shrink,
            sigma2_shrink: sch.sigma2_shrink,
            epsilon_shrink: sch.epsilon_shrink,
            snapshot_steps: vec![0, 100, 1_000, 10_000],
            methods: vec![Method::Asom],
            runs: 1,
            max_lag: 10,
            seed: 1,
        };
        match preset {
            Preset::Demo => base,
            Preset::BatchLogistic => Self {
                params: ParamSource::Sampled,
                noise_sd: 0.0,
                max_restarts: 3,
                max_param_draws: 100,
                snapshot_steps: Vec::new(),
                methods: Method::ALL.to_vec(),
                runs: 50,
                ..base
            },
            Preset::BatchTent => Self {
                family: SystemFamily::Tent,
                params: ParamSource::Sampled,
                noise_sd: 0.0,
                max_restarts: 3,
                max_param_draws: 100,
                train: 16_000,
                test: 2_000,
                snapshot_steps: Vec::new(),
                methods: Method::ALL.to_vec(),
                runs: 50,
                ..base
            },
        }
    }

    /// Parses TOML text: an optional `preset` key, then field overrides.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        let preset = match table.remove("preset") {
            None => Preset::Demo,
            Some(toml::Value::String(s)) => s.parse()?,
            Some(other) => return Err(Error::Config(format!("`preset` must be a string, got {other}"))),
        };
        let mut merged = toml::Table::try_from(Self::preset(preset)).map_err(|e| Error::Config(e.to_string()))?;
        for (key, value) in table {
            if !merged.contains_key(&key) {
                return Err(Error::Config(format!("unknown config key `{key}`")));
            }
            merged.insert(key, value);
        }
        let cfg: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Full TOML rendering of every key.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("length", self.length),
            ("train", self.train),
            ("test", self.test),
            ("dimension_chunk", self.dimension_chunk),
            ("dimension_m", self.dimension_m),
            ("dimension_tau", self.dimension_tau),
            ("som_m", self.som_m),
            ("som_tau", self.som_tau),
            ("n1", self.n1),
            ("n2", self.n2),
            ("neighbors", self.neighbors),
            ("runs", self.runs),
            ("max_param_draws", self.max_param_draws),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Config(format!("`{name}` must be positive")));
            }
        }
        if self.train + self.test > self.length {
            return Err(Error::Config(format!(
                "train ({}) + test ({}) exceeds length ({})",
                self.train, self.test, self.length
            )));
        }
        if self.dimension_chunk > self.train {
            return Err(Error::Config(format!(
                "dimension_chunk ({}) exceeds the training block ({})",
                self.dimension_chunk, self.train
            )));
        }
        if self.k_min < 2 || self.k_max < self.k_min {
            return Err(Error::Config(format!("bad k range [{}, {}]", self.k_min, self.k_max)));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("`methods` is empty".into()));
        }
        if self.snapshot_steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("`snapshot_steps` must be strictly increasing".into()));
        }
        JointConstant::new(self.joint_a).map_err(|e| Error::Config(e.to_string()))?;
        self.schedule().validate().map_err(|e| Error::Config(e.to_string()))?;
        if self.params == ParamSource::Fixed {
            self.fixed_experiment()?;
        }
        Ok(())
    }

    pub fn schedule(&self) -> TrainingSchedule {
        TrainingSchedule {
            iterations: self.iterations,
            neighbors: self.neighbors,
            sigma1_0: self.sigma1_0,
            sigma2_0: self.sigma2_0,
            epsilon_0: self.epsilon_0,
            sigma1_shrink: self.sigma1_shrink,
            sigma2_shrink: self.sigma2_shrink,
            epsilon_shrink: self.epsilon_shrink,
        }
    }

    pub fn dimension_settings(&self) -> DimensionSettings {
        DimensionSettings {
            m: self.dimension_m,
            tau: self.dimension_tau,
            k_min: self.k_min,
            k_max: self.k_max,
            joint: JointConstant::new(self.joint_a).expect("validated"),
            tolerance: self.relation_tol,
        }
    }

    pub fn sim_options(&self) -> SimOptions {
        SimOptions { burn_in: self.burn_in, max_restarts: self.max_restarts }
    }

    /// The explicitly configured system, validated against the sampling ranges.
    pub fn fixed_experiment(&self) -> Result<SampledExperiment> {
        let init = [self.init_z, self.init_x, self.init_y];
        if !init.iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(Error::Config(format!("initial conditions {init:?} outside [0, 1]")));
        }
        let exp = match self.family {
            SystemFamily::Logistic => {
                let params = LogisticTriadParams {
                    r_z: self.r_z,
                    r_x: self.r_x,
                    r_y: self.r_y,
                    beta_x: self.beta_x,
                    beta_y: self.beta_y,
                    noise_sd: self.noise_sd,
                    coupling: self.logistic_coupling,
                };
                params.validate().map_err(|e| Error::Config(e.to_string()))?;
                SampledExperiment::Logistic { params, init }
            }
            SystemFamily::Tent => {
                let params = TentTriadParams {
                    alpha_z: self.alpha_z,
                    alpha_x: self.alpha_x,
                    alpha_y: self.alpha_y,
                    beta_x: self.beta_x,
                    beta_y: self.beta_y,
                    coupling: self.tent_coupling,
                };
                params.validate().map_err(|e| Error::Config(e.to_string()))?;
                SampledExperiment::Tent { params, init }
            }
        };
        Ok(exp)
    }

    /// Output directory default for a subcommand when `--out` is absent.
    pub fn default_out(name: &str) -> PathBuf {
        PathBuf::from("out").join(name)
    }
}
