//! Intrinsic dimension from neighbor-distance ratios, mutual dimension,
//! and the dimension-inequality causal classifier.
//!
//! The local estimate at a point is `ln 2 / ln(R_2k / R_k)` where `R_k` is the
//! distance to its k-th neighbor; the global estimate is the median of the
//! valid local estimates.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{joint_embed, time_permute_joint, EmbeddedSeries, JointConstant};
use crate::error::{Error, Result};
use crate::neighbors::NeighborIndex;

/// A global estimate needs at least this many valid local estimates.
pub const MIN_VALID_ESTIMATES: usize = 10;
pub const DEFAULT_K_MIN: usize = 10;
pub const DEFAULT_K_MAX: usize = 20;
pub const DEFAULT_RELATION_TOL: f64 = 0.15;

fn ratio_dimension(r_k: f64, r_2k: f64) -> Option<f64> {
    (r_k > 0.0 && r_2k > r_k).then(|| std::f64::consts::LN_2 / (r_2k / r_k).ln())
}

/// Local dimension at row `t`, or `None` when the neighbor radii are degenerate.
pub fn local_dimension(index: &NeighborIndex<'_>, t: usize, k: usize) -> Result<Option<f64>> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if index.len() < 2 * k + 1 {
        return Err(Error::TooManyNeighbors { requested: 2 * k, available: index.len().saturating_sub(1) });
    }
    let nn = index.knn(t, 2 * k, true)?;
    Ok(ratio_dimension(nn[k - 1].distance, nn[2 * k - 1].distance))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-k global estimates for every `k` in `ks`, sharing one neighbor query per point.
fn global_dimensions(points: &EmbeddedSeries, ks: &[usize]) -> Result<Vec<f64>> {
    let k_max = *ks.iter().max().ok_or_else(|| Error::InvalidParameter("empty k range".into()))?;
    if ks.contains(&0) {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if points.rows() < 2 * k_max + 1 {
        return Err(Error::SeriesTooShort { needed: 2 * k_max + 1, got: points.rows() });
    }
    let index = NeighborIndex::new(points)?;
    let locals: Vec<Vec<Option<f64>>> = (0..points.rows())
        .into_par_iter()
        .map(|t| {
            let nn = index.knn(t, 2 * k_max, true)?;
            Ok(ks.iter().map(|&k| ratio_dimension(nn[k - 1].distance, nn[2 * k - 1].distance)).collect())
        })
        .collect::<Result<_>>()?;
    ks.iter()
        .enumerate()
        .map(|(c, _)| {
            let mut valid: Vec<f64> = locals.iter().filter_map(|row| row[c]).collect();
            if valid.len() < MIN_VALID_ESTIMATES {
                return Err(Error::TooFewEstimates { valid: valid.len(), needed: MIN_VALID_ESTIMATES });
            }
            Ok(median(&mut valid))
        })
        .collect()
}

/// Median of the valid local dimensions at neighborhood size `k`.
pub fn global_dimension(points: &EmbeddedSeries, k: usize) -> Result<f64> {
    Ok(global_dimensions(points, &[k])?[0])
}

/// Estimate averaged over a range of neighborhood sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KRangeEstimate {
    pub mean: f64,
    /// Sample standard deviation of the per-k estimates.
    pub spread: f64,
    /// `(k, global estimate)` for each k in the range.
    pub per_k: Vec<(usize, f64)>,
}

impl KRangeEstimate {
    /// Summarizes an existing per-k curve.
    pub fn from_curve(per_k: Vec<(usize, f64)>) -> Self {
        let n = per_k.len() as f64;
        let mean = per_k.iter().map(|p| p.1).sum::<f64>() / n;
        let spread = if per_k.len() > 1 {
            (per_k.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, spread, per_k }
    }
}

/// Mean of [`global_dimension`] over integer `k` in `[k_min, k_max]`.
pub fn dimension_over_k_range(points: &EmbeddedSeries, k_min: usize, k_max: usize) -> Result<KRangeEstimate> {
    if k_min < 2 || k_max < k_min {
        return Err(Error::InvalidParameter(format!("need k_max >= k_min >= 2 (got {k_min}..={k_max})")));
    }
    let ks: Vec<usize> = (k_min..=k_max).collect();
    let values = global_dimensions(points, &ks)?;
    Ok(KRangeEstimate::from_curve(ks.into_iter().zip(values).collect()))
}

/// `D_X + D_Y - D_J`.
pub fn mutual_dimension(d_x: f64, d_y: f64, d_j: f64) -> f64 {
    d_x + d_y - d_j
}

/// Causal relation between the two observed systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalRelation {
    #[serde(rename = "X->Y")]
    XDrivesY,
    #[serde(rename = "X<->Y")]
    Circular,
    #[serde(rename = "X<-Y")]
    YDrivesX,
    #[serde(rename = "hidden-common-driver")]
    HiddenCommonDriver,
    #[serde(rename = "independent")]
    Independent,
    #[serde(rename = "undecided")]
    Undecided,
}

impl std::fmt::Display for CausalRelation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::XDrivesY => "X->Y",
            Self::Circular => "X<->Y",
            Self::YDrivesX => "X<-Y",
            Self::HiddenCommonDriver => "hidden-common-driver",
            Self::Independent => "independent",
            Self::Undecided => "undecided",
        })
    }
}

/// Labels the relation from the four dimensions with tolerance `tol`.
///
/// - `D_J > max(D_X, D_Y) + tol` and `D_I > D_J + tol`: hidden common driver.
/// - `D_J > max + tol` and `|D_J - D_I| <= tol`: independent.
/// - `|D_J - max| <= tol`: direct coupling, oriented toward the larger
///   dimension (`X->Y` when `D_Y >= D_X + tol`), circular when `|D_X - D_Y| < tol`.
/// - anything else: undecided.
pub fn classify_relation(d_x: f64, d_y: f64, d_j: f64, d_i: f64, tol: f64) -> CausalRelation {
    let top = d_x.max(d_y);
    if d_j > top + tol {
        if d_i > d_j + tol {
            CausalRelation::HiddenCommonDriver
        } else if (d_j - d_i).abs() <= tol {
            CausalRelation::Independent
        } else {
            CausalRelation::Undecided
        }
    } else if (d_j - top).abs() <= tol {
        if d_y >= d_x + tol {
            CausalRelation::XDrivesY
        } else if d_x >= d_y + tol {
            CausalRelation::YDrivesX
        } else {
            CausalRelation::Circular
        }
    } else {
        CausalRelation::Undecided
    }
}

/// Dimensions of the two grid axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SomShape {
    pub self_dims: usize,
    pub driver_dims: usize,
    /// Nodes along the self-dynamics axis.
    pub n1: usize,
    /// Nodes along the driver axis.
    pub n2: usize,
}

fn nearest_positive(v: f64) -> usize {
    (v.round() as i64).max(1) as usize
}

/// Integer grid shape from `D_Y` and `D_Z`. Only the 1 + 1 layout is supported.
pub fn som_shape_from_dims(d_y: f64, d_z: f64, nodes_self: usize, nodes_driver: usize) -> Result<SomShape> {
    if !(d_z > 0.0 && d_y >= d_z) {
        return Err(Error::InvalidParameter(format!("need D_Y >= D_Z > 0 (got D_Y = {d_y:.3}, D_Z = {d_z:.3})")));
    }
    let driver_dims = nearest_positive(d_z);
    let self_dims = nearest_positive(d_y - d_z);
    if (self_dims, driver_dims) != (1, 1) {
        return Err(Error::UnsupportedShape { self_dims, driver_dims });
    }
    Ok(SomShape { self_dims, driver_dims, n1: nodes_self, n2: nodes_driver })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionValue {
    pub mean: f64,
    /// Spread across the k range (sample SD), not a bootstrap error.
    pub spread_across_k: f64,
}

impl From<&KRangeEstimate> for DimensionValue {
    fn from(e: &KRangeEstimate) -> Self {
        Self { mean: e.mean, spread_across_k: e.spread }
    }
}

/// Full dimensional analysis of two observed series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub m: usize,
    pub tau: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub d_x: DimensionValue,
    pub d_y: DimensionValue,
    pub d_j: DimensionValue,
    pub d_i: DimensionValue,
    pub d_z: f64,
    /// Manifold name (`X`, `Y`, `J`, `I`) to `(k, estimate)` pairs.
    pub per_k_curves: BTreeMap<String, Vec<(usize, f64)>>,
    pub relation: CausalRelation,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionSettings {
    pub m: usize,
    pub tau: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub joint: JointConstant,
    pub tolerance: f64,
}

impl Default for DimensionSettings {
    fn default() -> Self {
        Self {
            m: 4,
            tau: 1,
            k_min: DEFAULT_K_MIN,
            k_max: DEFAULT_K_MAX,
            joint: JointConstant::default(),
            tolerance: DEFAULT_RELATION_TOL,
        }
    }
}

/// Embeds `x` and `y`, estimates `D_X, D_Y, D_J, D_I`, and classifies the relation.
pub fn analyze_dimensions(x: &[f64], y: &[f64], settings: &DimensionSettings, permute_seed: u64) -> Result<DimensionReport> {
    if !(settings.tolerance > 0.0) {
        return Err(Error::InvalidParameter("relation tolerance must be positive".into()));
    }
    let ex = crate::embedding::delay_embed(x, settings.m, settings.tau)?;
    let ey = crate::embedding::delay_embed(y, settings.m, settings.tau)?;
    let ej = joint_embed(&ex, &ey, settings.joint)?;
    let ei = time_permute_joint(&ex, &ey, settings.joint, permute_seed)?;
    let (k_min, k_max) = (settings.k_min, settings.k_max);
    let est = |p: &EmbeddedSeries| dimension_over_k_range(p, k_min, k_max);
    let (dx, dy, dj, di) = (est(&ex)?, est(&ey)?, est(&ej)?, est(&ei)?);
    let relation = classify_relation(dx.mean, dy.mean, dj.mean, di.mean, settings.tolerance);
    let per_k_curves = [("X", &dx), ("Y", &dy), ("J", &dj), ("I", &di)]
        .into_iter()
        .map(|(name, e)| (name.to_string(), e.per_k.clone()))
        .collect();
    Ok(DimensionReport {
        m: settings.m,
        tau: settings.tau,
        k_min,
        k_max,
        d_z: mutual_dimension(dx.mean, dy.mean, dj.mean),
        d_x: (&dx).into(),
        d_y: (&dy).into(),
        d_j: (&dj).into(),
        d_i: (&di).into(),
        per_k_curves,
        relation,
        tolerance: settings.tolerance,
    })
}
