//! Anisotropic self-organizing map.
//!
//! The grid has `n1` nodes along the self-dynamics axis and `n2` along the
//! driver axis; every node `(i, j)` owns a receptive-field center in the
//! embedding space of `Y`. Training picks a random seed time, fixes the driver
//! column `j*` from the global winner for `Y(t_s)`, then presents the `Y` rows
//! of the seed's `X`-space neighbors while searching only along column `j*`.
//! Because neighbors in `X` share the driver state, each such bundle is pulled
//! onto a single column, and the column index becomes a driver estimate.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{standardize, EmbeddedSeries};
use crate::error::{Error, Result};
use crate::io::{fmt_f64, write_file};
use crate::neighbors::{squared_distance, NeighborIndex};
use crate::rng::{prng, uniform};

/// Readout correlations above this are implausible for a 20-level driver axis.
pub const READOUT_CORRELATION_CEILING: f64 = 0.975;
const CEILING_LEVELS: usize = 20;
/// Fewer distinct readout levels than this signals a collapsed grid.
pub const MIN_HEALTHY_LEVELS: usize = 3;

const GRID_MAGIC: &str = "ASOM";
const GRID_VERSION: &str = "v1";

/// `n1 × n2` lattice of `m`-dimensional receptive-field centers.
#[derive(Debug, Clone, PartialEq)]
pub struct SomGrid {
    n1: usize,
    n2: usize,
    m: usize,
    /// Node `(i, j)` starts at `(i * n2 + j) * m`.
    centers: Vec<f64>,
}

impl SomGrid {
    pub fn from_centers(n1: usize, n2: usize, m: usize, centers: Vec<f64>) -> Result<Self> {
        if n1 == 0 || n2 == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!("grid dimensions must be positive (got {n1}x{n2}x{m})")));
        }
        if centers.len() != n1 * n2 * m {
            return Err(Error::ShapeMismatch(format!("{} coordinates for a {n1}x{n2}x{m} grid", centers.len())));
        }
        Ok(Self { n1, n2, m, centers })
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.n1 * self.n2
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> &[f64] {
        let at = (i * self.n2 + j) * self.m;
        &self.centers[at..at + self.m]
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn centers_mut(&mut self) -> &mut [f64] {
        &mut self.centers
    }

    fn check_query(&self, y: &[f64]) {
        assert_eq!(y.len(), self.m, "query dimension {} does not match grid dimension {}", y.len(), self.m);
    }

    fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.centers
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.m / self.n2, (p / self.m) % self.n2))
    }

    /// Writes the `ASOM v1 n1 n2 m` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.node_count() * (8 + 24 * self.m));
        writeln!(out, "{GRID_MAGIC} {GRID_VERSION} {} {} {}", self.n1, self.n2, self.m).unwrap();
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                write!(out, "{i} {j}").unwrap();
                for &c in self.center(i, j) {
                    write!(out, " {}", fmt_f64(c)).unwrap();
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::MalformedGrid("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 5 || fields[0] != GRID_MAGIC {
            return Err(Error::MalformedGrid(format!("bad header `{header}`")));
        }
        if fields[1] != GRID_VERSION {
            return Err(Error::GridVersion(fields[1].to_string()));
        }
        let parse_dim = |s: &str| s.parse::<usize>().map_err(|_| Error::MalformedGrid(format!("bad dimension `{s}`")));
        let (n1, n2, m) = (parse_dim(fields[2])?, parse_dim(fields[3])?, parse_dim(fields[4])?);
        let mut centers = Vec::with_capacity(n1 * n2 * m);
        for i in 0..n1 {
            for j in 0..n2 {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::MalformedGrid(format!("truncated at node ({i}, {j})")))?;
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != m + 2 || parts[0] != i.to_string() || parts[1] != j.to_string() {
                    return Err(Error::MalformedGrid(format!("bad line for node ({i}, {j}): `{line}`")));
                }
                for p in &parts[2..] {
                    centers.push(p.parse::<f64>().map_err(|_| Error::MalformedGrid(format!("bad coordinate `{p}`")))?);
                }
            }
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err(Error::MalformedGrid("trailing data after the last node".into()));
        }
        Self::from_centers(n1, n2, m, centers)
    }
}

pub fn save_grid(grid: &SomGrid, path: &Path) -> Result<()> {
    write_file(path, grid.to_text().as_bytes())
}

pub fn load_grid(path: &Path) -> Result<SomGrid> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SomGrid::from_text(&text)
}

/// Centers i.i.d. uniform in the unit cube, drawn node by node in row-major order.
pub fn init_grid(n1: usize, n2: usize, m: usize, seed: u64) -> Result<SomGrid> {
    init_grid_in_box(n1, n2, m, &vec![0.0; m], &vec![1.0; m], seed)
}

/// Centers i.i.d. uniform in the box `[lo, hi]`.
pub fn init_grid_in_box(n1: usize, n2: usize, m: usize, lo: &[f64], hi: &[f64], seed: u64) -> Result<SomGrid> {
    if lo.len() != m || hi.len() != m {
        return Err(Error::ShapeMismatch("box bounds must match the grid dimension".into()));
    }
    let mut rng = prng(seed);
    let mut centers = Vec::with_capacity(n1 * n2 * m);
    for _ in 0..n1 * n2 {
        for c in 0..m {
            centers.push(uniform(&mut rng, lo[c], hi[c]));
        }
    }
    SomGrid::from_centers(n1, n2, m, centers)
}

/// Axis-aligned bounding box of an embedding, as `(lo, hi)`.
pub fn bounding_box(points: &EmbeddedSeries) -> (Vec<f64>, Vec<f64>) {
    let m = points.dim();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for row in points.iter_rows() {
        for c in 0..m {
            lo[c] = lo[c].min(row[c]);
            hi[c] = hi[c].max(row[c]);
        }
    }
    (lo, hi)
}

/// Decay schedule for the two neighborhood radii and the learning rate.
///
/// Each quantity decays exponentially from its initial value to
/// `initial / shrink` over `iterations` outer steps, i.e.
/// `sigma2(s) = sigma2_0 * exp(-s ln(sigma2_shrink) / N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingSchedule {
    /// Outer iterations `N`.
    pub iterations: usize,
    /// Neighbors `K` presented per outer iteration.
    pub neighbors: usize,
    pub sigma1_0: f64,
    pub sigma2_0: f64,
    pub epsilon_0: f64,
    pub sigma1_shrink: f64,
    pub sigma2_shrink: f64,
    pub epsilon_shrink: f64,
}

impl Default for TrainingSchedule {
    fn default() -> Self {
        Self {
            iterations: 10_000,
            neighbors: 20,
            sigma1_0: 10.0,
            sigma2_0: 20.0,
            epsilon_0: 0.2,
            sigma1_shrink: std::f64::consts::E,
            sigma2_shrink: 5.0,
            epsilon_shrink: 20.0,
        }
    }
}

impl TrainingSchedule {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.sigma1_0,
            self.sigma2_0,
            self.epsilon_0,
            self.sigma1_shrink,
            self.sigma2_shrink,
            self.epsilon_shrink,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidParameter("schedule constants must be positive and finite".into()));
        }
        if self.neighbors == 0 {
            return Err(Error::InvalidParameter("neighbor count K must be at least 1".into()));
        }
        if self.epsilon_0 > 1.0 {
            return Err(Error::InvalidParameter("initial learning rate must not exceed 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleValues {
    pub sigma1: f64,
    pub sigma2: f64,
    pub epsilon: f64,
}

/// Radii and learning rate at outer step `s`.
pub fn schedules(s: usize, schedule: &TrainingSchedule) -> ScheduleValues {
    // N = 0 never reaches a step; treat the fraction as zero.
    let frac = if schedule.iterations == 0 { 0.0 } else { s as f64 / schedule.iterations as f64 };
    ScheduleValues {
        sigma1: schedule.sigma1_0 / schedule.sigma1_shrink.powf(frac),
        sigma2: schedule.sigma2_0 / schedule.sigma2_shrink.powf(frac),
        epsilon: schedule.epsilon_0 / schedule.epsilon_shrink.powf(frac),
    }
}

/// Node whose center is nearest `y`; ties go to the lowest `(i, j)`.
pub fn global_winner(grid: &SomGrid, y: &[f64]) -> (usize, usize) {
    grid.check_query(y);
    let mut best = (0, 0);
    let mut best_d = f64::INFINITY;
    for i in 0..grid.n1 {
        for j in 0..grid.n2 {
            let d = squared_distance(grid.center(i, j), y);
            if d < best_d {
                best_d = d;
                best = (i, j);
            }
        }
    }
    best
}

/// Nearest node to `y` within column `j_star`; ties go to the lowest `i`.
pub fn row_winner(grid: &SomGrid, y: &[f64], j_star: usize) -> usize {
    grid.check_query(y);
    assert!(j_star < grid.n2, "column {j_star} out of range");
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for i in 0..grid.n1 {
        let d = squared_distance(grid.center(i, j_star), y);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Separable Gaussian neighborhood, `w_ij = exp(-(i - i_a)^2 / sigma1^2) * exp(-(j - j*)^2 / sigma2^2)`.
#[derive(Debug, Clone)]
struct AxisWeights {
    along_i: Vec<f64>,
    along_j: Vec<f64>,
}

impl AxisWeights {
    fn new(i_a: usize, j_star: usize, sigma1: f64, sigma2: f64, n1: usize, n2: usize) -> Self {
        let axis = |center: usize, sigma: f64, n: usize| -> Vec<f64> {
            (0..n)
                .map(|i| {
                    let d = i as f64 - center as f64;
                    (-(d * d) / (sigma * sigma)).exp()
                })
                .collect()
        };
        Self { along_i: axis(i_a, sigma1, n1), along_j: axis(j_star, sigma2, n2) }
    }
}

/// Learning weights for every node, row-major `n1 × n2`.
pub fn neighborhood_weights(i_a: usize, j_star: usize, sigma1: f64, sigma2: f64, n1: usize, n2: usize) -> Vec<f64> {
    let w = AxisWeights::new(i_a, j_star, sigma1, sigma2, n1, n2);
    w.along_i.iter().flat_map(|wi| w.along_j.iter().map(move |wj| wi * wj)).collect()
}

/// `C_ij <- C_ij + epsilon * w_ij * (y - C_ij)` for every node.
pub fn update_centers(grid: &mut SomGrid, y: &[f64], weights: &[f64], epsilon: f64) {
    grid.check_query(y);
    assert_eq!(weights.len(), grid.node_count(), "weight array does not match the grid");
    let m = grid.m;
    for (center, &w) in grid.centers.chunks_exact_mut(m).zip(weights) {
        let rate = epsilon * w;
        for (c, &target) in center.iter_mut().zip(y) {
            *c += rate * (target - *c);
        }
    }
}

fn update_separable(grid: &mut SomGrid, y: &[f64], w: &AxisWeights, epsilon: f64) {
    let (n2, m) = (grid.n2, grid.m);
    for (i, &wi) in w.along_i.iter().enumerate() {
        let row = &mut grid.centers[i * n2 * m..(i + 1) * n2 * m];
        for (center, &wj) in row.chunks_exact_mut(m).zip(&w.along_j) {
            let rate = epsilon * (wi * wj);
            for (c, &target) in center.iter_mut().zip(y) {
                *c += rate * (target - *c);
            }
        }
    }
}

/// Grid snapshots and counters collected during training.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingTrace {
    /// `(outer step, grid)` pairs; step 0 is the initial grid.
    pub snapshots: Vec<(usize, SomGrid)>,
    /// Completed outer iterations.
    pub outer_steps: usize,
    /// Individual center updates.
    pub updates: usize,
}

/// Trains `grid` on aligned embeddings `x` (neighbor search) and `y` (presented samples).
///
/// For each outer step `s = 1..=N`: draw `t_s`, take the global winner column
/// `j*` for `Y(t_s)`, find the `K` nearest neighbors of `X(t_s)` (self
/// excluded), and present their `Y` rows in ascending distance, each with its
/// own row winner along `j*`. Radii and learning rate use the step-`s` values.
/// `snapshot_steps` must be strictly increasing.
pub fn train(
    mut grid: SomGrid,
    x: &EmbeddedSeries,
    y: &EmbeddedSeries,
    schedule: &TrainingSchedule,
    seed: u64,
    snapshot_steps: &[usize],
) -> Result<(SomGrid, TrainingTrace)> {
    schedule.validate()?;
    if x.rows() != y.rows() || x.t0() != y.t0() {
        return Err(Error::ShapeMismatch(format!("X has {} rows, Y has {}", x.rows(), y.rows())));
    }
    if y.dim() != grid.m {
        return Err(Error::ShapeMismatch(format!("Y is {}-dimensional, grid is {}-dimensional", y.dim(), grid.m)));
    }
    if snapshot_steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("snapshot steps must be strictly increasing".into()));
    }
    let mut trace = TrainingTrace::default();
    let mut pending = snapshot_steps.iter().copied().peekable();
    if pending.peek() == Some(&0) {
        trace.snapshots.push((0, grid.clone()));
        pending.next();
    }
    if schedule.iterations == 0 {
        return Ok((grid, trace));
    }
    let index = NeighborIndex::new(x)?;
    if schedule.neighbors >= x.rows() {
        return Err(Error::TooManyNeighbors { requested: schedule.neighbors, available: x.rows() - 1 });
    }
    let mut rng = prng(seed);
    for s in 1..=schedule.iterations {
        let ScheduleValues { sigma1, sigma2, epsilon } = schedules(s, schedule);
        let t_s = rng.random_range(0..x.rows());
        let (_, j_star) = global_winner(&grid, y.row(t_s));
        for nb in index.knn(t_s, schedule.neighbors, true)? {
            let sample = y.row(nb.index);
            let i_a = row_winner(&grid, sample, j_star);
            let w = AxisWeights::new(i_a, j_star, sigma1, sigma2, grid.n1, grid.n2);
            update_separable(&mut grid, sample, &w, epsilon);
            trace.updates += 1;
        }
        if let Some((i, j)) = grid.first_non_finite() {
            return Err(Error::NonFiniteCenter { step: s, i, j });
        }
        trace.outer_steps = s;
        if pending.peek() == Some(&s) {
            trace.snapshots.push((s, grid.clone()));
            pending.next();
        }
    }
    Ok((grid, trace))
}

/// Discrete driver estimate read from a trained grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    /// Driver-axis index `j*` of the global winner for each row.
    pub levels: Vec<f64>,
    /// `levels` with zero mean and unit population SD.
    pub standardized: Vec<f64>,
    pub distinct_levels: usize,
}

impl Readout {
    /// True when too few driver levels are in use, a sign of grid collapse.
    pub fn collapse_warning(&self) -> bool {
        self.distinct_levels < MIN_HEALTHY_LEVELS
    }
}

/// Driver-axis winner indices for every row of `y_test`.
pub fn readout_levels(grid: &SomGrid, y_test: &EmbeddedSeries) -> Vec<f64> {
    y_test.iter_rows().map(|row| global_winner(grid, row).1 as f64).collect()
}

/// Reads the driver estimate and its standardized copy; errors if it is constant.
pub fn readout(grid: &SomGrid, y_test: &EmbeddedSeries) -> Result<Readout> {
    if y_test.dim() != grid.m {
        return Err(Error::ShapeMismatch(format!("Y is {}-dimensional, grid is {}-dimensional", y_test.dim(), grid.m)));
    }
    let levels = readout_levels(grid, y_test);
    let distinct_levels = levels.iter().map(|&l| l as usize).collect::<BTreeSet<_>>().len();
    let standardized = standardize(&levels).map_err(|e| match e {
        Error::ZeroVariance(_) => Error::ZeroVariance("readout uses a single driver level (grid collapse)".into()),
        other => other,
    })?;
    Ok(Readout { levels, standardized, distinct_levels })
}

/// Rejects correlations a discretized readout with at most 20 levels cannot plausibly reach.
pub fn check_readout_correlation(rho: f64, distinct_levels: usize) -> Result<()> {
    if distinct_levels <= CEILING_LEVELS && rho.abs() > READOUT_CORRELATION_CEILING {
        return Err(Error::ImplausibleCorrelation {
            rho,
            levels: distinct_levels,
            ceiling: READOUT_CORRELATION_CEILING,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::delay_embed;
    use std::f64::consts::E;

    #[test]
    fn init_is_seeded_and_in_unit_cube() {
        let a = init_grid(40, 20, 3, 5).unwrap();
        assert_eq!(a, init_grid(40, 20, 3, 5).unwrap());
        assert_ne!(a, init_grid(40, 20, 3, 6).unwrap());
        assert_eq!(a.node_count(), 800);
        assert_eq!(a.centers().len(), 2400);
        assert!(a.centers().iter().all(|c| (0.0..1.0).contains(c)));
    }

    #[test]
    fn schedule_endpoints() {
        let sch = TrainingSchedule::default();
        let v0 = schedules(0, &sch);
        assert_eq!((v0.sigma1, v0.sigma2, v0.epsilon), (10.0, 20.0, 0.2));
        let vn = schedules(sch.iterations, &sch);
        assert_eq!(vn.sigma1, 10.0 / E);
        assert_eq!(vn.sigma2, 4.0);
        assert_eq!(vn.epsilon, 0.01);
        // exp form agrees
        let s = 3_700;
        let v = schedules(s, &sch);
        let f = s as f64 / sch.iterations as f64;
        assert!((v.sigma2 - 20.0 * (-f * 5f64.ln()).exp()).abs() < 1e-12);
        assert!((v.epsilon - 0.2 * (-f * 20f64.ln()).exp()).abs() < 1e-14);
        assert!((v.sigma1 - 10.0 * (-f).exp()).abs() < 1e-12);
    }

    #[test]
    fn schedules_decrease() {
        let sch = TrainingSchedule::default();
        let mut prev = schedules(0, &sch);
        for s in (100..=sch.iterations).step_by(100) {
            let v = schedules(s, &sch);
            assert!(v.sigma1 < prev.sigma1 && v.sigma2 < prev.sigma2 && v.epsilon < prev.epsilon);
            prev = v;
        }
    }

    #[test]
    fn winners() {
        let grid = init_grid(6, 4, 3, 1).unwrap();
        let c = grid.center(3, 2).to_vec();
        assert_eq!(global_winner(&grid, &c), (3, 2));
        assert_eq!(row_winner(&grid, &c, 2), 3);
        let single = init_grid(1, 1, 2, 0).unwrap();
        assert_eq!(global_winner(&single, &[5.0, 5.0]), (0, 0));
        let column = init_grid(1, 5, 2, 0).unwrap();
        assert_eq!(row_winner(&column, &[0.3, 0.3], 4), 0);
    }

    #[test]
    fn winner_ties_go_low() {
        let grid = SomGrid::from_centers(2, 2, 1, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(global_winner(&grid, &[0.5]), (0, 0));
        assert_eq!(row_winner(&grid, &[0.5], 1), 0);
    }

    #[test]
    fn weight_values() {
        let w = neighborhood_weights(2, 1, 1.5, 3.0, 5, 4);
        assert_eq!(w[2 * 4 + 1], 1.0);
        for i in 0..5 {
            for j in 0..4 {
                let di = i as f64 - 2.0;
                let dj = j as f64 - 1.0;
                let direct = (-(di * di / 2.25 + dj * dj / 9.0)).exp();
                assert!((w[i * 4 + j] - direct).abs() <= 1e-15 * direct.max(1e-300) + 1e-300, "({i},{j})");
            }
        }
        let w = neighborhood_weights(0, 0, 2.0, 5.0, 3, 1);
        assert!((w[2] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn update_rules() {
        let mut grid = SomGrid::from_centers(1, 2, 2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        update_centers(&mut grid, &[0.5, -0.5], &[1.0, 0.0], 1.0);
        assert_eq!(grid.center(0, 0), &[0.5, -0.5]);
        assert_eq!(grid.center(0, 1), &[1.0, 1.0]);
        let before = squared_distance(grid.center(0, 1), &[3.0, 2.0]);
        update_centers(&mut grid, &[3.0, 2.0], &[0.3, 0.7], 0.5);
        assert!(squared_distance(grid.center(0, 1), &[3.0, 2.0]) < before);
    }

    fn toy_embeddings(n: usize) -> (EmbeddedSeries, EmbeddedSeries) {
        let xs: Vec<f64> = (0..n).map(|t| 0.5 + 0.4 * (t as f64 * 0.61).sin()).collect();
        let ys: Vec<f64> = (0..n).map(|t| 0.5 + 0.4 * (t as f64 * 0.23).cos()).collect();
        (delay_embed(&xs, 3, 1).unwrap(), delay_embed(&ys, 3, 1).unwrap())
    }

    #[test]
    fn zero_iterations_leave_grid_unchanged() {
        let (x, y) = toy_embeddings(200);
        let grid = init_grid(5, 4, 3, 2).unwrap();
        let sch = TrainingSchedule { iterations: 0, ..TrainingSchedule::default() };
        let (trained, trace) = train(grid.clone(), &x, &y, &sch, 0, &[0]).unwrap();
        assert_eq!(trained, grid);
        assert_eq!(trace.snapshots.len(), 1);
    }

    #[test]
    fn training_counts_and_snapshots() {
        let (x, y) = toy_embeddings(300);
        let grid = init_grid(8, 4, 3, 2).unwrap();
        let sch = TrainingSchedule { iterations: 50, neighbors: 5, ..TrainingSchedule::default() };
        let (_, trace) = train(grid.clone(), &x, &y, &sch, 1, &[0, 10, 50]).unwrap();
        assert_eq!(trace.outer_steps, 50);
        assert_eq!(trace.updates, 250);
        assert_eq!(trace.snapshots.iter().map(|s| s.0).collect::<Vec<_>>(), vec![0, 10, 50]);
        assert!(train(grid, &x, &y, &sch, 1, &[10, 10]).is_err());
    }

    #[test]
    fn non_finite_data_aborts() {
        let (x, mut_y) = toy_embeddings(100);
        let mut flat = mut_y.as_flat().to_vec();
        flat.iter_mut().for_each(|v| *v = f64::NAN);
        let y = EmbeddedSeries::from_flat(flat, 3).unwrap();
        let x = EmbeddedSeries::from_flat(x.as_flat().to_vec(), 3).unwrap();
        let sch = TrainingSchedule { iterations: 3, neighbors: 2, ..TrainingSchedule::default() };
        let err = train(init_grid(3, 3, 3, 0).unwrap(), &x, &y, &sch, 0, &[]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteCenter { step: 1, .. }));
    }

    #[test]
    fn grid_text_round_trip() {
        let grid = init_grid(4, 3, 2, 9).unwrap();
        let text = grid.to_text();
        assert!(text.starts_with("ASOM v1 4 3 2\n"));
        let back = SomGrid::from_text(&text).unwrap();
        assert_eq!(back, grid);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn grid_text_errors() {
        let text = init_grid(4, 3, 2, 9).unwrap().to_text();
        let truncated: String = text.lines().take(5).map(|l| format!("{l}\n")).collect();
        assert!(matches!(SomGrid::from_text(&truncated), Err(Error::MalformedGrid(_))));
        assert!(matches!(SomGrid::from_text(&text.replace("v1", "v2")), Err(Error::GridVersion(_))));
        assert!(matches!(SomGrid::from_text("hello"), Err(Error::MalformedGrid(_))));
        assert!(matches!(SomGrid::from_text(&format!("{text}0 0 1 1\n")), Err(Error::MalformedGrid(_))));
    }

    #[test]
    fn degenerate_readout_errors() {
        // column j sits at distance j from every query, so j* is always 0
        let grid = SomGrid::from_centers(1, 3, 1, vec![0.0, 1.0, 2.0]).unwrap();
        let queries = EmbeddedSeries::from_flat(vec![-1.0, -2.0, -0.5], 1).unwrap();
        assert_eq!(readout_levels(&grid, &queries), vec![0.0; 3]);
        assert!(matches!(readout(&grid, &queries), Err(Error::ZeroVariance(_))));
    }

    #[test]
    fn ceiling_check() {
        assert!(check_readout_correlation(0.97, 20).is_ok());
        assert!(check_readout_correlation(-0.98, 20).is_err());
        assert!(check_readout_correlation(0.99, 200).is_ok());
    }
}
