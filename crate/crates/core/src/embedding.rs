//! Delay embedding, joint observations and the time-permuted surrogate.

use std::io::Write;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::io::fmt_f64;
use crate::rng::prng;

/// A `rows × m` array of delay vectors stored row-major.
///
/// Row `r` holds `[s(t0 + r), s(t0 + r + tau), ..., s(t0 + r + (m-1) tau)]`
/// of the source series `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedSeries {
    data: Vec<f64>,
    m: usize,
    tau: usize,
    t0: usize,
}

impl EmbeddedSeries {
    /// Wraps a flat row-major point set (e.g. synthetic clouds) as an embedding with `tau = 1`.
    pub fn from_flat(data: Vec<f64>, m: usize) -> Result<Self> {
        if m == 0 || data.len() % m != 0 {
            return Err(Error::ShapeMismatch(format!("{} values do not form rows of width {m}", data.len())));
        }
        Ok(Self { data, m, tau: 1, t0: 0 })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::ShapeMismatch("rows of unequal width".into()));
        }
        Self::from_flat(rows.concat(), m)
    }

    pub fn rows(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn t0(&self) -> usize {
        self.t0
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.m..(r + 1) * self.m]
    }

    pub fn iter_rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.m)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        self.iter_rows().map(|r| r[c]).collect()
    }

    /// Rows `[start, end)` as a new embedding, keeping source alignment.
    pub fn slice_rows(&self, start: usize, end: usize) -> EmbeddedSeries {
        EmbeddedSeries {
            data: self.data[start * self.m..end * self.m].to_vec(),
            m: self.m,
            tau: self.tau,
            t0: self.t0 + start,
        }
    }

    fn check_aligned(&self, other: &EmbeddedSeries) -> Result<()> {
        if self.m != other.m || self.tau != other.tau || self.t0 != other.t0 || self.rows() != other.rows() {
            return Err(Error::ShapeMismatch(format!(
                "embeddings not aligned: (rows {}, m {}, tau {}, t0 {}) vs (rows {}, m {}, tau {}, t0 {})",
                self.rows(),
                self.m,
                self.tau,
                self.t0,
                other.rows(),
                other.m,
                other.tau,
                other.t0
            )));
        }
        Ok(())
    }

    /// CSV with columns `dim0..dim{m-1}`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header: Vec<String> = (0..self.m).map(|c| format!("dim{c}")).collect();
        writeln!(out, "{}", header.join(","))?;
        for row in self.iter_rows() {
            let fields: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// Forward delay embedding with dimension `m` and lag `tau`.
pub fn delay_embed(series: &[f64], m: usize, tau: usize) -> Result<EmbeddedSeries> {
    if m == 0 || tau == 0 {
        return Err(Error::InvalidParameter(format!("embedding needs m >= 1 and tau >= 1 (got m = {m}, tau = {tau})")));
    }
    let span = (m - 1) * tau;
    if series.len() < span + 1 {
        return Err(Error::SeriesTooShort { needed: span + 1, got: series.len() });
    }
    let rows = series.len() - span;
    let mut data = Vec::with_capacity(rows * m);
    for t in 0..rows {
        data.extend((0..m).map(|c| series[t + c * tau]));
    }
    Ok(EmbeddedSeries { data, m, tau, t0: 0 })
}

/// Mixing constant `a` of the joint observation `X + a Y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointConstant(f64);

impl JointConstant {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() {
            Ok(Self(a))
        } else {
            Err(Error::InvalidParameter(format!("joint constant must be positive, got {a}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for JointConstant {
    /// `sqrt(29/31)`
    fn default() -> Self {
        Self((29.0f64 / 31.0).sqrt())
    }
}

/// Row-wise `X(t) + a Y(t)`.
pub fn joint_embed(x: &EmbeddedSeries, y: &EmbeddedSeries, a: JointConstant) -> Result<EmbeddedSeries> {
    x.check_aligned(y)?;
    let a = a.value();
    let data = x.data.iter().zip(&y.data).map(|(xv, yv)| xv + a * yv).collect();
    Ok(EmbeddedSeries { data, ..*x })
}

/// Row-wise `X(t) + a Y(perm[t])` for an explicit permutation of row indices.
pub fn permuted_joint_with(
    x: &EmbeddedSeries,
    y: &EmbeddedSeries,
    a: JointConstant,
    perm: &[usize],
) -> Result<EmbeddedSeries> {
    x.check_aligned(y)?;
    if perm.len() != x.rows() {
        return Err(Error::ShapeMismatch(format!("permutation of length {} for {} rows", perm.len(), x.rows())));
    }
    let a = a.value();
    let mut data = Vec::with_capacity(x.data.len());
    for (r, &p) in perm.iter().enumerate() {
        data.extend(x.row(r).iter().zip(y.row(p)).map(|(xv, yv)| xv + a * yv));
    }
    Ok(EmbeddedSeries { data, ..*x })
}

/// Uniform random permutation of `0..n` from the seeded PRNG.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut prng(seed));
    perm
}

/// The time-permuted joint `I(t) = X(t) + a Y(pi(t))`.
///
/// Whole embedded rows of `Y` are shuffled, so each marginal attractor is
/// kept intact while the pairing in time is destroyed.
pub fn time_permute_joint(x: &EmbeddedSeries, y: &EmbeddedSeries, a: JointConstant, seed: u64) -> Result<EmbeddedSeries> {
    x.check_aligned(y)?;
    permuted_joint_with(x, y, a, &random_permutation(x.rows(), seed))
}

/// Zero mean and unit population standard deviation.
pub fn standardize(series: &[f64]) -> Result<Vec<f64>> {
    if series.len() < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: series.len() });
    }
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    if !(sd > 0.0) || sd <= 1e-300 {
        return Err(Error::ZeroVariance("cannot standardize a constant series".into()));
    }
    Ok(series.iter().map(|v| (v - mean) / sd).collect())
}
