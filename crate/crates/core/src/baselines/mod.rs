//! Comparison methods: spectrum-matched random surrogate, first principal
//! component, and first canonical pair.

mod linalg;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::embedding::{standardize, EmbeddedSeries};
use crate::error::{Error, Result};
use crate::rng::{prng, uniform};

use linalg::{center, cholesky, cross_covariance, fix_sign, mat_t_vec, mat_vec, norm, normalize, power_iteration, solve_lower, solve_upper_t};

/// Ridge added to each view's covariance diagonal before whitening.
pub const CCA_RIDGE: f64 = 1e-8;
/// Cholesky pivots below this fraction of the mean variance mark a view as rank deficient.
const RANK_TOL: f64 = 1e-6;

/// Randomizes Fourier phases while keeping every spectral magnitude.
///
/// Each conjugate pair `(f, n - f)` is rotated by `e^{±iθ_f}` with `θ_f`
/// uniform in `[0, 2π)`, drawn for `f = 1, 2, ...` in order. The DC term and,
/// for even lengths, the Nyquist term are left unchanged.
pub fn phase_shuffle(series: &[f64], seed: u64) -> Result<Vec<f64>> {
    let n = series.len();
    if n < 2 {
        return Err(Error::SeriesTooShort { needed: 2, got: n });
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut spectrum: Vec<Complex64> = series.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut spectrum);
    let mut rng = prng(seed);
    for f in 1..n.div_ceil(2) {
        let theta = uniform(&mut rng, 0.0, std::f64::consts::TAU);
        let rotated = spectrum[f] * Complex64::from_polar(1.0, theta);
        spectrum[f] = rotated;
        spectrum[n - f] = rotated.conj();
    }
    planner.plan_fft_inverse(n).process(&mut spectrum);
    Ok(spectrum.iter().map(|c| c.re / n as f64).collect())
}

/// A unit-norm projection applied after centering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProjection {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
}

impl LinearProjection {
    pub fn apply(&self, features: &EmbeddedSeries) -> Result<Vec<f64>> {
        if features.dim() != self.weights.len() {
            return Err(Error::ShapeMismatch(format!(
                "{}-column features for a {}-weight projection",
                features.dim(),
                self.weights.len()
            )));
        }
        Ok(features
            .iter_rows()
            .map(|row| row.iter().zip(&self.means).zip(&self.weights).map(|((v, m), w)| (v - m) * w).sum())
            .collect())
    }
}

/// Side-by-side concatenation of two aligned feature sets.
pub fn concat_features(a: &EmbeddedSeries, b: &EmbeddedSeries) -> Result<EmbeddedSeries> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch(format!("{} rows vs {} rows", a.rows(), b.rows())));
    }
    let data = a.iter_rows().zip(b.iter_rows()).flat_map(|(ra, rb)| ra.iter().chain(rb).copied()).collect();
    EmbeddedSeries::from_flat(data, a.dim() + b.dim())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaResult {
    /// Scores along the first component.
    pub projection: Vec<f64>,
    pub component: LinearProjection,
    /// Variance explained by the first component.
    pub variance: f64,
}

/// First principal component of `T × d` features by power iteration on the covariance.
///
/// The weight vector is signed so that its largest-magnitude entry is positive.
pub fn pca_first_component(features: &EmbeddedSeries) -> Result<PcaResult> {
    let d = features.dim();
    let t = features.rows();
    if t <= d {
        return Err(Error::InvalidParameter(format!("PCA needs more rows than columns ({t} <= {d})")));
    }
    let (means, centered) = center(features.as_flat(), d);
    let cov = cross_covariance(&centered, d, &centered, d);
    let trace: f64 = (0..d).map(|i| cov[i * d + i]).sum();
    if !(trace > 0.0) {
        return Err(Error::ZeroVariance("PCA input has no variance".into()));
    }
    let (variance, mut weights) = power_iteration(d, |v| mat_vec(&cov, d, d, v))?;
    fix_sign(&mut weights);
    let component = LinearProjection { weights, means };
    let projection = component.apply(features)?;
    Ok(PcaResult { projection, component, variance })
}

/// First canonical pair of two views.
#[derive(Debug, Clone, PartialEq)]
pub struct CcaModel {
    pub x_projection: LinearProjection,
    pub y_projection: LinearProjection,
    /// Canonical correlation of the (ridge-regularized) fit.
    pub correlation: f64,
}

impl CcaModel {
    /// Mean of the two standardized canonical variates.
    pub fn estimate(&self, x_feats: &EmbeddedSeries, y_feats: &EmbeddedSeries) -> Result<Vec<f64>> {
        let u = standardize(&self.x_projection.apply(x_feats)?)?;
        let v = standardize(&self.y_projection.apply(y_feats)?)?;
        Ok(u.iter().zip(&v).map(|(a, b)| 0.5 * (a + b)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcaResult {
    pub model: CcaModel,
    /// Hidden-driver estimate on the fitting data.
    pub estimate: Vec<f64>,
}

fn whitening_factor(cov: &mut [f64], d: usize, view: &str) -> Result<Vec<f64>> {
    let mean_var = (0..d).map(|i| cov[i * d + i]).sum::<f64>() / d as f64;
    for i in 0..d {
        cov[i * d + i] += CCA_RIDGE;
    }
    cholesky(cov, d, RANK_TOL * mean_var.max(0.0))
        .ok_or_else(|| Error::RankDeficient(format!("{view} view covariance is singular")))
}

/// Unit-norm `u`, `v` maximizing the correlation of `X u` and `Y v`.
///
/// Each view is whitened through the Cholesky factor of its ridge-regularized
/// covariance; the top singular pair of the whitened cross-covariance comes
/// from power iteration on `MᵀM`.
pub fn cca_first_pair(x_feats: &EmbeddedSeries, y_feats: &EmbeddedSeries) -> Result<CcaResult> {
    let (dx, dy, t) = (x_feats.dim(), y_feats.dim(), x_feats.rows());
    if y_feats.rows() != t {
        return Err(Error::ShapeMismatch(format!("views have {t} and {} rows", y_feats.rows())));
    }
    if t <= dx.max(dy) {
        return Err(Error::InvalidParameter(format!("CCA needs more rows than columns ({t})")));
    }
    let (x_means, xc) = center(x_feats.as_flat(), dx);
    let (y_means, yc) = center(y_feats.as_flat(), dy);
    let lx = whitening_factor(&mut cross_covariance(&xc, dx, &xc, dx), dx, "X")?;
    let ly = whitening_factor(&mut cross_covariance(&yc, dy, &yc, dy), dy, "Y")?;
    let cxy = cross_covariance(&xc, dx, &yc, dy);

    // M = Lx⁻¹ Cxy Ly⁻ᵀ, built column by column.
    let mut whitened = vec![0.0; dx * dy];
    for col in 0..dy {
        let mut e = vec![0.0; dy];
        e[col] = 1.0;
        let c = mat_vec(&cxy, dx, dy, &solve_upper_t(&ly, dy, &e));
        for (row, v) in solve_lower(&lx, dx, &c).into_iter().enumerate() {
            whitened[row * dy + col] = v;
        }
    }
    let (_, b) = power_iteration(dy, |v| mat_t_vec(&whitened, dx, dy, &mat_vec(&whitened, dx, dy, v)))?;
    let mb = mat_vec(&whitened, dx, dy, &b);
    let correlation = norm(&mb);
    if !(correlation > 0.0) {
        return Err(Error::ZeroVariance("views are uncorrelated".into()));
    }
    let a: Vec<f64> = mb.iter().map(|v| v / correlation).collect();
    let mut u = solve_upper_t(&lx, dx, &a);
    let mut v = solve_upper_t(&ly, dy, &b);
    normalize(&mut u);
    normalize(&mut v);
    if fix_sign(&mut u) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let model = CcaModel {
        x_projection: LinearProjection { weights: u, means: x_means },
        y_projection: LinearProjection { weights: v, means: y_means },
        correlation,
    };
    let estimate = model.estimate(x_feats, y_feats)?;
    Ok(CcaResult { model, estimate })
}
