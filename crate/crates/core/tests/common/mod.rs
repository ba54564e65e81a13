//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use hidden_driver::asom::SomGrid;
use hidden_driver::embedding::EmbeddedSeries;
use hidden_driver::rng::{prng, uniform, Prng};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

/// Every row sorted by `(squared distance, index)`, skipping `exclude`.
pub fn brute_knn(points: &EmbeddedSeries, query: &[f64], k: usize, exclude: Option<usize>) -> Vec<(usize, f64)> {
    let mut all: Vec<(f64, usize)> = (0..points.rows())
        .filter(|&r| Some(r) != exclude)
        .map(|r| {
            let d2: f64 = query.iter().zip(points.row(r)).map(|(a, b)| (a - b) * (a - b)).sum();
            (d2, r)
        })
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    all.into_iter().take(k).map(|(d2, r)| (r, d2.sqrt())).collect()
}

/// Points with coordinates on a coarse integer lattice, so exact distance ties are common.
pub fn tied_points(rng: &mut Prng, n: usize, m: usize) -> EmbeddedSeries {
    let flat = (0..n * m).map(|_| rng.random_range(0..4) as f64).collect();
    EmbeddedSeries::from_flat(flat, m).unwrap()
}

pub fn uniform_points(rng: &mut Prng, n: usize, m: usize) -> EmbeddedSeries {
    let flat = (0..n * m).map(|_| uniform(rng, 0.0, 1.0)).collect();
    EmbeddedSeries::from_flat(flat, m).unwrap()
}

pub fn circle_points(rng: &mut Prng, n: usize) -> EmbeddedSeries {
    let flat = (0..n)
        .flat_map(|_| {
            let a = uniform(rng, 0.0, std::f64::consts::TAU);
            [a.cos(), a.sin()]
        })
        .collect();
    EmbeddedSeries::from_flat(flat, 2).unwrap()
}

/// Naive `O(T^2)` discrete Fourier transform magnitudes.
pub fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    (0..n)
        .map(|f| {
            let (mut re, mut im) = (0.0, 0.0);
            for (t, v) in x.iter().enumerate() {
                let ang = -std::f64::consts::TAU * ((f * t) % n) as f64 / n as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            re.hypot(im)
        })
        .collect()
}

/// Circular autocorrelation sums `sum_t x(t) x(t + lag mod n)`.
pub fn circular_acf(x: &[f64], max_lag: usize) -> Vec<f64> {
    let n = x.len();
    (0..=max_lag).map(|lag| (0..n).map(|t| x[t] * x[(t + lag) % n]).sum()).collect()
}

pub fn to_matrix(e: &EmbeddedSeries) -> DMatrix<f64> {
    DMatrix::from_row_slice(e.rows(), e.dim(), e.as_flat())
}

/// Unbiased covariance of a data matrix.
pub fn covariance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let ca = center(a);
    let cb = center(b);
    ca.transpose() * cb / (a.nrows() as f64 - 1.0)
}

fn center(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut c = a.clone();
    for mut col in c.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    c
}

/// Leading eigenpair of the covariance from a dense symmetric eigensolver.
pub fn pca_oracle(features: &EmbeddedSeries) -> (f64, DVector<f64>) {
    let m = to_matrix(features);
    let eig = SymmetricEigen::new(covariance(&m, &m));
    let top = eig.eigenvalues.imax();
    (eig.eigenvalues[top], eig.eigenvectors.column(top).into_owned())
}

fn inverse_sqrt(c: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(c.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// First canonical correlation and unit-norm weights from a dense SVD of the whitened cross-covariance.
pub fn cca_oracle(x: &EmbeddedSeries, y: &EmbeddedSeries, ridge: f64) -> (f64, DVector<f64>, DVector<f64>) {
    let (xm, ym) = (to_matrix(x), to_matrix(y));
    let cxx = covariance(&xm, &xm) + DMatrix::identity(x.dim(), x.dim()) * ridge;
    let cyy = covariance(&ym, &ym) + DMatrix::identity(y.dim(), y.dim()) * ridge;
    let (wx, wy) = (inverse_sqrt(&cxx), inverse_sqrt(&cyy));
    let svd = (&wx * covariance(&xm, &ym) * &wy).svd(true, true);
    let top = svd.singular_values.imax();
    let u = (&wx * svd.u.as_ref().unwrap().column(top)).normalize();
    let v = (&wy * svd.v_t.as_ref().unwrap().row(top).transpose()).normalize();
    (svd.singular_values[top], u, v)
}

/// Sign-insensitive maximum deviation between two vectors.
pub fn max_dev_up_to_sign(a: &[f64], b: &[f64]) -> f64 {
    let plus = a.iter().zip(b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let minus = a.iter().zip(b).map(|(p, q)| (p + q).abs()).fold(0.0, f64::max);
    plus.min(minus)
}

/// Plain 1-D Kohonen map over `n1` nodes, replaying the trainer's draws:
/// for each step, a uniform row `t_s`, its `k` nearest neighbors in `x`, and one
/// winner-centered Gaussian update per neighbor's `y` row.
#[allow(clippy::too_many_arguments)]
pub fn kohonen_1d(
    mut centers: Vec<Vec<f64>>,
    x: &EmbeddedSeries,
    y: &EmbeddedSeries,
    k: usize,
    steps: usize,
    seed: u64,
    sigma: impl Fn(usize) -> f64,
    epsilon: impl Fn(usize) -> f64,
) -> Vec<Vec<f64>> {
    let mut rng = prng(seed);
    for s in 1..=steps {
        let t_s = rng.random_range(0..x.rows());
        for (nb, _) in brute_knn(x, x.row(t_s), k, Some(t_s)) {
            let sample = y.row(nb);
            let dist = |c: &Vec<f64>| c.iter().zip(sample).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            let winner = (0..centers.len()).fold(0, |best, i| if dist(&centers[i]) < dist(&centers[best]) { i } else { best });
            let (sg, eps) = (sigma(s), epsilon(s));
            for (i, c) in centers.iter_mut().enumerate() {
                let d = i as f64 - winner as f64;
                let rate = eps * (-(d * d) / (sg * sg)).exp();
                for (cv, &target) in c.iter_mut().zip(sample) {
                    *cv += rate * (target - *cv);
                }
            }
        }
    }
    centers
}

pub fn grid_rows(grid: &SomGrid) -> Vec<Vec<f64>> {
    grid.centers().chunks_exact(grid.dim()).map(<[f64]>::to_vec).collect()
}
