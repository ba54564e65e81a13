//! Small dense symmetric-matrix routines for the linear baselines.
//!
//! Matrices are row-major `Vec<f64>` of size `d × d`.

use crate::error::{Error, Result};
use crate::rng::{prng, uniform};

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 200_000;

/// Column means and the centered `T × d` data, row-major.
pub(crate) fn center(data: &[f64], d: usize) -> (Vec<f64>, Vec<f64>) {
    let t = data.len() / d;
    let mut means = vec![0.0; d];
    for row in data.chunks_exact(d) {
        for (m, v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    means.iter_mut().for_each(|m| *m /= t as f64);
    let centered = data.chunks_exact(d).flat_map(|row| row.iter().zip(&means).map(|(v, m)| v - m)).collect();
    (means, centered)
}

/// `Aᵀ B / (T - 1)` for centered row-major `A` (`T × da`) and `B` (`T × db`).
pub(crate) fn cross_covariance(a: &[f64], da: usize, b: &[f64], db: usize) -> Vec<f64> {
    let t = a.len() / da;
    let mut out = vec![0.0; da * db];
    for (ra, rb) in a.chunks_exact(da).zip(b.chunks_exact(db)) {
        for i in 0..da {
            let ai = ra[i];
            for j in 0..db {
                out[i * db + j] += ai * rb[j];
            }
        }
    }
    let denom = (t as f64 - 1.0).max(1.0);
    out.iter_mut().for_each(|v| *v /= denom);
    out
}

pub(crate) fn mat_vec(a: &[f64], rows: usize, cols: usize, v: &[f64]) -> Vec<f64> {
    (0..rows).map(|i| (0..cols).map(|j| a[i * cols + j] * v[j]).sum()).collect()
}

pub(crate) fn mat_t_vec(a: &[f64], rows: usize, cols: usize, v: &[f64]) -> Vec<f64> {
    (0..cols).map(|j| (0..rows).map(|i| a[i * cols + j] * v[i]).sum()).collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn normalize(v: &mut [f64]) {
    let n = norm(v);
    v.iter_mut().for_each(|x| *x /= n);
}

/// Flips `v` so its largest-magnitude entry is positive; returns whether it flipped.
pub(crate) fn fix_sign(v: &mut [f64]) -> bool {
    let lead = v.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
    if lead < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
        true
    } else {
        false
    }
}

/// Leading eigenpair of a symmetric positive semidefinite operator by power iteration.
///
/// `apply` computes the operator times a vector. The start vector is a fixed
/// pseudo-random direction; iteration stops when successive unit vectors
/// differ by less than `1e-12`.
pub(crate) fn power_iteration(d: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> Result<(f64, Vec<f64>)> {
    let mut rng = prng(0x00C0_FFEE);
    let mut v: Vec<f64> = (0..d).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
    normalize(&mut v);
    for _ in 0..POWER_MAX_ITERS {
        let mut next = apply(&v);
        let n = norm(&next);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroVariance("operator annihilates the start vector".into()));
        }
        next.iter_mut().for_each(|x| *x /= n);
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        v = next;
        if change < POWER_TOL {
            break;
        }
    }
    let av = apply(&v);
    let lambda = v.iter().zip(&av).map(|(a, b)| a * b).sum();
    Ok((lambda, v))
}

/// Lower-triangular Cholesky factor of a symmetric matrix, `None` if not positive definite.
pub(crate) fn cholesky(a: &[f64], d: usize, min_pivot: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i * d + k] * l[j * d + k]).sum();
            if i == j {
                let pivot = a[i * d + i] - s;
                if !(pivot > min_pivot) {
                    return None;
                }
                l[i * d + i] = pivot.sqrt();
            } else {
                l[i * d + j] = (a[i * d + j] - s) / l[j * d + j];
            }
        }
    }
    Some(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub(crate) fn solve_lower(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; d];
    for i in 0..d {
        let s: f64 = (0..i).map(|k| l[i * d + k] * x[k]).sum();
        x[i] = (b[i] - s) / l[i * d + i];
    }
    x
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub(crate) fn solve_upper_t(l: &[f64], d: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let s: f64 = (i + 1..d).map(|k| l[k * d + i] * x[k]).sum();
        x[i] = (b[i] - s) / l[i * d + i];
    }
    x
}
