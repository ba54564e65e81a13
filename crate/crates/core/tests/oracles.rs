mod common;

use common::*;
use hidden_driver::asom::{global_winner, init_grid, neighborhood_weights, row_winner, train, SomGrid, TrainingSchedule};
use hidden_driver::baselines::{cca_first_pair, concat_features, pca_first_component, phase_shuffle, CCA_RIDGE};
use hidden_driver::dimension::{dimension_over_k_range, global_dimension, local_dimension};
use hidden_driver::embedding::{delay_embed, EmbeddedSeries};
use hidden_driver::neighbors::{cross_map_neighborhood, NeighborIndex};
use hidden_driver::rng::{prng, uniform, BoxMuller};
use rand::Rng;

#[test]
fn knn_equals_brute_force_including_ties() {
    let mut rng = prng(100);
    for instance in 0..100 {
        let n = rng.random_range(2..=1000);
        let m = rng.random_range(1..=6);
        let pts = if instance % 2 == 0 { tied_points(&mut rng, n, m) } else { uniform_points(&mut rng, n, m) };
        let index = NeighborIndex::new(&pts).unwrap();
        for _ in 0..10 {
            let q = rng.random_range(0..n);
            let k = rng.random_range(1..n);
            let got: Vec<(usize, f64)> = index.knn(q, k, true).unwrap().iter().map(|nb| (nb.index, nb.distance)).collect();
            assert_eq!(got, brute_knn(&pts, pts.row(q), k, Some(q)), "instance {instance}, n {n}, m {m}, k {k}");
        }
    }
}

#[test]
fn cross_map_uses_brute_force_neighbors() {
    let mut rng = prng(5);
    let x = uniform_points(&mut rng, 500, 3);
    let y = uniform_points(&mut rng, 500, 3);
    for t in [0, 17, 250, 499] {
        let cm = cross_map_neighborhood(&x, &y, t, 12).unwrap();
        let want: Vec<usize> = brute_knn(&x, x.row(t), 12, Some(t)).into_iter().map(|p| p.0).collect();
        assert_eq!(cm.times, want);
        for (row, &time) in cm.target_rows.iter().zip(&cm.times) {
            assert_eq!(row.as_slice(), y.row(time));
        }
    }
}

#[test]
fn winners_match_brute_force() {
    let mut rng = prng(8);
    for seed in 0..20 {
        let grid = init_grid(7, 5, 3, seed).unwrap();
        for _ in 0..50 {
            let y: Vec<f64> = (0..3).map(|_| uniform(&mut rng, 0.0, 1.0)).collect();
            let d = |i: usize, j: usize| grid.center(i, j).iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
            let mut best = (0, 0);
            for i in 0..7 {
                for j in 0..5 {
                    if d(i, j) < d(best.0, best.1) {
                        best = (i, j);
                    }
                }
            }
            assert_eq!(global_winner(&grid, &y), best);
            let col = best.1;
            let row = (0..7).fold(0, |b, i| if d(i, col) < d(b, col) { i } else { b });
            assert_eq!(row_winner(&grid, &y, col), row);
        }
    }
}

#[test]
fn neighborhood_weights_direct_evaluation() {
    let (s1, s2) = (1.7, 0.9);
    let w = neighborhood_weights(3, 1, s1, s2, 5, 4);
    for i in 0..5 {
        for j in 0..4 {
            let (di, dj) = (i as f64 - 3.0, j as f64 - 1.0);
            let want = (-(di * di) / (s1 * s1) - (dj * dj) / (s2 * s2)).exp();
            assert!((w[i * 4 + j] - want).abs() < 1e-15, "({i},{j})");
        }
    }
}

#[test]
fn single_column_grid_is_a_kohonen_chain() {
    let mut rng = prng(21);
    let flat: Vec<f64> = (0..600).map(|_| uniform(&mut rng, 0.0, 1.0)).collect();
    let x = delay_embed(&flat, 2, 1).unwrap();
    let y = delay_embed(&flat.iter().map(|v| v * v).collect::<Vec<_>>(), 2, 1).unwrap();
    let schedule = TrainingSchedule { iterations: 300, neighbors: 6, sigma2_0: 1e12, ..TrainingSchedule::default() };
    let start = init_grid(12, 1, 2, 4).unwrap();
    let (trained, _) = train(start.clone(), &x, &y, &schedule, 77, &[]).unwrap();

    let n = schedule.iterations as f64;
    let oracle = kohonen_1d(
        grid_rows(&start),
        &x,
        &y,
        schedule.neighbors,
        schedule.iterations,
        77,
        |s| schedule.sigma1_0 / schedule.sigma1_shrink.powf(s as f64 / n),
        |s| schedule.epsilon_0 / schedule.epsilon_shrink.powf(s as f64 / n),
    );
    for (a, b) in grid_rows(&trained).iter().zip(&oracle) {
        for (p, q) in a.iter().zip(b) {
            assert!((p - q).abs() < 1e-12, "{p} vs {q}");
        }
    }
}

#[test]
fn pca_matches_dense_eigensolver() {
    for seed in 0..5 {
        let mut rng = prng(seed);
        let mut g = BoxMuller::new();
        let flat: Vec<f64> = (0..400)
            .flat_map(|_| {
                let l = g.sample(&mut rng);
                (0..6).map(|c| (c as f64 + 1.0) * 0.3 * l + g.sample(&mut rng)).collect::<Vec<_>>()
            })
            .collect();
        let feats = EmbeddedSeries::from_flat(flat, 6).unwrap();
        let fit = pca_first_component(&feats).unwrap();
        let (value, vector) = pca_oracle(&feats);
        assert!((fit.variance - value).abs() < 1e-8 * value.max(1.0));
        assert!(max_dev_up_to_sign(&fit.component.weights, vector.as_slice()) < 1e-8);
    }
}

#[test]
fn cca_matches_svd_on_shared_latent() {
    for seed in 0..5 {
        let mut rng = prng(50 + seed);
        let mut g = BoxMuller::new();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for _ in 0..1_000 {
            let latent = g.sample(&mut rng);
            xs.extend((0..3).map(|c| [0.9, -0.4, 0.2][c] * latent + g.sample(&mut rng)));
            ys.extend((0..4).map(|c| [0.1, 0.7, 0.5, -0.3][c] * latent + 0.8 * g.sample(&mut rng)));
        }
        let x = EmbeddedSeries::from_flat(xs, 3).unwrap();
        let y = EmbeddedSeries::from_flat(ys, 4).unwrap();
        let fit = cca_first_pair(&x, &y).unwrap().model;
        let (rho, u, v) = cca_oracle(&x, &y, CCA_RIDGE);
        assert!((fit.correlation - rho).abs() < 1e-6, "{} vs {rho}", fit.correlation);
        assert!(max_dev_up_to_sign(&fit.x_projection.weights, u.as_slice()) < 1e-6);
        assert!(max_dev_up_to_sign(&fit.y_projection.weights, v.as_slice()) < 1e-6);
    }
}

#[test]
fn pca_on_concatenated_views_is_defined() {
    let mut rng = prng(3);
    let a = uniform_points(&mut rng, 200, 3);
    let b = uniform_points(&mut rng, 200, 3);
    let both = concat_features(&a, &b).unwrap();
    let (value, _) = pca_oracle(&both);
    assert!((pca_first_component(&both).unwrap().variance - value).abs() < 1e-10);
}

#[test]
fn phase_shuffle_keeps_dft_magnitudes() {
    for (n, seed) in [(257usize, 1u64), (500, 2), (1024, 3)] {
        let mut rng = prng(seed);
        let x: Vec<f64> = (0..n).map(|t| (t as f64 * 0.07).sin() + uniform(&mut rng, -0.5, 0.5)).collect();
        let y = phase_shuffle(&x, seed + 10).unwrap();
        for (f, (a, b)) in dft_magnitudes(&x).iter().zip(dft_magnitudes(&y)).enumerate() {
            assert!((a - b).abs() < 1e-9, "n {n} bin {f}: {a} vs {b}");
        }
        for (a, b) in circular_acf(&x, 20).iter().zip(circular_acf(&y, 20)) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}

#[test]
fn pure_cosine_stays_a_cosine() {
    let n = 360;
    let f = 7;
    let x: Vec<f64> = (0..n).map(|t| 2.0 * (std::f64::consts::TAU * (f * t) as f64 / n as f64).cos()).collect();
    let y = phase_shuffle(&x, 4).unwrap();
    let mags = dft_magnitudes(&y);
    for (bin, m) in mags.iter().enumerate() {
        if bin == f || bin == n - f {
            assert!((m - n as f64).abs() < 1e-9);
        } else {
            assert!(m.abs() < 1e-9, "bin {bin}: {m}");
        }
    }
    let amplitude = y.iter().map(|v| v * v).sum::<f64>() / n as f64;
    assert!((amplitude - 2.0).abs() < 1e-12);
}

#[test]
fn lattice_interior_is_two_dimensional() {
    let side = 41;
    let flat: Vec<f64> = (0..side * side).flat_map(|p| [(p / side) as f64, (p % side) as f64]).collect();
    let grid = EmbeddedSeries::from_flat(flat, 2).unwrap();
    let index = NeighborIndex::new(&grid).unwrap();
    for (i, j) in [(20, 20), (15, 25), (25, 18)] {
        let d = local_dimension(&index, i * side + j, 12).unwrap().unwrap();
        assert!((d - 2.0).abs() < 0.2, "({i},{j}): {d}");
    }
}

#[test]
fn monte_carlo_dimensions() {
    let mut rng = prng(12);
    let square = uniform_points(&mut rng, 10_000, 2);
    let d = global_dimension(&square, 15).unwrap();
    assert!((d - 2.0).abs() < 0.1, "square {d}");
    let cube = uniform_points(&mut rng, 10_000, 3);
    let d = dimension_over_k_range(&cube, 10, 20).unwrap().mean;
    assert!((d - 3.0).abs() < 0.2, "cube {d}");
    let circle = circle_points(&mut rng, 10_000);
    let d = dimension_over_k_range(&circle, 10, 20).unwrap().mean;
    assert!((d - 1.0).abs() < 0.1, "circle {d}");
}

#[test]
fn pearson_hand_value() {
    let rho = hidden_driver::evaluation::pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
    assert!((rho - 0.981_980_506_061_965_7).abs() < 1e-12);
}

#[test]
fn grid_file_round_trip_preserves_bits() {
    let grid = init_grid(4, 3, 2, 9).unwrap();
    let back = SomGrid::from_text(&grid.to_text()).unwrap();
    assert_eq!(grid, back);
}
