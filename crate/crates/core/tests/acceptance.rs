//! The nine acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary so the lines are always printed. With
//! `ACCEPTANCE_STRICT=1` any failing criterion makes the process exit non-zero.
//! A numeric argument runs that criterion alone.

mod common;

use std::time::{Duration, Instant};

use common::*;
use hidden_driver::asom::{
    check_readout_correlation, init_grid, neighborhood_weights, schedules, train, TrainingSchedule,
};
use hidden_driver::baselines::{cca_first_pair, pca_first_component, phase_shuffle, CCA_RIDGE};
use hidden_driver::dimension::{dimension_over_k_range, CausalRelation};
use hidden_driver::dynamics::{logistic_pair_simulate, CouplingMode, PairParams};
use hidden_driver::embedding::{delay_embed, EmbeddedSeries};
use hidden_driver::neighbors::{cross_map_with_index, diameter, NeighborIndex};
use hidden_driver::pipeline::{
    dimension_analysis, run_batch, run_demo, simulate, split, train_grid, ExperimentConfig, Method, Preset, StageSeeds,
};
use hidden_driver::rng::{prng, uniform, BoxMuller};
use rand::Rng;

type Outcome = (bool, String);

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn demo_reconstruction() -> Outcome {
    let mut rhos = Vec::new();
    let mut slowest = Duration::ZERO;
    for seed in 1..=5 {
        let cfg = ExperimentConfig { seed, ..ExperimentConfig::preset(Preset::Demo) };
        let start = Instant::now();
        let o = run_demo(&cfg, None).expect("demo run");
        slowest = slowest.max(start.elapsed());
        rhos.push(o.summary.evaluation.abs_rho);
    }
    let med = median(rhos.clone());
    let ok = med >= 0.80 && slowest <= Duration::from_secs(120);
    (ok, format!("median |rho| {med:.3} over seeds 1-5 {rhos:.3?} (need >= 0.80), slowest run {slowest:.1?}"))
}

fn batch(preset: Preset) -> (hidden_driver::pipeline::BatchOutcome, Duration) {
    let cfg = ExperimentConfig::preset(preset);
    let start = Instant::now();
    let out = run_batch(&cfg, None).expect("batch");
    (out, start.elapsed())
}

fn logistic_batch() -> Outcome {
    let (out, took) = batch(Preset::BatchLogistic);
    let m = |method| out.median(method).unwrap_or(f64::NAN);
    let (asom, pca, cca, random) = (m(Method::Asom), m(Method::Pca), m(Method::Cca), m(Method::Random));
    let ok = asom >= 0.72
        && (pca - 0.71).abs() <= 0.15
        && (cca - 0.73).abs() <= 0.15
        && random <= 0.15
        && out.runs_completed == 50
        && took <= Duration::from_secs(7_200);
    (
        ok,
        format!(
            "{} runs in {took:.0?}: asom {asom:.3} (>= 0.72), pca {pca:.3} (0.71 +- 0.15), cca {cca:.3} (0.73 +- 0.15), random {random:.3} (<= 0.15)",
            out.runs_completed
        ),
    )
}

fn tent_batch() -> Outcome {
    let (out, took) = batch(Preset::BatchTent);
    let m = |method| out.median(method).unwrap_or(f64::NAN);
    let (asom, pca, cca, random) = (m(Method::Asom), m(Method::Pca), m(Method::Cca), m(Method::Random));
    let ok = asom >= 0.70 && asom > pca && asom > cca && asom > random && out.runs_completed == 50;
    (
        ok,
        format!(
            "{} runs in {took:.0?}: asom {asom:.3} (>= 0.70 and above the rest), pca {pca:.3}, cca {cca:.3}, random {random:.3}",
            out.runs_completed
        ),
    )
}

fn demo_dimensions() -> Outcome {
    let cfg = ExperimentConfig::preset(Preset::Demo);
    let seeds = StageSeeds::new(cfg.seed);
    let start = Instant::now();
    let sim = simulate(&cfg, &seeds).expect("simulate");
    let r = dimension_analysis(&cfg, &sim.series, &seeds).expect("dimensions");
    let took = start.elapsed();
    let (dx, dy, dj, di) = (r.d_x.mean, r.d_y.mean, r.d_j.mean, r.d_i.mean);
    let ok = (1.9..=2.45).contains(&dx)
        && (1.9..=2.45).contains(&dy)
        && (2.7..=3.3).contains(&dj)
        && di > dj + 0.15
        && r.relation == CausalRelation::HiddenCommonDriver
        && cfg.dimension_chunk == 5_000
        && cfg.dimension_m == 4
        && took <= Duration::from_secs(60);
    (
        ok,
        format!(
            "D_X {dx:.3} D_Y {dy:.3} (1.9-2.45), D_J {dj:.3} (2.7-3.3), D_I {di:.3} (> D_J + 0.15), {} in {took:.1?}",
            r.relation
        ),
    )
}

fn estimator_oracles() -> Outcome {
    let mut rng = prng(2024);
    let mut parts = Vec::new();
    let mut ok = true;
    for d in 1..=3 {
        let est = dimension_over_k_range(&uniform_points(&mut rng, 10_000, d), 10, 20).unwrap().mean;
        ok &= (est - d as f64).abs() <= 0.25;
        parts.push(format!("{d}-cube {est:.3}"));
    }
    let est = dimension_over_k_range(&circle_points(&mut rng, 10_000), 10, 20).unwrap().mean;
    ok &= (est - 1.0).abs() <= 0.1;
    parts.push(format!("circle {est:.3}"));
    (ok, parts.join(", "))
}

fn knn_exactness() -> Outcome {
    let mut rng = prng(6);
    let mut mismatches = 0;
    let mut queries = 0;
    for instance in 0..100 {
        let n = rng.random_range(2..=1000);
        let m = rng.random_range(1..=6);
        let pts = if instance % 2 == 0 { tied_points(&mut rng, n, m) } else { uniform_points(&mut rng, n, m) };
        let index = NeighborIndex::new(&pts).unwrap();
        for _ in 0..5 {
            let q = rng.random_range(0..n);
            let k = rng.random_range(1..n);
            let got: Vec<(usize, f64)> = index.knn(q, k, true).unwrap().iter().map(|nb| (nb.index, nb.distance)).collect();
            queries += 1;
            if got != brute_knn(&pts, pts.row(q), k, Some(q)) {
                mismatches += 1;
            }
        }
    }
    (mismatches == 0, format!("{mismatches} mismatches in {queries} queries over 100 instances (half on a tie-heavy lattice)"))
}

fn asom_invariants() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let w = neighborhood_weights(13, 7, 2.5, 1.5, 40, 20);
    let winner_one = w[13 * 20 + 7] == 1.0;
    ok &= winner_one;
    notes.push(format!("winner weight 1: {winner_one}"));

    let sch = TrainingSchedule::default();
    let end = schedules(sch.iterations, &sch);
    let exact = end.sigma1 == 10.0 / std::f64::consts::E && end.sigma2 == 4.0 && end.epsilon == 0.01;
    ok &= exact;
    notes.push(format!("s=N ({:.4}, {}, {}): {exact}", end.sigma1, end.sigma2, end.epsilon));

    let cfg = ExperimentConfig { iterations: 2_000, ..ExperimentConfig::preset(Preset::Demo) };
    let seeds = StageSeeds::new(cfg.seed);
    let data = split(&cfg, &simulate(&cfg, &seeds).unwrap().series).unwrap();
    let (a, _) = train_grid(&cfg, &data, &seeds).unwrap();
    let (b, _) = train_grid(&cfg, &data, &seeds).unwrap();
    let repeat = a.centers().iter().zip(b.centers()).all(|(p, q)| p.to_bits() == q.to_bits());
    ok &= repeat;
    notes.push(format!("bit-identical repeat: {repeat}"));

    let start = init_grid(cfg.n1, cfg.n2, cfg.som_m, seeds.grid_init).unwrap();
    let (trained, _) = train(start.clone(), &data.x_train, &data.y_train, &cfg.schedule(), seeds.train, &[]).unwrap();
    let m = cfg.som_m;
    let inside = (0..m).all(|c| {
        let col = |g: &hidden_driver::asom::SomGrid| g.centers().chunks_exact(m).map(|r| r[c]).collect::<Vec<_>>();
        let init = col(&start);
        let data_c = data.y_train.column(c);
        let lo = init.iter().chain(&data_c).copied().fold(f64::MAX, f64::min);
        let hi = init.iter().chain(&data_c).copied().fold(f64::MIN, f64::max);
        col(&trained).iter().all(|v| (lo..=hi).contains(v))
    });
    ok &= inside;
    notes.push(format!("inside bounding box: {inside}"));

    let levels = hidden_driver::asom::readout(&trained, &data.y_test).unwrap().distinct_levels;
    let flagged = check_readout_correlation(0.98, levels).is_err() && check_readout_correlation(0.97, levels).is_ok();
    ok &= levels <= 20 && flagged;
    notes.push(format!("{levels} levels, |rho| > 0.975 flagged: {flagged}"));
    (ok, notes.join("; "))
}

fn cross_mapping_asymmetry() -> Outcome {
    let params = PairParams::unidirectional();
    let mut wins = 0;
    for seed in 0..100u64 {
        let mut rng = prng(seed);
        let init = [uniform(&mut rng, 0.1, 0.9), uniform(&mut rng, 0.1, 0.9)];
        let out = logistic_pair_simulate(&params, CouplingMode::Unidirectional, init, 2_000, seed).unwrap();
        let x = delay_embed(&out.x, 2, 1).unwrap();
        let y = delay_embed(&out.y, 2, 1).unwrap();
        let mean_image = |src: &EmbeddedSeries, dst: &EmbeddedSeries| {
            let index = NeighborIndex::new(src).unwrap();
            let step = src.rows() / 100;
            (0..100).map(|s| diameter(&cross_map_with_index(&index, dst, s * step, 10).unwrap().target_rows)).sum::<f64>() / 100.0
        };
        if mean_image(&x, &y) > mean_image(&y, &x) {
            wins += 1;
        }
    }
    (wins >= 80, format!("Y-images of X-neighborhoods wider in {wins}/100 runs (need >= 80)"))
}

fn baseline_oracles() -> Outcome {
    let mut rng = prng(9);
    let mut g = BoxMuller::new();
    let x: Vec<f64> = (0..777).map(|t| (t as f64 * 0.11).cos() + 0.3 * g.sample(&mut rng)).collect();
    let shuffled = phase_shuffle(&x, 1).unwrap();
    let spec_err = dft_magnitudes(&x).iter().zip(dft_magnitudes(&shuffled)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let flat: Vec<f64> = (0..500)
        .flat_map(|_| {
            let l = g.sample(&mut rng);
            (0..6).map(|c| 0.4 * c as f64 * l + g.sample(&mut rng)).collect::<Vec<_>>()
        })
        .collect();
    let feats = EmbeddedSeries::from_flat(flat, 6).unwrap();
    let (_, vector) = pca_oracle(&feats);
    let pca_err = max_dev_up_to_sign(&pca_first_component(&feats).unwrap().component.weights, vector.as_slice());

    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for _ in 0..2_000 {
        let l = g.sample(&mut rng);
        xs.extend([l + g.sample(&mut rng), -0.5 * l + g.sample(&mut rng), g.sample(&mut rng)]);
        ys.extend([0.8 * l + g.sample(&mut rng), g.sample(&mut rng), 0.3 * l + g.sample(&mut rng)]);
    }
    let (xv, yv) = (EmbeddedSeries::from_flat(xs, 3).unwrap(), EmbeddedSeries::from_flat(ys, 3).unwrap());
    let fit = cca_first_pair(&xv, &yv).unwrap().model;
    let (rho, u, v) = cca_oracle(&xv, &yv, CCA_RIDGE);
    let cca_err = (fit.correlation - rho)
        .abs()
        .max(max_dev_up_to_sign(&fit.x_projection.weights, u.as_slice()))
        .max(max_dev_up_to_sign(&fit.y_projection.weights, v.as_slice()));

    let ok = spec_err <= 1e-9 && pca_err <= 1e-8 && cca_err <= 1e-6;
    (ok, format!("spectrum {spec_err:.1e} (1e-9), pca {pca_err:.1e} (1e-8), cca {cca_err:.1e} (1e-6)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("demo reconstruction", demo_reconstruction),
        ("logistic batch", logistic_batch),
        ("tent batch", tent_batch),
        ("demo dimensions", demo_dimensions),
        ("estimator oracles", estimator_oracles),
        ("knn exactness", knn_exactness),
        ("asom invariants", asom_invariants),
        ("cross-mapping asymmetry", cross_mapping_asymmetry),
        ("baseline oracles", baseline_oracles),
    ];
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.iter().any(|a| a == "--list") {
        for (n, (name, _)) in criteria.iter().enumerate() {
            println!("criterion {} {name}: test", n + 1);
        }
        return;
    }
    let only: Option<usize> = args.iter().find_map(|a| a.parse().ok());
    let mut failed = Vec::new();
    for (n, (name, check)) in criteria.iter().enumerate().map(|(i, c)| (i + 1, c)) {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let (ok, detail) = check();
        println!("criterion {n} {name}: {} | {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(n);
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
    } else {
        println!("failed criteria: {failed:?}");
        if std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
            std::process::exit(1);
        }
    }
}
