// Intrinsic dimension: first on point clouds of known dimension, then on the
// demonstration system, where the joint observation reveals a hidden driver.

use hidden_driver::dimension::{analyze_dimensions, dimension_over_k_range, DimensionSettings};
use hidden_driver::dynamics::{logistic_triad_simulate, LogisticTriadParams};
use hidden_driver::embedding::EmbeddedSeries;
use hidden_driver::rng::{prng, uniform};

pub fn run_example() -> hidden_driver::Result<()> {
    let mut rng = prng(2);
    for d in 1..=3 {
        let flat: Vec<f64> = (0..4_000 * d).map(|_| uniform(&mut rng, 0.0, 1.0)).collect();
        let cube = EmbeddedSeries::from_flat(flat, d)?;
        let est = dimension_over_k_range(&cube, 10, 20)?;
        println!("unit {d}-cube: {:.3} +- {:.3}", est.mean, est.spread);
    }

    let out = logistic_triad_simulate(&LogisticTriadParams::demo(), [0.3, 0.4, 0.5], 5_000, 1)?;
    let report = analyze_dimensions(&out.x, &out.y, &DimensionSettings::default(), 9)?;
    println!("D_X {:.3}  D_Y {:.3}  D_J {:.3}  D_I {:.3}", report.d_x.mean, report.d_y.mean, report.d_j.mean, report.d_i.mean);
    println!("D_Z = D_X + D_Y - D_J = {:.3}", report.d_z);
    println!("relation: {}", report.relation);
    Ok(())
}

#[allow(dead_code)]
fn main() -> hidden_driver::Result<()> {
    run_example()
}
