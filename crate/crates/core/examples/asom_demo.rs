// The full single-system workflow: simulate, measure dimensions, train the
// anisotropic map on 10 000 steps and read the driver out of the next 10 000.
//
//     cargo run --release --example asom_demo -- [out_dir]

use std::path::PathBuf;

use hidden_driver::pipeline::{run_demo, ExperimentConfig};

pub fn run_example(out: Option<PathBuf>) -> hidden_driver::Result<()> {
    let cfg = ExperimentConfig::default();
    let o = run_demo(&cfg, out.as_deref())?;

    let s = &o.summary;
    println!("grid {}x{}: {} self axis, {} driver axis", s.shape.n1, s.shape.n2, s.shape.self_dims, s.shape.driver_dims);
    println!("relation {}, D_Z {:.2}", o.dimensions.relation, o.dimensions.d_z);
    for (step, grid) in &o.trace.snapshots {
        let spread = grid.centers().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        println!("snapshot at step {step:>5}: max |center| {spread:.3}");
    }
    println!("{} driver levels in use", s.distinct_levels);
    println!("|rho(zhat, z)| = {:.3}", s.evaluation.abs_rho);
    if let Some(dir) = out {
        println!("artifacts in {}", dir.display());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hidden_driver::Result<()> {
    run_example(std::env::args().nth(1).map(PathBuf::from))
}
