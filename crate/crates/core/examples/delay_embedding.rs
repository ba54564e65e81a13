// Delay embedding of one observation, and the joint and time-permuted
// observations built from two of them.

use hidden_driver::dynamics::{logistic_triad_simulate, LogisticTriadParams};
use hidden_driver::embedding::{delay_embed, joint_embed, time_permute_joint, JointConstant};

pub fn run_example() -> hidden_driver::Result<()> {
    let out = logistic_triad_simulate(&LogisticTriadParams::demo(), [0.3, 0.4, 0.5], 2_000, 3)?;

    let x = delay_embed(&out.x, 4, 1)?;
    let y = delay_embed(&out.y, 4, 1)?;
    println!("X: {} rows of {} lags, first row starts at t = {}", x.rows(), x.dim(), x.t0());
    println!("X(t0) = {:?}", x.row(0));

    let a = JointConstant::new(1.0)?;
    let joint = joint_embed(&x, &y, a)?;
    let shuffled = time_permute_joint(&x, &y, a, 11)?;
    println!("J: {} x {}, I: {} x {}", joint.rows(), joint.dim(), shuffled.rows(), shuffled.dim());

    println!("J(t0) = X(t0) + a Y(t0) = {:?}", joint.row(0));

    // Shuffling Y's rows keeps both marginal attractors but breaks their pairing in time.
    let step = |e: &hidden_driver::embedding::EmbeddedSeries| {
        (1..e.rows()).map(|r| (e.row(r)[0] - e.row(r - 1)[1]).abs()).sum::<f64>() / (e.rows() - 1) as f64
    };
    println!("mean |J(t)[0] - J(t-1)[1]| {:.4}, same for I {:.4}", step(&joint), step(&shuffled));
    Ok(())
}

#[allow(dead_code)]
fn main() -> hidden_driver::Result<()> {
    run_example()
}
