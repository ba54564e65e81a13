// Cross-mapping neighborhoods between two coupled logistic maps.
//
// With x driving y, a tight neighborhood on Y's attractor maps onto a tight
// set on X's, while a neighborhood on X spreads out on Y.

use hidden_driver::dynamics::{logistic_pair_simulate, CouplingMode, PairParams};
use hidden_driver::embedding::delay_embed;
use hidden_driver::neighbors::{cross_map_with_index, diameter, NeighborIndex};

/// Mean diameter of the images of `samples` neighborhoods of `k` points.
fn mean_image_diameter(
    source: &hidden_driver::embedding::EmbeddedSeries,
    target: &hidden_driver::embedding::EmbeddedSeries,
    k: usize,
    samples: usize,
) -> hidden_driver::Result<f64> {
    let index = NeighborIndex::new(source)?;
    let step = source.rows() / samples;
    let mut total = 0.0;
    for s in 0..samples {
        total += diameter(&cross_map_with_index(&index, target, s * step, k)?.target_rows);
    }
    Ok(total / samples as f64)
}

pub fn run_example() -> hidden_driver::Result<()> {
    for (label, params, mode) in [
        ("x -> y", PairParams::unidirectional(), CouplingMode::Unidirectional),
        ("x <-> y", PairParams::circular(), CouplingMode::Circular),
    ] {
        let out = logistic_pair_simulate(&params, mode, [0.2, 0.7], 3_000, 5)?;
        let x = delay_embed(&out.x, 2, 1)?;
        let y = delay_embed(&out.y, 2, 1)?;
        let x_on_y = mean_image_diameter(&x, &y, 10, 200)?;
        let y_on_x = mean_image_diameter(&y, &x, 10, 200)?;
        println!("{label:>8}: X-neighborhoods on Y {x_on_y:.3}, Y-neighborhoods on X {y_on_x:.3}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> hidden_driver::Result<()> {
    run_example()
}
