//! Exact L2 distance between step functions on different partitions, the
//! metric used to compare graph signals of different sizes.
//!
//! Usage: `cargo run --example overlay_distance`

use gnde::sampling::{induce_features, overlay_l2_distance};
use ndarray::Array2;

fn main() -> gnde::Result<()> {
    // A ramp sampled on 4 and on 6 nodes.
    let ramp = |n: usize| Array2::from_shape_fn((n, 1), |(i, _)| i as f64 / n as f64);
    let coarse = induce_features(&ramp(4))?;
    let fine = induce_features(&ramp(6))?;
    let d = overlay_l2_distance(&coarse, &fine)?;
    println!("||X_4 - X_6||_L2 = {d:.6}");

    // Against the continuous ramp the gap decays like 1/n.
    for n in [8usize, 16, 32, 64] {
        let dense = induce_features(&ramp(4096))?;
        let d = overlay_l2_distance(&induce_features(&ramp(n))?, &dense)?;
        println!("n = {n:>3}: distance to the dense ramp {d:.5}, n·d = {:.4}", n as f64 * d);
    }
    Ok(())
}
