//! Layer-by-layer output of the polynomial graph filter network that
//! drives the dynamics, with time-varying filter taps.
//!
//! Usage: `cargo run --example forward_map`

use gnde::catalog::GraphonSpec;
use gnde::dynamics::scaled_norm;
use gnde::neural::{gnn_forward_layers, Activation, FilterBank};
use gnde::sampling::{graph_shift, sample_graph};
use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gnde::Result<()> {
    let n = 32;
    let s = graph_shift(&sample_graph(&GraphonSpec::tent(1.0)?, n)?);
    let x = Array2::from_shape_fn((n, 2), |(i, c)| ((i + c) as f64 / n as f64).sin());

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bank = FilterBank::random_fourier(3, 2, 3, 2, 1.0, &mut rng)?;
    println!("h_T certified bound {:.4}", bank.h_sup().certified);

    for t in [0.0, 0.25, 0.5] {
        let h = bank.filters_at(t)?;
        let layers = gnn_forward_layers(s.view(), x.view(), &h, Activation::Relu)?;
        let norms: Vec<String> = layers.iter().map(|y| format!("{:.4}", scaled_norm(y))).collect();
        println!("t = {t:.2}: layer norms {}", norms.join(" -> "));
    }
    Ok(())
}
