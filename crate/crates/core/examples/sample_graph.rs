//! Samples a graph and its initial features from a catalog graphon and
//! prints basic statistics.
//!
//! Usage: `cargo run --example sample_graph -- [graphon] [n]`

use gnde::catalog::{kernel_distance, GraphonSpec, Norm};
use gnde::sampling::{induce_kernel, sample_features, sample_graph, FeatureFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gnde::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "tent".into());
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(64);

    let spec = GraphonSpec::by_name(&name)?;
    let graph = sample_graph(&spec, n)?;
    let a = graph.adjacency();
    let density = a.sum() / (n * n) as f64;
    println!("{name}: {} graph on {n} nodes, edge density {density:.4}", graph.class().as_str());

    // Distance between the graphon and the step kernel of its sample. A
    // prime quadrature grid keeps midpoints off the sample points.
    let gap = kernel_distance(&spec, &induce_kernel(&graph), Norm::L2, 997)?;
    println!("||W - W_n||_2 ≈ {gap:.4}");

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let z = FeatureFunction::random_fourier(1, 10, &mut rng)?;
    let x0 = sample_features(&spec, &z, n)?;
    let col = x0.values().column(0);
    println!(
        "initial features: min {:.3}, max {:.3}",
        col.fold(f64::INFINITY, |m, &v| m.min(v)),
        col.fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    );
    Ok(())
}
