//! Homomorphism densities of small motifs, on graphons and on their samples.
//!
//! Usage: `cargo run --release --example motif_densities`

use gnde::catalog::{hom_density_graph, hom_density_graphon, GraphonSpec, Motif};
use gnde::sampling::sample_graph;

fn main() -> gnde::Result<()> {
    let motifs = [
        ("edge", Motif::edge()),
        ("triangle", Motif::triangle()),
        ("4-cycle", Motif::four_cycle()),
    ];
    for name in ["tent", "checkerboard", "hsbm"] {
        let spec = GraphonSpec::by_name(name)?;
        println!("{name}");
        for (label, motif) in &motifs {
            let limit = hom_density_graphon(motif, &spec, 48)?;
            let sampled: Vec<String> = [16usize, 32, 64]
                .iter()
                .map(|&n| Ok(format!("{:.4}", hom_density_graph(motif, &sample_graph(&spec, n)?)?)))
                .collect::<gnde::Result<_>>()?;
            println!("  {label:>8}: graphon {limit:.4}, n=16/32/64 {}", sampled.join(" "));
        }
    }
    Ok(())
}
