//! Graphon error of random node subsamples of a large graph, averaged over
//! trials for each kept proportion.
//!
//! Usage: `cargo run --release --example transfer_audit -- [graphon] [n]`

use gnde::catalog::GraphonSpec;
use gnde::experiment::transfer_audit;
use gnde::sampling::sample_graph;

fn main() -> gnde::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "tent".into());
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(256);

    let graph = sample_graph(&GraphonSpec::by_name(&name)?, n)?;
    let proportions: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    let report = transfer_audit(&graph, &proportions, 10, 0)?;
    for s in &report.summary {
        println!("keep {:>4.0}%: mean error {:.4} ± {:.4} over {} trials", s.proportion * 100.0, s.mean, s.sd, s.trials);
    }
    Ok(())
}
