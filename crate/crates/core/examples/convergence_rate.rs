//! Measures the trajectory convergence rate of a GNDE as the graph grows.
//!
//! Usage: `cargo run --release --example convergence_rate -- [key=value ...]`
//! with any experiment config keys, e.g. `graphon=hexaflake trials=3`.

use gnde::experiment::{run_converge, ExperimentConfig};

fn main() -> gnde::Result<()> {
    let text: String = std::env::args().skip(1).map(|a| a + "\n").collect();
    let cfg = ExperimentConfig::parse(&text)?;
    let report = run_converge(&cfg)?;
    for t in &report.trials {
        match &t.fit {
            Ok(f) => println!("trial {} seed {}: slope {:.3}", t.trial, t.seed, f.slope),
            Err(e) => println!("trial {} seed {}: {e}", t.trial, t.seed),
        }
    }
    if let Some((mean, sd)) = report.slope_stats() {
        println!("{}: mean slope {mean:.3} ± {sd:.3}", cfg.graphon.name());
    }
    println!("bound violations: {}", report.violations());
    Ok(())
}
