//! Runs a config file the same way the `gnde` binary does and prints the
//! trajectory CSV of a single integration.
//!
//! Usage: `cargo run --example run_config -- path/to/experiment.conf`

use gnde::experiment::{cmd_integrate, ExperimentConfig};

fn main() -> gnde::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => "graphon = hsbm\nn = 16\nhorizon = 0.5\neval_points = 5\n".to_string(),
    };
    let cfg = ExperimentConfig::parse(&text)?;
    eprint!("{}", cfg.to_record().to_text());
    print!("{}", cmd_integrate(&cfg)?.to_csv());
    Ok(())
}
