//! Integrates one GNDE with each solver and compares the trajectories,
//! including the fixed-point oracle.
//!
//! Usage: `cargo run --release --example integrate`

use gnde::catalog::GraphonSpec;
use gnde::dynamics::{integrate, picard_solve, sup_scaled_distance, SolverConfig};
use gnde::neural::{Activation, FilterBank};
use gnde::sampling::{graph_shift, sample_features, sample_graph, FeatureFunction};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gnde::Result<()> {
    let spec = GraphonSpec::by_name("oscillatory")?;
    let n = 24;
    let horizon = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bank = FilterBank::random_constant(2, 2, 2, &mut rng)?;
    let z = FeatureFunction::random_fourier(2, 10, &mut rng)?;

    let s = graph_shift(&sample_graph(&spec, n)?);
    let x0 = sample_features(&spec, &z, n)?.into_inner();
    let act = Activation::Tanh;

    let rk4 = integrate(s.view(), &x0, &bank, act, horizon, &SolverConfig::rk4())?;
    let dp5 = integrate(s.view(), &x0, &bank, act, horizon, &SolverConfig::dp5())?;
    let picard = picard_solve(s.view(), &x0, &bank, act, horizon, &SolverConfig::picard())?;

    for traj in [&rk4, &dp5, &picard] {
        let m = traj.meta();
        println!(
            "{:>6}: {} steps/sweeps, {} rejected, {} rhs evals, sup ||X(t)|| = {:.5}",
            m.method,
            m.accepted,
            m.rejected,
            m.rhs_evals,
            traj.sup_norm()
        );
    }
    println!("rk4 vs dp5    {:.2e}", sup_scaled_distance(&rk4, &dp5)?);
    println!("rk4 vs picard {:.2e}", sup_scaled_distance(&rk4, &picard)?);
    println!("dp5 vs picard {:.2e}", sup_scaled_distance(&dp5, &picard)?);
    Ok(())
}
