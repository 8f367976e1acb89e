//! Per-client impact on the expected consensus, the passage-time identity
//! check, and the premium tiers derived from the ranking.
//!
//! ```bash
//! cargo run --example rank_clients
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wgossip::fixtures;
use wgossip::impact::impact_report;
use wgossip::mean_field::{build_mean_matrices, passage_data, stationary_distribution};
use wgossip::spectral::{conductance, ConductanceMode};

pub fn run_example() -> wgossip::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let net = fixtures::random_network(9, &mut rng);
    let mm = build_mean_matrices(&net);
    let pi = stationary_distribution(&mm)?.pi;
    let pd = passage_data(&mm.k)?;
    let psi = conductance(&mm.k, ConductanceMode::Exact)?;
    let report = impact_report(&net, &pi, &pd, psi);

    println!("passage-time identity max residual: {:.2e}", report.passage_time_max_residual);
    println!("uniform bound on |impact|: {:?}", report.conductance_bound);
    match &report.bridge {
        Ok(b) => println!("bridge closed form on {:?}", b.edge),
        Err(reason) => println!("bridge closed form: {reason}"),
    }
    for c in &report.ranking {
        println!("#{:<2} node {} impact {:+.5} score {:+.3} {}", c.rank, c.node, c.impact, c.score, c.tier.as_str());
    }

    // a single influential bridge: both clusters get one impact value each
    let (net, edge) = fixtures::random_single_bridge(3, 4, &mut rng);
    let mm = build_mean_matrices(&net);
    let pi = stationary_distribution(&mm)?.pi;
    let report = impact_report(&net, &pi, &passage_data(&mm.k)?, None);
    println!("bridge {edge:?} impacts: {:?}", report.exact().iter().map(|v| format!("{v:+.5}")).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> wgossip::Result<()> {
    run_example()
}
