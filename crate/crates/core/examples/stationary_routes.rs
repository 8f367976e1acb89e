//! Mean-field matrices and the stationary distribution computed two
//! independent ways, plus the passage times of the social chain.
//!
//! ```bash
//! cargo run --example stationary_routes
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wgossip::fixtures;
use wgossip::mean_field::{build_mean_matrices, passage_data, stationary_distribution, stationary_perturbation, write_matrix_csv};

pub fn run_example() -> wgossip::Result<()> {
    let net = fixtures::net_b();
    let mm = build_mean_matrices(&net);
    println!("NET-B Wbar:");
    write_matrix_csv(&mm.wbar, std::io::stdout())?;
    println!("pi = {:?}", stationary_distribution(&mm)?.pi);

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let net = fixtures::random_network(8, &mut rng);
    let mm = build_mean_matrices(&net);
    let direct = stationary_distribution(&mm)?;
    let perturbed = stationary_perturbation(&mm)?;
    let gap = direct.pi.iter().zip(&perturbed.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("random 8-node network: max |direct - perturbation| = {gap:.2e}");
    for (k, p) in direct.pi.iter().enumerate() {
        println!("  pi[{k}] = {p:.6}");
    }

    let pd = passage_data(&mm.k)?;
    println!("mean first passage times from node 0: {:?}", pd.m.row(0).iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> wgossip::Result<()> {
    run_example()
}
