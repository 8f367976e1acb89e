//! Simulate the gossip process: one traced replica, then a seeded ensemble
//! whose mean converged value is compared with the mean-field prediction.
//!
//! ```bash
//! cargo run --release --example simulate_consensus
//! ```

use wgossip::fixtures;
use wgossip::gossip::{run_replica, simulate_ensemble, SimParams};
use wgossip::mean_field::{build_mean_matrices, stationary_distribution};

pub fn run_example() -> wgossip::Result<()> {
    // two triangles, the bridge pulls node 2 towards node 3
    let net = fixtures::barbell(3, 3, Some(0.9));
    let params = SimParams { record_every: 25, ..SimParams::default() };

    let trace = run_replica(&net, &params, 42);
    println!("replica 0: converged={} after {} slots, value {:.6}", trace.converged, trace.slots, trace.converged_value());
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    for line in String::from_utf8_lossy(&csv).lines().take(4) {
        println!("  {line}");
    }

    let ensemble = simulate_ensemble(&net, 2000, &params, 42);
    let s = &ensemble.summary;
    let pi = stationary_distribution(&build_mean_matrices(&net))?.pi;
    let expected: f64 = pi.iter().zip(&net.w0).map(|(p, w)| p * w).sum();
    let mean = s.mean.unwrap_or(f64::NAN);
    let se = s.std_error.unwrap_or(f64::NAN);
    println!("ensemble: {}/{} converged, mean {mean:.5} +/- {se:.5}", s.converged, s.replicas);
    println!("pi . w0 = {expected:.5} ({:.2} standard errors away)", (mean - expected).abs() / se);
    println!("plain average of w0 = {:.5}", net.w0.iter().sum::<f64>() / net.n as f64);
    Ok(())
}

#[allow(dead_code)]
fn main() -> wgossip::Result<()> {
    run_example()
}
