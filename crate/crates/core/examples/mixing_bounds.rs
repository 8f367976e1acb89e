//! Spectral gap, conductance and the deviation bounds for a clustered and a
//! well-mixed network; the clustered one is classified slow-mixing.
//!
//! ```bash
//! cargo run --example mixing_bounds
//! ```

use wgossip::fixtures;
use wgossip::mean_field::{build_mean_matrices, stationary_distribution};
use wgossip::spectral::{spectral_report, ConductanceMode, DEFAULT_MIXING_THRESHOLD};

pub fn run_example() -> wgossip::Result<()> {
    let clique = {
        let mut net = fixtures::complete(6);
        net.x[(0, 1)] = 0.9;
        net.y[(0, 1)] = 0.1;
        net
    };
    for (name, net) in [("barbell", fixtures::barbell(3, 3, Some(0.9))), ("clique", clique)] {
        let mm = build_mean_matrices(&net);
        let pi = stationary_distribution(&mm)?.pi;
        let r = spectral_report(&net, &mm.k, &pi, ConductanceMode::Exact, DEFAULT_MIXING_THRESHOLD)?;
        let dev = pi.iter().map(|p| (p - 1.0 / net.n as f64).abs()).fold(0.0, f64::max);
        println!("{name}: lambda2 {:.4}, gap {:.4}, conductance {:.4}, class {:?}", r.lambda2, r.gap, r.conductance.unwrap_or(f64::NAN), r.mixing_class);
        println!("  performance P = {:.5} (gamma {:.3})", r.performance, r.gamma);
        println!("  |pi - e/n|_inf = {dev:.5} <= {:?}", r.bound_linf);
        println!("  l2 bound {:?}, expectation bound {:?}", r.bound_l2, r.bound_expectation);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> wgossip::Result<()> {
    run_example()
}
