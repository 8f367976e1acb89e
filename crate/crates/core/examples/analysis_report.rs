//! The full analysis report, as produced by `wgossip analyze`, built
//! through the library API.
//!
//! ```bash
//! cargo run --example analysis_report
//! ```

use wgossip::fixtures;
use wgossip::report::{analyze, report_json, Command, RunConfig};

pub fn run_example() -> wgossip::Result<()> {
    let net = fixtures::net_b();
    let mut config = RunConfig::new(Command::Analyze, "net_b.json");
    config.replicas = 500;
    let analysis = analyze(&net, &config);
    println!("{}", report_json(&analysis, &config));
    Ok(())
}

#[allow(dead_code)]
fn main() -> wgossip::Result<()> {
    run_example()
}
