//! Parse a network document, check the modelling assumptions, and look at
//! its diameter and bridges.
//!
//! ```bash
//! cargo run --example network_checks
//! ```

use wgossip::network::{diameter, edge_partition, parse_network, validate_network};

const DOC: &str = r#"{
  "n": 5, "delta": 0.3, "w0": [1.0, 0.2, 0.0, 0.4, 0.9],
  "edges": [
    {"from": 0, "to": 1, "p": 1.0, "x": 0.0, "y": 1.0, "z": 0.0},
    {"from": 1, "to": 0, "p": 0.5, "x": 0.5, "y": 0.5, "z": 0.0},
    {"from": 1, "to": 2, "p": 0.5, "x": 0.0, "y": 0.8, "z": 0.2},
    {"from": 2, "to": 1, "p": 0.5, "x": 0.0, "y": 1.0, "z": 0.0},
    {"from": 2, "to": 3, "p": 0.5, "x": 0.0, "y": 1.0, "z": 0.0},
    {"from": 3, "to": 2, "p": 0.5, "x": 0.0, "y": 1.0, "z": 0.0},
    {"from": 3, "to": 4, "p": 0.5, "x": 0.0, "y": 1.0, "z": 0.0},
    {"from": 4, "to": 2, "p": 1.0, "x": 0.3, "y": 0.7, "z": 0.0}
  ]
}"#;

pub fn run_example() -> wgossip::Result<()> {
    let net = parse_network(DOC)?;
    let report = validate_network(&net);
    println!("valid: {}", report.is_ok());
    for v in &report.violations {
        println!("  {v}");
    }
    println!("diameter: {}", diameter(&net)?);
    println!("influence mass: {:.3}", net.influence_mass());
    for (i, j) in net.edges() {
        if let Some(part) = edge_partition(&net, i, j)? {
            println!("bridge ({i}, {j}): {:?} | {:?}", part.side_i, part.side_j);
        }
    }

    let mut broken = net.clone();
    broken.p[(4, 2)] = 0.0;
    for v in validate_network(&broken).violations {
        println!("after dropping 4 -> 2: {v}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> wgossip::Result<()> {
    run_example()
}
