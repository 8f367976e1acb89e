#[path = "../examples/network_checks.rs"]
mod network_checks;
#[path = "../examples/simulate_consensus.rs"]
mod simulate_consensus;
#[path = "../examples/stationary_routes.rs"]
mod stationary_routes;
#[path = "../examples/mixing_bounds.rs"]
mod mixing_bounds;
#[path = "../examples/rank_clients.rs"]
mod rank_clients;
#[path = "../examples/analysis_report.rs"]
mod analysis_report;

#[test]
fn examples_run() {
    network_checks::run_example().expect("network_checks");
    simulate_consensus::run_example().expect("simulate_consensus");
    stationary_routes::run_example().expect("stationary_routes");
    mixing_bounds::run_example().expect("mixing_bounds");
    rank_clients::run_example().expect("rank_clients");
    analysis_report::run_example().expect("analysis_report");
}
