//! The analyst workflow behind the `wgossip` binary: validate a network
//! file, simulate ensembles, or produce the full JSON analysis report.
//!
//! Reports are deterministic: keys are sorted and every float is rounded to
//! 12 significant digits before serialization.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gossip::{run_replica, simulate_ensemble, EnsembleSummary, SimParams};
use crate::impact::{impact_report, ImpactReport, Tier, BRIDGE_FORMULA_TOL};
use crate::mean_field::{build_mean_matrices, passage_data, stationary_distribution, stationary_perturbation};
use crate::network::{parse_network, validate_network, AcquaintanceNetwork};
use crate::spectral::{spectral_report, ConductanceMode, MixingClass, SpectralReport, DEFAULT_MIXING_THRESHOLD};

pub const REPORT_VERSION: &str = "wgossip-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Validate,
    Simulate,
    Analyze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub network: PathBuf,
    pub replicas: usize,
    pub max_slots: u64,
    pub tol: f64,
    pub seed: u64,
    pub mixing_threshold: f64,
    pub conductance: ConductanceMode,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    /// Rescale rows of `p` to sum to 1 before validation.
    pub normalize: bool,
}

impl RunConfig {
    pub fn new(command: Command, network: impl Into<PathBuf>) -> Self {
        Self {
            command,
            network: network.into(),
            replicas: 1000,
            max_slots: 1_000_000,
            tol: 1e-6,
            seed: 0,
            mixing_threshold: DEFAULT_MIXING_THRESHOLD,
            conductance: ConductanceMode::Exact,
            format: OutputFormat::Json,
            out: None,
            trace: None,
            normalize: false,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.command != Command::Analyze && self.replicas < 1 {
            return Err(Error::InvalidArgument("replicas must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if !(self.mixing_threshold > 0.0 && self.mixing_threshold < 2.0) {
            return Err(Error::InvalidArgument("mixing threshold must lie in (0, 2)".into()));
        }
        Ok(())
    }

    fn sim_params(&self) -> SimParams {
        SimParams { max_slots: self.max_slots, tol: self.tol, record_every: 0 }
    }
}

/// Round to 12 significant digits; non-finite values become `null`.
fn round12(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map(Value::Number).unwrap_or(Value::Null)
}

fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => round12(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Deterministic JSON text: sorted keys, 12-significant-digit floats.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report values serialize");
    let mut s = serde_json::to_string_pretty(&canonicalize(v)).expect("json serializes");
    s.push('\n');
    s
}

fn failed(e: &Error) -> Value {
    json!({ "status": "failed", "error": e.to_string() })
}

fn load(config: &RunConfig) -> Result<AcquaintanceNetwork> {
    let text = fs::read_to_string(&config.network)?;
    let net = parse_network(&text)?;
    Ok(if config.normalize { net.normalized_rows() } else { net })
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Load and validate. On failure returns the exit code to use.
fn load_valid(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> std::result::Result<AcquaintanceNetwork, i32> {
    if let Err(e) = config.check() {
        let _ = writeln!(err, "error: {e}");
        return Err(EXIT_IO);
    }
    let net = match load(config) {
        Ok(net) => net,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", config.network.display());
            return Err(EXIT_IO);
        }
    };
    let report = validate_network(&net);
    if !report.is_ok() {
        for v in &report.violations {
            let _ = writeln!(out, "violation: {v}");
        }
        return Err(EXIT_INVALID);
    }
    Ok(net)
}

pub fn cmd_validate(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match load_valid(config, out, err) {
        Ok(net) => {
            let _ = writeln!(out, "ok: {} nodes, {} edges", net.n, net.edge_count());
            EXIT_OK
        }
        Err(code) => code,
    }
}

pub fn cmd_simulate(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let net = match load_valid(config, out, err) {
        Ok(net) => net,
        Err(code) => return code,
    };
    let params = config.sim_params();
    let ensemble = simulate_ensemble(&net, config.replicas, &params, config.seed);
    let s = &ensemble.summary;
    let _ = writeln!(
        out,
        "mean converged willingness: {}\nstandard error: {}\nconverged: {}/{} ({:.2}%)",
        s.mean.map(|m| format!("{m:.12}")).unwrap_or_else(|| "n/a".into()),
        s.std_error.map(|m| format!("{m:.3e}")).unwrap_or_else(|| "n/a".into()),
        s.converged,
        s.replicas,
        100.0 * s.convergence_rate
    );

    if let Some(path) = &config.trace {
        let trace = run_replica(&net, &params, config.seed);
        let written = fs::File::create(path).and_then(|f| trace.write_csv(std::io::BufWriter::new(f)));
        if let Err(e) = written {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_IO;
        }
    }
    if let Some(path) = &config.out {
        let text = match config.format {
            OutputFormat::Json => to_canonical_json(&json!({ "config": config, "simulation": s, "version": REPORT_VERSION })),
            OutputFormat::Csv => {
                let mut t = String::from("replica,converged,slots,value\n");
                for (k, o) in ensemble.outcomes.iter().enumerate() {
                    t.push_str(&format!("{k},{},{},{}\n", o.converged, o.slots, o.value));
                }
                t
            }
        };
        if let Err(e) = fs::write(path, text) {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_IO;
        }
    }
    if s.converged == 0 {
        EXIT_NO_CONVERGENCE
    } else {
        EXIT_OK
    }
}

/// Everything `analyze` computes, section by section.
#[derive(Debug)]
pub struct Analysis {
    pub network: Value,
    pub stationary: Result<StationarySection>,
    pub spectral: Result<SpectralReport>,
    pub impact: Result<ImpactReport>,
    pub simulation: Option<SimulationSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarySection {
    pub pi: Vec<f64>,
    pub method: &'static str,
    /// Perturbation-identity distribution, when that route succeeded.
    pub perturbation_pi: Option<Vec<f64>>,
    /// `max |pi_direct - pi_perturbation|`.
    pub cross_check_residual: Option<f64>,
    pub perturbation_error: Option<String>,
    pub expected_consensus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationSection {
    #[serde(flatten)]
    pub summary: EnsembleSummary,
    pub expected_consensus: Option<f64>,
    /// `|ensemble mean - pi . w0|` in units of the standard error.
    pub deviation_std_errors: Option<f64>,
}

impl Analysis {
    pub fn has_failures(&self) -> bool {
        self.stationary.is_err() || self.spectral.is_err() || self.impact.is_err()
    }
}

pub fn analyze(net: &AcquaintanceNetwork, config: &RunConfig) -> Analysis {
    let mm = build_mean_matrices(net);
    let network = json!({
        "n": net.n,
        "edges": net.edge_count(),
        "influence_mass": net.influence_mass(),
        "delta": net.delta,
    });

    let stationary = stationary_distribution(&mm).map(|direct| {
        let pert = stationary_perturbation(&mm);
        let expected_consensus = direct.pi.iter().zip(&net.w0).map(|(p, w)| p * w).sum();
        let (perturbation_pi, cross_check_residual, perturbation_error) = match pert {
            Ok(p) => {
                let r = direct.pi.iter().zip(&p.pi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                (Some(p.pi), Some(r), None)
            }
            Err(e) => (None, None, Some(e.to_string())),
        };
        StationarySection {
            pi: direct.pi,
            method: "eigen",
            perturbation_pi,
            cross_check_residual,
            perturbation_error,
            expected_consensus,
        }
    });

    let pi = stationary.as_ref().map(|s| s.pi.clone()).map_err(|e| Error::Numerical(e.to_string()));
    let spectral = pi
        .as_ref()
        .map_err(|e| Error::Numerical(format!("stationary distribution unavailable: {e}")))
        .and_then(|pi| spectral_report(net, &mm.k, pi, config.conductance, config.mixing_threshold));
    let impact = pi
        .as_ref()
        .map_err(|e| Error::Numerical(format!("stationary distribution unavailable: {e}")))
        .and_then(|pi| {
            let pd = passage_data(&mm.k)?;
            let psi = spectral.as_ref().ok().and_then(|s| s.conductance);
            Ok(impact_report(net, pi, &pd, psi))
        });

    let simulation = (config.replicas > 0).then(|| {
        let ensemble = simulate_ensemble(net, config.replicas, &config.sim_params(), config.seed);
        let expected = stationary.as_ref().ok().map(|s| s.expected_consensus);
        let deviation = match (ensemble.summary.mean, ensemble.summary.std_error, expected) {
            (Some(m), Some(se), Some(e)) if se > 0.0 => Some((m - e).abs() / se),
            (Some(m), Some(_), Some(e)) if (m - e).abs() < 1e-12 => Some(0.0),
            _ => None,
        };
        SimulationSection { summary: ensemble.summary, expected_consensus: expected, deviation_std_errors: deviation }
    });

    Analysis { network, stationary, spectral, impact, simulation }
}

fn impact_value(r: &ImpactReport) -> Value {
    let bridge = match &r.bridge {
        Ok(b) => {
            let max = b.check.max_residual();
            json!({
                "edge": [b.edge.0, b.edge.1],
                "mu": b.mu,
                "side_i": b.partition.side_i,
                "side_j": b.partition.side_j,
                "omega": b.omega,
                "values": b.check.values,
                "residuals": b.check.residuals,
                "max_residual": max,
                "mismatch": max > BRIDGE_FORMULA_TOL,
            })
        }
        Err(reason) => json!({ "inapplicable": reason }),
    };
    json!({
        "nodes": r.nodes,
        "passage_time_max_residual": r.passage_time_max_residual,
        "conductance_bound": r.conductance_bound,
        "bridge": bridge,
        "ranking": r.ranking,
    })
}

fn verdicts(spectral: &SpectralReport, impact: Option<&ImpactReport>) -> Value {
    let note = match spectral.mixing_class {
        MixingClass::Slow => format!(
            "slow-mixing social structure (spectral gap {:.4} < {}): influential users keep a lasting pull on the consensus; preferred target for insurance",
            spectral.gap, spectral.mixing_threshold
        ),
        MixingClass::Fast => format!(
            "fast-mixing social structure (spectral gap {:.4} >= {}): influence washes out towards the initial average; use a separate contract class",
            spectral.gap, spectral.mixing_threshold
        ),
    };
    let top: Vec<usize> = impact
        .map(|r| r.ranking.iter().filter(|c| c.tier == Tier::Incentivize).map(|c| c.node).collect())
        .unwrap_or_default();
    json!({
        "mixing_class": spectral.mixing_class,
        "insurability": note,
        "deviation_bound_l2": spectral.bound_l2.value(),
        "incentive_clients": top,
    })
}

/// The full report document for an analysis.
pub fn report_json(analysis: &Analysis, config: &RunConfig) -> String {
    let mut doc = Map::new();
    doc.insert("version".into(), json!(REPORT_VERSION));
    doc.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    doc.insert("network".into(), analysis.network.clone());
    doc.insert(
        "stationary".into(),
        match &analysis.stationary {
            Ok(s) => serde_json::to_value(s).expect("stationary serializes"),
            Err(e) => failed(e),
        },
    );
    doc.insert(
        "spectral".into(),
        match &analysis.spectral {
            Ok(s) => serde_json::to_value(s).expect("spectral serializes"),
            Err(e) => failed(e),
        },
    );
    doc.insert(
        "impact".into(),
        match &analysis.impact {
            Ok(r) => impact_value(r),
            Err(e) => failed(e),
        },
    );
    doc.insert(
        "simulation".into(),
        match &analysis.simulation {
            Some(s) => serde_json::to_value(s).expect("simulation serializes"),
            None => json!({ "skipped": true }),
        },
    );
    doc.insert(
        "verdicts".into(),
        match &analysis.spectral {
            Ok(s) => verdicts(s, analysis.impact.as_ref().ok()),
            Err(e) => failed(e),
        },
    );
    to_canonical_json(&Value::Object(doc))
}

pub fn cmd_analyze(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let net = match load_valid(config, out, err) {
        Ok(net) => net,
        Err(code) => return code,
    };
    let analysis = analyze(&net, config);
    let text = match config.format {
        OutputFormat::Json => report_json(&analysis, config),
        OutputFormat::Csv => match &analysis.impact {
            Ok(r) => {
                let mut buf = Vec::new();
                r.write_csv(&mut buf).expect("writing to memory");
                String::from_utf8(buf).expect("csv is utf-8")
            }
            Err(e) => {
                let _ = writeln!(err, "error: impact analysis failed: {e}");
                return EXIT_PARTIAL;
            }
        },
    };
    if let Err(e) = write_output(config.out.as_deref(), &text, out) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_IO;
    }
    if analysis.has_failures() {
        for (name, e) in [
            ("stationary", analysis.stationary.as_ref().err()),
            ("spectral", analysis.spectral.as_ref().err()),
            ("impact", analysis.impact.as_ref().err()),
        ] {
            if let Some(e) = e {
                let _ = writeln!(err, "section {name} failed: {e}");
            }
        }
        EXIT_PARTIAL
    } else {
        EXIT_OK
    }
}

pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match config.command {
        Command::Validate => cmd_validate(config, out, err),
        Command::Simulate => cmd_simulate(config, out, err),
        Command::Analyze => cmd_analyze(config, out, err),
    }
}
