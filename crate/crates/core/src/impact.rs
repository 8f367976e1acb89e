//! Per-user impact `pi_k - 1/n` on the expected consensus, three ways:
//! directly from the stationary distribution, through mean first passage
//! times of the social chain, and (for a single influential bridge) in
//! closed form. Also an upper bound from the conductance of `K`, and the
//! client ranking built on top.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mean_field::PassageData;
use crate::network::{edge_partition, AcquaintanceNetwork, EdgePartition};

/// Discrepancies between the closed form for a single bridge and the exact
/// impacts above this level are flagged in reports.
pub const BRIDGE_FORMULA_TOL: f64 = 1e-6;

pub fn impact_exact(pi: &[f64]) -> Vec<f64> {
    let n = pi.len() as f64;
    pi.iter().map(|p| p - 1.0 / n).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaCheck {
    pub values: Vec<f64>,
    /// `|value - exact|` per node.
    pub residuals: Vec<f64>,
}

impl FormulaCheck {
    fn against(values: Vec<f64>, exact: &[f64]) -> Self {
        let residuals = values.iter().zip(exact).map(|(v, e)| (v - e).abs()).collect();
        Self { values, residuals }
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Impact through passage times of `K`:
///
/// `pi_k - 1/n = 1/(2n^2) sum_{i,j} p_ij x_ij ((1 - 2 delta) pi_i + pi_j)(m_ik - m_jk)`
pub fn impact_passage_times(net: &AcquaintanceNetwork, pi: &[f64], passage: &PassageData) -> FormulaCheck {
    let n = net.n;
    let scale = 1.0 / (2.0 * (n * n) as f64);
    let m = &passage.m;
    let influential = net.influential_edges();
    let values = (0..n)
        .map(|k| {
            influential
                .iter()
                .map(|&(i, j)| {
                    let weight = net.p[(i, j)] * net.x[(i, j)];
                    let coeff = (1.0 - 2.0 * net.delta) * pi[i] + pi[j];
                    weight * coeff * (m[(i, k)] - m[(j, k)])
                })
                .sum::<f64>()
                * scale
        })
        .collect();
    FormulaCheck::against(values, &impact_exact(pi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BridgeImpact {
    /// The influential ordered pair `(i, j)`: `j` influences `i`.
    pub edge: (usize, usize),
    pub mu: f64,
    pub partition: EdgePartition,
    /// `Omega_ij(k)` per node.
    pub omega: Vec<f64>,
    pub check: FormulaCheck,
}

/// The single influential edge of `net` if it is a bridge.
pub fn single_influential_bridge(net: &AcquaintanceNetwork) -> Result<EdgePartition> {
    let edges = net.influential_edges();
    let &[(i, j)] = edges.as_slice() else {
        return Err(Error::Inapplicable(format!(
            "bridge closed form needs exactly one influential edge, found {}",
            edges.len()
        )));
    };
    edge_partition(net, i, j)?
        .ok_or_else(|| Error::Inapplicable(format!("influential edge ({i}, {j}) is not a bridge")))
}

/// Closed form for a network whose only influential edge `(i, j)` is a
/// bridge with sides `N(i,j)` (holding `i`) and `N(j,i)`:
///
/// `pi_k - 1/n = (2/n^2) mu (1-delta) / (1 - (mu/n)((1+2delta)|N(i,j)| - |N(j,i)|)) * Omega(k)`
///
/// with `mu = p_ij x_ij / (p_ij(1-z_ij) + p_ji(1-z_ji))`, `Omega(k) = |N(i,j)|`
/// on `j`'s side and `-|N(j,i)|` on `i`'s side. Residuals against the
/// exact impacts are returned alongside.
pub fn impact_bridge(net: &AcquaintanceNetwork, pi: &[f64]) -> Result<BridgeImpact> {
    let partition = single_influential_bridge(net)?;
    let (i, j) = partition.removed_edge;
    let n = net.n as f64;
    let delta = net.delta;
    let mu = net.p[(i, j)] * net.x[(i, j)]
        / (net.p[(i, j)] * (1.0 - net.z[(i, j)]) + net.p[(j, i)] * (1.0 - net.z[(j, i)]));
    let size_i = partition.side_i.len() as f64;
    let size_j = partition.side_j.len() as f64;
    let denom = 1.0 - mu / n * ((1.0 + 2.0 * delta) * size_i - size_j);
    let factor = 2.0 / (n * n) * mu * (1.0 - delta) / denom;
    let mut omega = vec![0.0; net.n];
    for &k in &partition.side_j {
        omega[k] = size_i;
    }
    for &k in &partition.side_i {
        omega[k] = -size_j;
    }
    let values = omega.iter().map(|o| factor * o).collect();
    Ok(BridgeImpact {
        edge: (i, j),
        mu,
        partition,
        omega,
        check: FormulaCheck::against(values, &impact_exact(pi)),
    })
}

/// Uniform bound `sum_{i,j} (2 p_ij x_ij / n) (1 + ln n) / psi` on every `|pi_k - 1/n|`.
pub fn impact_conductance_bound(net: &AcquaintanceNetwork, psi: Option<f64>) -> Option<f64> {
    let psi = psi?;
    let n = net.n as f64;
    Some(2.0 * net.influence_mass() / n * (1.0 + n.ln()) / psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Incentivize,
    Review,
    Standard,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Incentivize => "incentivize",
            Tier::Review => "review",
            Tier::Standard => "standard",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankedClient {
    pub node: usize,
    /// 1 = largest positive impact.
    pub rank: usize,
    pub impact: f64,
    /// `impact / max |impact|`, 0 when every impact is 0.
    pub score: f64,
    pub tier: Tier,
}

/// Impacts closer than this are treated as ties when assigning tiers.
const TIE_TOL: f64 = 1e-12;

/// Sort clients by impact, descending, ties by node id. With `q = ceil(n/4)`,
/// clients whose impact is positive and at least the `q`-th largest are
/// `incentivize`; clients whose impact is negative and at most the `q`-th
/// smallest are `standard`; everyone else is `review`. Tiers depend only on
/// impact values, so tied clients always share a tier.
pub fn rank_clients(impacts: &[f64]) -> Vec<RankedClient> {
    let n = impacts.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| impacts[b].total_cmp(&impacts[a]).then(a.cmp(&b)));
    let max_abs = impacts.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let q = n.div_ceil(4).max(1);
    let top = order.get(q - 1).map(|&k| impacts[k]).unwrap_or(0.0);
    let bottom = order.get(n.saturating_sub(q)).map(|&k| impacts[k]).unwrap_or(0.0);
    order
        .iter()
        .enumerate()
        .map(|(pos, &node)| {
            let v = impacts[node];
            let tier = if v > TIE_TOL && v >= top - TIE_TOL {
                Tier::Incentivize
            } else if v < -TIE_TOL && v <= bottom + TIE_TOL {
                Tier::Standard
            } else {
                Tier::Review
            };
            RankedClient {
                node,
                rank: pos + 1,
                impact: v,
                score: if max_abs > 0.0 { v / max_abs } else { 0.0 },
                tier,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeImpact {
    pub node: usize,
    pub exact: f64,
    pub passage_time: f64,
    pub passage_time_residual: f64,
    pub bridge: Option<f64>,
    pub conductance_bound: Option<f64>,
    pub rank: usize,
    pub tier: Tier,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImpactReport {
    pub nodes: Vec<NodeImpact>,
    pub passage_time_max_residual: f64,
    pub conductance_bound: Option<f64>,
    /// Closed-form bridge evaluation, or why it does not apply.
    pub bridge: std::result::Result<BridgeImpact, String>,
    pub ranking: Vec<RankedClient>,
}

impl ImpactReport {
    pub fn exact(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.exact).collect()
    }

    /// CSV with columns `node, exact, thm5, thm5_residual, thm6, thm7_bound, rank, tier`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        writeln!(out, "node,exact,thm5,thm5_residual,thm6,thm7_bound,rank,tier")?;
        for r in &self.nodes {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.node,
                r.exact,
                r.passage_time,
                r.passage_time_residual,
                opt(r.bridge),
                opt(r.conductance_bound),
                r.rank,
                r.tier.as_str()
            )?;
        }
        Ok(())
    }
}

pub fn impact_report(net: &AcquaintanceNetwork, pi: &[f64], passage: &PassageData, psi: Option<f64>) -> ImpactReport {
    let exact = impact_exact(pi);
    let thm5 = impact_passage_times(net, pi, passage);
    let bridge = impact_bridge(net, pi).map_err(|e| e.to_string());
    let bound = impact_conductance_bound(net, psi);
    let ranking = rank_clients(&exact);
    let mut nodes: Vec<NodeImpact> = (0..net.n)
        .map(|k| NodeImpact {
            node: k,
            exact: exact[k],
            passage_time: thm5.values[k],
            passage_time_residual: thm5.residuals[k],
            bridge: bridge.as_ref().ok().map(|b| b.check.values[k]),
            conductance_bound: bound,
            rank: 0,
            tier: Tier::Review,
        })
        .collect();
    for r in &ranking {
        nodes[r.node].rank = r.rank;
        nodes[r.node].tier = r.tier;
    }
    ImpactReport {
        nodes,
        passage_time_max_residual: thm5.max_residual(),
        conductance_bound: bound,
        bridge,
        ranking,
    }
}
