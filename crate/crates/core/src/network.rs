//! Acquaintance networks: the meeting probabilities, interaction-type
//! probabilities and initial willingness that drive every other module.
//!
//! Node ids are 0-based everywhere, including in the JSON file format.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for row sums of `p` and for `x + y + z = 1`.
pub const PROBABILITY_TOL: f64 = 1e-9;

/// A population of `n` users, who meets whom, and how meetings play out.
#[derive(Debug, Clone, PartialEq)]
pub struct AcquaintanceNetwork {
    pub n: usize,
    /// Influence retention of the influenced party, in (0, 1/2].
    pub delta: f64,
    /// `p[(i, j)]`: probability that initiator `i` meets `j`.
    pub p: DMatrix<f64>,
    /// Influence probability: `j` pulls `i` towards its own willingness.
    pub x: DMatrix<f64>,
    /// Regular (mutual averaging) probability.
    pub y: DMatrix<f64>,
    /// Persistent (no change) probability.
    pub z: DMatrix<f64>,
    pub w0: Vec<f64>,
}

/// One record of the `edges` array in the network file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    from: usize,
    to: usize,
    p: f64,
    x: f64,
    y: f64,
    z: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    n: usize,
    delta: f64,
    w0: Vec<f64>,
    edges: Vec<EdgeRecord>,
}

/// Per-edge interaction probabilities, used when assembling networks in code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Interaction {
    pub const REGULAR: Interaction = Interaction { x: 0.0, y: 1.0, z: 0.0 };
    pub const INFLUENCE: Interaction = Interaction { x: 1.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

impl AcquaintanceNetwork {
    /// An edgeless network; add meetings with [`set_edge`](Self::set_edge).
    pub fn empty(n: usize, delta: f64, w0: Vec<f64>) -> Self {
        Self {
            n,
            delta,
            p: DMatrix::zeros(n, n),
            x: DMatrix::zeros(n, n),
            y: DMatrix::zeros(n, n),
            z: DMatrix::zeros(n, n),
            w0,
        }
    }

    pub fn set_edge(&mut self, from: usize, to: usize, p: f64, kind: Interaction) {
        self.p[(from, to)] = p;
        self.x[(from, to)] = kind.x;
        self.y[(from, to)] = kind.y;
        self.z[(from, to)] = kind.z;
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.p[(i, j)] > 0.0
    }

    /// Ordered pairs `(i, j)` with `p[i][j] > 0`, row-major.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.p[(i, j)] > 0.0).map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// Total influence mass `Σ p_ij x_ij`.
    pub fn influence_mass(&self) -> f64 {
        self.edges().map(|(i, j)| self.p[(i, j)] * self.x[(i, j)]).sum()
    }

    /// Ordered pairs that carry influence (`p > 0` and `x > 0`).
    pub fn influential_edges(&self) -> Vec<(usize, usize)> {
        self.edges().filter(|&(i, j)| self.x[(i, j)] > 0.0).collect()
    }

    /// Copy with every row of `p` rescaled to sum exactly to 1.
    pub fn normalized_rows(&self) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let s: f64 = out.p.row(i).sum();
            if s > 0.0 {
                for j in 0..self.n {
                    out.p[(i, j)] /= s;
                }
            }
        }
        out
    }

    /// Relabel nodes: node `i` of `self` becomes node `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self::empty(self.n, self.delta, vec![0.0; self.n]);
        for i in 0..self.n {
            out.w0[perm[i]] = self.w0[i];
            for j in 0..self.n {
                let (a, b) = (perm[i], perm[j]);
                out.p[(a, b)] = self.p[(i, j)];
                out.x[(a, b)] = self.x[(i, j)];
                out.y[(a, b)] = self.y[(i, j)];
                out.z[(a, b)] = self.z[(i, j)];
            }
        }
        out
    }

    fn out_neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.p[(i, j)] > 0.0)
    }

    fn in_neighbors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.p[(i, j)] > 0.0)
    }

    /// Undirected support: `i ~ j` iff either direction has `p > 0`.
    pub fn undirected_adjacency(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| j != i && (self.p[(i, j)] > 0.0 || self.p[(j, i)] > 0.0))
                    .collect()
            })
            .collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        let fwd = bfs_hops(self.n, 0, |v| self.out_neighbors(v).collect());
        let bwd = bfs_hops(self.n, 0, |v| self.in_neighbors(v).collect());
        fwd.iter().all(Option::is_some) && bwd.iter().all(Option::is_some)
    }
}

/// Hop distances from `src`; `None` for unreachable nodes.
fn bfs_hops<F>(n: usize, src: usize, neighbors: F) -> Vec<Option<usize>>
where
    F: Fn(usize) -> Vec<usize>,
{
    let mut dist = vec![None; n];
    dist[src] = Some(0);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].unwrap_or(0);
        for u in neighbors(v) {
            if dist[u].is_none() {
                dist[u] = Some(dv + 1);
                queue.push_back(u);
            }
        }
    }
    dist
}

/// Parse the JSON network format. Structural problems (bad JSON, missing
/// keys, out-of-range or duplicate node indices) are errors; modelling
/// assumptions are left to [`validate_network`].
pub fn parse_network(text: &str) -> Result<AcquaintanceNetwork> {
    let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.w0.len() != file.n {
        return Err(Error::Parse(format!(
            "w0: expected {} entries, found {}",
            file.n,
            file.w0.len()
        )));
    }
    let mut net = AcquaintanceNetwork::empty(file.n, file.delta, file.w0);
    let mut seen = BTreeSet::new();
    for (idx, e) in file.edges.iter().enumerate() {
        if e.from >= file.n || e.to >= file.n {
            return Err(Error::Parse(format!(
                "edges[{idx}]: node index out of range ({} -> {}, n = {})",
                e.from, e.to, file.n
            )));
        }
        if !seen.insert((e.from, e.to)) {
            return Err(Error::Parse(format!(
                "edges[{idx}]: duplicate edge ({}, {})",
                e.from, e.to
            )));
        }
        net.set_edge(e.from, e.to, e.p, Interaction::new(e.x, e.y, e.z));
    }
    Ok(net)
}

/// Serialize to the JSON network format. Only pairs with nonzero `p` or
/// nonzero interaction probabilities are written.
pub fn serialize_network(net: &AcquaintanceNetwork) -> String {
    let mut edges = Vec::new();
    for i in 0..net.n {
        for j in 0..net.n {
            let rec = EdgeRecord {
                from: i,
                to: j,
                p: net.p[(i, j)],
                x: net.x[(i, j)],
                y: net.y[(i, j)],
                z: net.z[(i, j)],
            };
            if rec.p != 0.0 || rec.x != 0.0 || rec.y != 0.0 || rec.z != 0.0 {
                edges.push(rec);
            }
        }
    }
    let file = NetworkFile {
        n: net.n,
        delta: net.delta,
        w0: net.w0.clone(),
        edges,
    };
    serde_json::to_string_pretty(&file).expect("network file serializes")
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    EmptyNetwork,
    DeltaOutOfRange(f64),
    ProbabilityOutOfRange { matrix: &'static str, i: usize, j: usize, value: f64 },
    SelfMeeting { node: usize, p: f64 },
    RowSum { node: usize, sum: f64 },
    InteractionSum { i: usize, j: usize, sum: f64 },
    PersistentOnly { i: usize, j: usize },
    NotStronglyConnected,
    WillingnessOutOfRange { node: usize, value: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyNetwork => write!(f, "network has no nodes"),
            Violation::DeltaOutOfRange(d) => write!(f, "delta {d} outside (0, 1/2]"),
            Violation::ProbabilityOutOfRange { matrix, i, j, value } => {
                write!(f, "{matrix}[{i}][{j}] = {value} outside [0, 1]")
            }
            Violation::SelfMeeting { node, p } => {
                write!(f, "self-meeting probability nonzero at node {node} (p = {p})")
            }
            Violation::RowSum { node, sum } => {
                write!(f, "meeting probabilities of node {node} sum to {sum}, expected 1")
            }
            Violation::InteractionSum { i, j, sum } => {
                write!(f, "x + y + z on edge ({i}, {j}) sums to {sum}, expected 1")
            }
            Violation::PersistentOnly { i, j } => {
                write!(f, "persistent-only edge ({i}, {j}): x + y = 0")
            }
            Violation::NotStronglyConnected => write!(f, "not strongly connected"),
            Violation::WillingnessOutOfRange { node, value } => {
                write!(f, "initial willingness {value} of node {node} outside [0, 1]")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            Ok(())
        } else {
            let msgs: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
            Err(Error::InvalidArgument(format!("invalid network: {}", msgs.join("; "))))
        }
    }
}

/// Check every modelling assumption; violations are returned as data.
pub fn validate_network(net: &AcquaintanceNetwork) -> ValidationReport {
    let mut v = Vec::new();
    let n = net.n;
    if n == 0 {
        v.push(Violation::EmptyNetwork);
        return ValidationReport { violations: v };
    }
    if !(net.delta > 0.0 && net.delta <= 0.5) {
        v.push(Violation::DeltaOutOfRange(net.delta));
    }
    for i in 0..n {
        for j in 0..n {
            for (name, m) in [("p", &net.p), ("x", &net.x), ("y", &net.y), ("z", &net.z)] {
                let value = m[(i, j)];
                if !(0.0..=1.0).contains(&value) {
                    v.push(Violation::ProbabilityOutOfRange { matrix: name, i, j, value });
                }
            }
        }
    }
    for i in 0..n {
        if net.p[(i, i)] != 0.0 {
            v.push(Violation::SelfMeeting { node: i, p: net.p[(i, i)] });
        }
        let sum: f64 = net.p.row(i).sum();
        if (sum - 1.0).abs() > PROBABILITY_TOL {
            v.push(Violation::RowSum { node: i, sum });
        }
    }
    for (i, j) in net.edges() {
        let (x, y, z) = (net.x[(i, j)], net.y[(i, j)], net.z[(i, j)]);
        let sum = x + y + z;
        if (sum - 1.0).abs() > PROBABILITY_TOL {
            v.push(Violation::InteractionSum { i, j, sum });
        }
        if x + y <= 0.0 {
            v.push(Violation::PersistentOnly { i, j });
        }
    }
    if !net.is_strongly_connected() {
        v.push(Violation::NotStronglyConnected);
    }
    for (node, &value) in net.w0.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            v.push(Violation::WillingnessOutOfRange { node, value });
        }
    }
    ValidationReport { violations: v }
}

/// Largest directed shortest-path hop count over all ordered pairs.
pub fn diameter(net: &AcquaintanceNetwork) -> Result<usize> {
    let mut d = 0;
    for src in 0..net.n {
        let dist = bfs_hops(net.n, src, |v| net.out_neighbors(v).collect());
        for h in dist {
            match h {
                Some(h) => d = d.max(h),
                None => return Err(Error::Graph("not strongly connected".into())),
            }
        }
    }
    if net.n == 0 {
        return Err(Error::Graph("empty network".into()));
    }
    Ok(d)
}

/// The two components left after deleting a bridge `{i, j}` from the
/// undirected support graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgePartition {
    pub removed_edge: (usize, usize),
    /// Nodes on `i`'s side, sorted.
    pub side_i: Vec<usize>,
    /// Nodes on `j`'s side, sorted.
    pub side_j: Vec<usize>,
}

/// Split the network at edge `(i, j)`. Returns `Ok(None)` when the edge is
/// not a bridge of the undirected support graph.
pub fn edge_partition(net: &AcquaintanceNetwork, i: usize, j: usize) -> Result<Option<EdgePartition>> {
    if !net.has_edge(i, j) {
        return Err(Error::Graph(format!("({i}, {j}) is not an edge")));
    }
    let adj = net.undirected_adjacency();
    let dist = bfs_hops(net.n, i, |v| {
        adj[v]
            .iter()
            .copied()
            .filter(|&u| !((v == i && u == j) || (v == j && u == i)))
            .collect()
    });
    if dist[j].is_some() {
        return Ok(None);
    }
    let (side_i, side_j): (Vec<usize>, Vec<usize>) = (0..net.n).partition(|&k| dist[k].is_some());
    // Both sides must be connected for the removal to leave exactly two parts.
    let reach_j = bfs_hops(net.n, j, |v| {
        adj[v]
            .iter()
            .copied()
            .filter(|&u| !((v == i && u == j) || (v == j && u == i)))
            .collect()
    });
    if side_j.iter().any(|&k| reach_j[k].is_none()) {
        return Err(Error::Graph("undirected support graph is not connected".into()));
    }
    Ok(Some(EdgePartition {
        removed_edge: (i, j),
        side_i,
        side_j,
    }))
}
