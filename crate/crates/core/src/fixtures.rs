//! Reference networks and random generators used by the tests, the runnable
//! examples and the acceptance suite.

use rand::Rng;

use crate::network::{AcquaintanceNetwork, Interaction};

/// Two nodes that always average: `w0 = (0, 1)`.
pub fn net_a() -> AcquaintanceNetwork {
    let mut net = AcquaintanceNetwork::empty(2, 0.5, vec![0.0, 1.0]);
    net.set_edge(0, 1, 1.0, Interaction::REGULAR);
    net.set_edge(1, 0, 1.0, Interaction::REGULAR);
    net
}

/// Two nodes; node 1 always influences node 0 when node 0 initiates,
/// node 1's own meetings are regular. `delta = 1/2`, `w0 = (0, 1)`.
pub fn net_b() -> AcquaintanceNetwork {
    let mut net = AcquaintanceNetwork::empty(2, 0.5, vec![0.0, 1.0]);
    net.set_edge(0, 1, 1.0, Interaction::INFLUENCE);
    net.set_edge(1, 0, 1.0, Interaction::REGULAR);
    net
}

/// Evenly spaced initial willingness in [0, 1].
pub fn linspace_w0(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5];
    }
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Undirected graph with each node meeting its neighbours uniformly; every
/// ordered edge gets the interaction returned by `kind(from, to)`.
pub fn from_undirected<F>(n: usize, edges: &[(usize, usize)], delta: f64, w0: Vec<f64>, kind: F) -> AcquaintanceNetwork
where
    F: Fn(usize, usize) -> Interaction,
{
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut net = AcquaintanceNetwork::empty(n, delta, w0);
    for (i, nbrs) in adj.iter().enumerate() {
        let p = 1.0 / nbrs.len() as f64;
        for &j in nbrs {
            net.set_edge(i, j, p, kind(i, j));
        }
    }
    net
}

pub fn path(n: usize) -> AcquaintanceNetwork {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    from_undirected(n, &edges, 0.5, linspace_w0(n), |_, _| Interaction::REGULAR)
}

pub fn cycle(n: usize) -> AcquaintanceNetwork {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    from_undirected(n, &edges, 0.5, linspace_w0(n), |_, _| Interaction::REGULAR)
}

pub fn complete(n: usize) -> AcquaintanceNetwork {
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    from_undirected(n, &edges, 0.5, linspace_w0(n), |_, _| Interaction::REGULAR)
}

/// The bridge of [`barbell`]: `(a - 1, a)`, left side first.
pub fn barbell_bridge(a: usize) -> (usize, usize) {
    (a - 1, a)
}

/// Cliques on nodes `0..a` and `a..a+b` joined by the single edge
/// `(a-1, a)`. With `influence = Some(x)` the bridge direction `a-1 -> a`
/// is influential with probability `x` (node `a` pulls node `a-1`); all other
/// meetings are regular.
pub fn barbell(a: usize, b: usize, influence: Option<f64>) -> AcquaintanceNetwork {
    let n = a + b;
    let mut edges = Vec::new();
    for (lo, hi) in [(0, a), (a, n)] {
        for i in lo..hi {
            for j in i + 1..hi {
                edges.push((i, j));
            }
        }
    }
    let bridge = barbell_bridge(a);
    edges.push(bridge);
    from_undirected(n, &edges, 0.5, linspace_w0(n), |i, j| match influence {
        Some(x) if (i, j) == bridge => Interaction::new(x, 1.0 - x, 0.0),
        _ => Interaction::REGULAR,
    })
}

/// Same support and meeting law with all influence turned into regular
/// meetings (`y += x`, `x = 0`).
pub fn without_influence(net: &AcquaintanceNetwork) -> AcquaintanceNetwork {
    let mut out = net.clone();
    for (i, j) in net.edges() {
        out.y[(i, j)] += out.x[(i, j)];
        out.x[(i, j)] = 0.0;
    }
    out
}

fn random_interaction<R: Rng + ?Sized>(rng: &mut R, allow_influence: bool) -> Interaction {
    loop {
        let x = if allow_influence && rng.random_bool(0.6) { rng.random::<f64>() } else { 0.0 };
        let y = if rng.random_bool(0.8) { rng.random::<f64>() } else { 0.0 };
        let z = if rng.random_bool(0.5) { rng.random::<f64>() } else { 0.0 };
        let s = x + y + z;
        if x + y > 1e-3 && s > 0.0 {
            return Interaction::new(x / s, y / s, z / s);
        }
    }
}

/// Fill row `i` of `p` over the listed neighbours with random positive weights.
fn random_rows<R: Rng + ?Sized>(net: &mut AcquaintanceNetwork, out: &[Vec<usize>], rng: &mut R) {
    for (i, nbrs) in out.iter().enumerate() {
        let weights: Vec<f64> = nbrs.iter().map(|_| 0.05 + rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        for (&j, w) in nbrs.iter().zip(weights) {
            net.p[(i, j)] = w / total;
        }
    }
}

/// A random valid network on `n >= 2` nodes: a directed ring (for strong
/// connectivity) plus random extra directed edges, random meeting weights,
/// random interaction mixes on every edge, random `delta` and `w0`.
pub fn random_network<R: Rng + ?Sized>(n: usize, rng: &mut R) -> AcquaintanceNetwork {
    assert!(n >= 2, "random networks need at least two nodes");
    let extra = rng.random_range(0.1..0.6);
    let mut out = vec![Vec::new(); n];
    for (i, nbrs) in out.iter_mut().enumerate() {
        for j in 0..n {
            if j != i && (j == (i + 1) % n || rng.random_bool(extra)) {
                nbrs.push(j);
            }
        }
    }
    let delta = rng.random_range(0.05..=0.5);
    let w0 = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut net = AcquaintanceNetwork::empty(n, delta, w0);
    random_rows(&mut net, &out, rng);
    for i in 0..n {
        for &j in &out[i] {
            let kind = random_interaction(rng, true);
            net.x[(i, j)] = kind.x;
            net.y[(i, j)] = kind.y;
            net.z[(i, j)] = kind.z;
        }
    }
    net
}

/// Random connected undirected graph on `nodes` (spanning tree plus extras).
fn random_connected_edges<R: Rng + ?Sized>(nodes: &[usize], rng: &mut R) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for k in 1..nodes.len() {
        let parent = nodes[rng.random_range(0..k)];
        edges.push((parent, nodes[k]));
    }
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let e = (nodes[a], nodes[b]);
            if !edges.contains(&e) && !edges.contains(&(e.1, e.0)) && rng.random_bool(0.4) {
                edges.push(e);
            }
        }
    }
    edges
}

/// Two random clusters of sizes `a` and `b` joined by one bridge, which is
/// the only influential edge in the network. Returns the network and the
/// influential ordered pair `(i, j)` (`j` influences `i`, `i` on the left).
pub fn random_single_bridge<R: Rng + ?Sized>(a: usize, b: usize, rng: &mut R) -> (AcquaintanceNetwork, (usize, usize)) {
    let n = a + b;
    let left: Vec<usize> = (0..a).collect();
    let right: Vec<usize> = (a..n).collect();
    let i = left[rng.random_range(0..a)];
    let j = right[rng.random_range(0..b)];
    let mut undirected = random_connected_edges(&left, rng);
    undirected.extend(random_connected_edges(&right, rng));
    undirected.push((i, j));

    let mut out = vec![Vec::new(); n];
    for &(u, v) in &undirected {
        out[u].push(v);
        out[v].push(u);
    }
    let delta = rng.random_range(0.05..=0.5);
    let w0 = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut net = AcquaintanceNetwork::empty(n, delta, w0);
    random_rows(&mut net, &out, rng);
    for u in 0..n {
        for &v in &out[u] {
            let kind = if (u, v) == (i, j) {
                let x = rng.random_range(0.2..=1.0);
                let y = rng.random_range(0.0..=(1.0 - x));
                Interaction::new(x, y, 1.0 - x - y)
            } else {
                random_interaction(rng, false)
            };
            net.x[(u, v)] = kind.x;
            net.y[(u, v)] = kind.y;
            net.z[(u, v)] = kind.z;
        }
    }
    (net, (i, j))
}
