//! Asynchronous gossip simulation of willingness updates.
//!
//! Time advances in slots with exactly one meeting per slot: the initiator
//! is uniform over the `n` users, its partner is drawn from the initiator's
//! row of `p`, and the meeting kind from that edge's `(y, x, z)`. This is the
//! embedded jump chain of the rate-1 Poisson clocks; the limits studied here
//! do not depend on holding times.

use std::io::Write;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::network::AcquaintanceNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeetingKind {
    /// Both parties move to their average.
    Regular,
    /// The partner pulls the initiator; the partner keeps its value.
    Influence,
    /// Nothing changes.
    Persistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Meeting {
    pub slot: u64,
    pub initiator: usize,
    pub partner: usize,
    pub kind: MeetingKind,
}

impl Meeting {
    /// The realised one-step update matrix `W(r)` for this meeting.
    pub fn update_matrix(&self, n: usize, delta: f64) -> DMatrix<f64> {
        let (i, j) = (self.initiator, self.partner);
        let mut w = DMatrix::identity(n, n);
        match self.kind {
            MeetingKind::Regular => {
                w[(i, i)] = 0.5;
                w[(j, j)] = 0.5;
                w[(i, j)] = 0.5;
                w[(j, i)] = 0.5;
            }
            MeetingKind::Influence => {
                w[(i, i)] = delta;
                w[(i, j)] = 1.0 - delta;
            }
            MeetingKind::Persistent => {}
        }
        w
    }
}

/// Precomputed sampling tables for one network.
#[derive(Debug, Clone)]
pub struct MeetingSampler {
    n: usize,
    partners: Vec<Option<WeightedIndex<f64>>>,
    /// `(y, x, z)` normalised per ordered pair, row-major.
    kinds: Vec<[f64; 3]>,
}

impl MeetingSampler {
    pub fn new(net: &AcquaintanceNetwork) -> Self {
        let n = net.n;
        let partners = (0..n)
            .map(|i| WeightedIndex::new(net.p.row(i).iter().copied()).ok())
            .collect();
        let mut kinds = vec![[0.0; 3]; n * n];
        for (i, j) in net.edges() {
            let (x, y, z) = (net.x[(i, j)], net.y[(i, j)], net.z[(i, j)]);
            let s = x + y + z;
            if s > 0.0 {
                kinds[i * n + j] = [y / s, x / s, z / s];
            } else {
                kinds[i * n + j] = [0.0, 0.0, 1.0];
            }
        }
        Self { n, partners, kinds }
    }

    /// Draw the meeting for `slot`. Initiators without any outgoing edge
    /// produce a persistent self-meeting (impossible on valid networks).
    pub fn sample<R: Rng + ?Sized>(&self, slot: u64, rng: &mut R) -> Meeting {
        let initiator = rng.random_range(0..self.n);
        let Some(dist) = &self.partners[initiator] else {
            return Meeting { slot, initiator, partner: initiator, kind: MeetingKind::Persistent };
        };
        let partner = dist.sample(rng);
        let [y, x, _] = self.kinds[initiator * self.n + partner];
        let u: f64 = rng.random();
        let kind = if u < y {
            MeetingKind::Regular
        } else if u < y + x {
            MeetingKind::Influence
        } else {
            MeetingKind::Persistent
        };
        Meeting { slot, initiator, partner, kind }
    }
}

/// Draw a single meeting. Prefer a reused [`MeetingSampler`] in loops.
pub fn sample_meeting<R: Rng + ?Sized>(net: &AcquaintanceNetwork, rng: &mut R) -> Meeting {
    MeetingSampler::new(net).sample(0, rng)
}

/// Apply one meeting to the willingness vector in place.
pub fn apply_meeting(w: &mut [f64], m: &Meeting, delta: f64) {
    let (i, j) = (m.initiator, m.partner);
    match m.kind {
        MeetingKind::Regular => {
            let avg = 0.5 * (w[i] + w[j]);
            w[i] = avg;
            w[j] = avg;
        }
        MeetingKind::Influence => {
            // the exact convex combination lies between the two values;
            // clamping removes the last-ulp overshoot of the rounded form
            let (lo, hi) = if w[i] <= w[j] { (w[i], w[j]) } else { (w[j], w[i]) };
            w[i] = (delta * w[i] + (1.0 - delta) * w[j]).clamp(lo, hi);
        }
        MeetingKind::Persistent => {}
    }
}

/// `max - min` of the vector.
pub fn spread(w: &[f64]) -> f64 {
    let (lo, hi) = w
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi - lo
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimParams {
    pub max_slots: u64,
    pub tol: f64,
    /// Snapshot period in slots; `0` means one snapshot every `n` slots.
    pub record_every: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            max_slots: 1_000_000,
            tol: 1e-6,
            record_every: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub slot: u64,
    pub w: Vec<f64>,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub seed: u64,
    pub stream: u64,
    /// Snapshots at slot 0, every `record_every` slots, and the final slot.
    pub snapshots: Vec<Snapshot>,
    /// Spread after every slot; entry `r` is the spread of `w(r)`.
    pub spreads: Vec<f64>,
    pub final_w: Vec<f64>,
    pub converged: bool,
    pub slots: u64,
}

impl SimulationTrace {
    /// The common value the replica settled on (mean of the final vector).
    pub fn converged_value(&self) -> f64 {
        self.final_w.iter().sum::<f64>() / self.final_w.len() as f64
    }

    pub fn spread_is_monotone(&self) -> bool {
        self.spreads.windows(2).all(|s| s[1] <= s[0])
    }

    /// CSV with columns `slot, node_0 .. node_{n-1}, spread`, one row per snapshot.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let n = self.final_w.len();
        let mut header = vec!["slot".to_string()];
        header.extend((0..n).map(|i| format!("node_{i}")));
        header.push("spread".into());
        writeln!(out, "{}", header.join(","))?;
        for snap in &self.snapshots {
            let mut row = vec![snap.slot.to_string()];
            row.extend(snap.w.iter().map(|v| v.to_string()));
            row.push(snap.spread.to_string());
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Generator for replica `stream` of an ensemble seeded with `seed`.
pub fn replica_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run(
    net: &AcquaintanceNetwork,
    sampler: &MeetingSampler,
    params: &SimParams,
    seed: u64,
    stream: u64,
    record: bool,
) -> SimulationTrace {
    let mut rng = replica_rng(seed, stream);
    let every = if params.record_every == 0 { net.n.max(1) as u64 } else { params.record_every };
    let mut w = net.w0.clone();
    let mut s = spread(&w);
    let mut snapshots = vec![Snapshot { slot: 0, w: w.clone(), spread: s }];
    let mut spreads = Vec::new();
    if record {
        spreads.push(s);
    }
    let mut slot = 0;
    while s > params.tol && slot < params.max_slots {
        let m = sampler.sample(slot, &mut rng);
        apply_meeting(&mut w, &m, net.delta);
        slot += 1;
        s = spread(&w);
        if record {
            spreads.push(s);
            if slot % every == 0 {
                snapshots.push(Snapshot { slot, w: w.clone(), spread: s });
            }
        }
    }
    if snapshots.last().map(|l| l.slot) != Some(slot) {
        snapshots.push(Snapshot { slot, w: w.clone(), spread: s });
    }
    SimulationTrace {
        seed,
        stream,
        snapshots,
        spreads,
        final_w: w,
        converged: s <= params.tol,
        slots: slot,
    }
}

/// Run one replica from `w0` until the spread drops to `tol` or the slot
/// budget runs out. Uses stream 0 of `seed`, i.e. replica 0 of an ensemble.
pub fn run_replica(net: &AcquaintanceNetwork, params: &SimParams, seed: u64) -> SimulationTrace {
    run_replica_stream(net, params, seed, 0)
}

pub fn run_replica_stream(net: &AcquaintanceNetwork, params: &SimParams, seed: u64, stream: u64) -> SimulationTrace {
    run(net, &MeetingSampler::new(net), params, seed, stream, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicaOutcome {
    pub converged: bool,
    pub slots: u64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub replicas: usize,
    pub converged: usize,
    pub convergence_rate: f64,
    /// Mean converged value over converged replicas.
    pub mean: Option<f64>,
    pub std_error: Option<f64>,
    pub mean_slots: f64,
    pub min_slots: u64,
    pub max_slots: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub outcomes: Vec<ReplicaOutcome>,
    pub summary: EnsembleSummary,
}

/// Independent replicas `0..replicas`, replica `k` on stream `k` of `seed`.
/// Replicas run in parallel; results do not depend on scheduling.
pub fn simulate_ensemble(net: &AcquaintanceNetwork, replicas: usize, params: &SimParams, seed: u64) -> Ensemble {
    let sampler = MeetingSampler::new(net);
    let outcomes: Vec<ReplicaOutcome> = (0..replicas as u64)
        .into_par_iter()
        .map(|k| {
            let t = run(net, &sampler, params, seed, k, false);
            ReplicaOutcome { converged: t.converged, slots: t.slots, value: t.converged_value() }
        })
        .collect();
    let summary = summarize(&outcomes, seed);
    Ensemble { outcomes, summary }
}

fn summarize(outcomes: &[ReplicaOutcome], seed: u64) -> EnsembleSummary {
    let values: Vec<f64> = outcomes.iter().filter(|o| o.converged).map(|o| o.value).collect();
    let k = values.len();
    let mean = (k > 0).then(|| values.iter().sum::<f64>() / k as f64);
    let std_error = mean.map(|m| {
        if k < 2 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1) as f64;
            (var / k as f64).sqrt()
        }
    });
    let slots = outcomes.iter().map(|o| o.slots);
    let replicas = outcomes.len();
    EnsembleSummary {
        replicas,
        converged: k,
        convergence_rate: if replicas == 0 { 0.0 } else { k as f64 / replicas as f64 },
        mean,
        std_error,
        mean_slots: if replicas == 0 { 0.0 } else { slots.clone().sum::<u64>() as f64 / replicas as f64 },
        min_slots: slots.clone().min().unwrap_or(0),
        max_slots: slots.max().unwrap_or(0),
        seed,
    }
}
