//! Performance of the expected consensus and the bounds on how far the
//! stationary distribution can drift from uniform.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{diameter, AcquaintanceNetwork};

/// Exact conductance is only attempted up to this many nodes.
pub const MAX_EXACT_CONDUCTANCE_NODES: usize = 20;

pub const DEFAULT_MIXING_THRESHOLD: f64 = 0.1;

/// Deviation of the expected consensus from the plain average of `w0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Performance {
    /// `pi . w0 - gamma`
    pub performance: f64,
    /// Mean of `w0`.
    pub gamma: f64,
}

pub fn performance(pi: &[f64], w0: &[f64]) -> Performance {
    let n = w0.len() as f64;
    let gamma = w0.iter().sum::<f64>() / n;
    let performance = pi.iter().zip(w0).map(|(p, w)| (p - 1.0 / n) * w).sum();
    Performance { performance, gamma }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionConstants {
    /// Smallest per-edge averaging mass `(1/n)[p_ij(1-z_ij)/2 + p_ji(1-z_ji)/2]`.
    pub psi1: f64,
    pub diameter: usize,
    /// `(1 - n psi1^d)^(1/d)`; `None` when `n psi1^d > 1`.
    pub rho: Option<f64>,
}

pub fn contraction_constants(net: &AcquaintanceNetwork) -> Result<ContractionConstants> {
    let d = diameter(net)?;
    let n = net.n as f64;
    let psi1 = net
        .edges()
        .map(|(i, j)| (net.p[(i, j)] * (1.0 - net.z[(i, j)]) / 2.0 + net.p[(j, i)] * (1.0 - net.z[(j, i)]) / 2.0) / n)
        .fold(f64::INFINITY, f64::min);
    if !psi1.is_finite() {
        return Err(Error::Graph("network has no edges".into()));
    }
    let base = 1.0 - n * psi1.powi(d as i32);
    let rho = if base < 0.0 {
        None
    } else if base == 0.0 {
        Some(0.0)
    } else {
        Some(base.powf(1.0 / d as f64))
    };
    Ok(ContractionConstants { psi1, diameter: d, rho })
}

/// Sup-norm bound on `pi - e/n`: `(1/(1-rho)) * sum(p x) / (2n)`.
pub fn bound_linf(net: &AcquaintanceNetwork, rho: Option<f64>) -> Result<f64> {
    match rho {
        Some(r) if (0.0..1.0).contains(&r) => Ok(net.influence_mass() / (2.0 * net.n as f64) / (1.0 - r)),
        Some(r) => Err(Error::Inapplicable(format!("sup-norm bound needs rho in [0, 1), got {r}"))),
        None => Err(Error::Inapplicable("sup-norm bound needs n * psi1^d <= 1".into())),
    }
}

/// Bound on `|P|`: the sup-norm bound times `max |w0|`.
pub fn bound_expectation(linf_bound: f64, w0: &[f64]) -> f64 {
    linf_bound * w0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralGap {
    pub lambda2: f64,
    pub gap: f64,
}

/// All eigenvalues of a symmetric matrix, descending.
pub fn symmetric_eigenvalues(k: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = k.nrows();
    for i in 0..n {
        for j in 0..i {
            if (k[(i, j)] - k[(j, i)]).abs() > 1e-12 {
                return Err(Error::InvalidArgument("social matrix is not symmetric".into()));
            }
        }
    }
    let eig = k
        .clone()
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("symmetric eigen-decomposition did not converge".into()))?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// Second-largest (signed) eigenvalue of `K` and the gap `1 - lambda2`.
pub fn lambda2_gap(k: &DMatrix<f64>) -> Result<SpectralGap> {
    let values = symmetric_eigenvalues(k)?;
    let lambda2 = values.get(1).copied().unwrap_or(-1.0);
    Ok(SpectralGap { lambda2, gap: 1.0 - lambda2 })
}

/// Euclidean bound on `pi - e/n`: `(1/(1-lambda2)) * sum(p x) / n`.
pub fn bound_l2(net: &AcquaintanceNetwork, lambda2: f64) -> Result<f64> {
    if lambda2 >= 1.0 {
        return Err(Error::Inapplicable("social matrix has lambda2 = 1 (disconnected)".into()));
    }
    Ok(net.influence_mass() / net.n as f64 / (1.0 - lambda2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConductanceMode {
    Exact,
    Skip,
}

/// `min_A Q(A, A^c) / (pi(A) pi(A^c))` for `K` with uniform `pi`, by
/// enumerating every nonempty proper subset (up to complement).
pub fn conductance(k: &DMatrix<f64>, mode: ConductanceMode) -> Result<Option<f64>> {
    let n = k.nrows();
    match mode {
        ConductanceMode::Skip => return Ok(None),
        ConductanceMode::Exact if n > MAX_EXACT_CONDUCTANCE_NODES => {
            return Err(Error::InvalidArgument(format!(
                "exact conductance enumerates 2^(n-1) subsets; n = {n} exceeds {MAX_EXACT_CONDUCTANCE_NODES}, use skip mode"
            )))
        }
        ConductanceMode::Exact => {}
    }
    if n < 2 {
        return Err(Error::InvalidArgument("conductance needs at least two states".into()));
    }
    let nf = n as f64;
    // Subsets not containing the last node; the complement covers the rest.
    let best = (1u64..(1u64 << (n - 1)))
        .into_par_iter()
        .map(|mask| {
            let size = mask.count_ones() as f64;
            let mut flow = 0.0;
            for i in (0..n).filter(|&i| mask >> i & 1 == 1) {
                for j in (0..n).filter(|&j| mask >> j & 1 == 0) {
                    flow += k[(i, j)];
                }
            }
            // Q = flow / n, pi(A) pi(A^c) = size (n - size) / n^2
            flow * nf / (size * (nf - size))
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(Some(best))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MixingClass {
    Fast,
    Slow,
}

pub fn classify_mixing(gap: f64, threshold: f64) -> MixingClass {
    if gap < threshold {
        MixingClass::Slow
    } else {
        MixingClass::Fast
    }
}

/// A bound that either evaluated or was inapplicable, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BoundValue {
    Value(f64),
    Inapplicable { inapplicable: String },
}

impl BoundValue {
    pub fn from_result(r: Result<f64>) -> Self {
        match r {
            Ok(v) => BoundValue::Value(v),
            Err(e) => BoundValue::Inapplicable { inapplicable: e.to_string() },
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            BoundValue::Value(v) => Some(*v),
            BoundValue::Inapplicable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub lambda2: f64,
    pub gap: f64,
    pub psi1: f64,
    pub rho: Option<f64>,
    pub d: usize,
    pub conductance: Option<f64>,
    pub performance: f64,
    pub gamma: f64,
    pub bound_linf: BoundValue,
    pub bound_l2: BoundValue,
    pub bound_expectation: BoundValue,
    pub mixing_class: MixingClass,
    pub mixing_threshold: f64,
}

pub fn spectral_report(
    net: &AcquaintanceNetwork,
    k: &DMatrix<f64>,
    pi: &[f64],
    mode: ConductanceMode,
    mixing_threshold: f64,
) -> Result<SpectralReport> {
    let consts = contraction_constants(net)?;
    let SpectralGap { lambda2, gap } = lambda2_gap(k)?;
    let perf = performance(pi, &net.w0);
    let linf = bound_linf(net, consts.rho);
    let expectation = linf.as_ref().map(|&b| bound_expectation(b, &net.w0)).map_err(|e| Error::Inapplicable(e.to_string()));
    let mode = if net.n > MAX_EXACT_CONDUCTANCE_NODES { ConductanceMode::Skip } else { mode };
    Ok(SpectralReport {
        lambda2,
        gap,
        psi1: consts.psi1,
        rho: consts.rho,
        d: consts.diameter,
        conductance: conductance(k, mode)?,
        performance: perf.performance,
        gamma: perf.gamma,
        bound_linf: BoundValue::from_result(linf),
        bound_l2: BoundValue::from_result(bound_l2(net, lambda2)),
        bound_expectation: BoundValue::from_result(expectation),
        mixing_class: classify_mixing(gap, mixing_threshold),
        mixing_threshold,
    })
}
