//! Expected one-step dynamics and the Markov-chain objects derived from it.
//!
//! `Wbar = E[W(r)]` splits into a symmetric, doubly stochastic social part
//! `K` (what the dynamics would be with influence treated as averaging) and a
//! zero-row-sum influence part `L`. The stationary distribution of `Wbar`
//! weights each user's initial willingness in the expected consensus; the
//! fundamental matrix and mean first passage times of `K` express how far
//! that distribution is pulled away from uniform.
//!
//! Naming: `Y1` below is the influence update matrix of a single meeting;
//! `Y` is always the fundamental matrix of `K`.

use std::collections::VecDeque;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::AcquaintanceNetwork;

/// Condition numbers above this make a dense solve untrustworthy.
pub const MAX_CONDITION: f64 = 1e13;

#[derive(Debug, Clone, PartialEq)]
pub struct MeanMatrices {
    pub wbar: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub l: DMatrix<f64>,
}

impl MeanMatrices {
    pub fn n(&self) -> usize {
        self.k.nrows()
    }
}

/// Assemble `K`, `L` and `Wbar = K + L` from the meeting law.
///
/// Every ordered edge contributes `p/n * [(1-z) X_ij + z I]` to `K` and
/// `p x / n * (Y1_ij - X_ij)` to `L`, with `X_ij = I - (e_i-e_j)(e_i-e_j)^T/2`
/// and `Y1_ij = I - (1-delta) e_i (e_i-e_j)^T`.
pub fn build_mean_matrices(net: &AcquaintanceNetwork) -> MeanMatrices {
    let n = net.n;
    let nf = n as f64;
    let mut k = DMatrix::zeros(n, n);
    let mut l = DMatrix::zeros(n, n);
    for (i, j) in net.edges() {
        let p = net.p[(i, j)];
        let (x, z) = (net.x[(i, j)], net.z[(i, j)]);

        // p/n * I, then subtract the averaging part of X_ij
        let c = p / nf;
        for d in 0..n {
            k[(d, d)] += c;
        }
        let a = c * (1.0 - z) * 0.5;
        k[(i, i)] -= a;
        k[(j, j)] -= a;
        k[(i, j)] += a;
        k[(j, i)] += a;

        // Y1 - X = ((delta - 1/2) e_i - e_j / 2)(e_i - e_j)^T
        let b = p * x / nf;
        let ri = b * (net.delta - 0.5);
        l[(i, i)] += ri;
        l[(i, j)] -= ri;
        l[(j, i)] -= 0.5 * b;
        l[(j, j)] += 0.5 * b;
    }
    let wbar = &k + &l;
    MeanMatrices { wbar, k, l }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StationaryMethod {
    /// Direct linear solve of the left fixed point.
    Eigen,
    /// Perturbation identity around the uniform distribution of `K`.
    Perturbation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    pub pi: Vec<f64>,
    pub method: StationaryMethod,
}

fn condition_1norm(a: &DMatrix<f64>) -> Result<f64> {
    let inv = a
        .clone()
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("matrix is singular".into()))?;
    let norm1 = |m: &DMatrix<f64>| m.column_iter().map(|c| c.abs().sum()).fold(0.0, f64::max);
    Ok(norm1(a) * norm1(&inv))
}

/// Solve `A x = b` by partially pivoted LU, refusing ill-conditioned systems.
fn guarded_solve(a: &DMatrix<f64>, b: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    let cond = condition_1norm(a).map_err(|_| Error::Numerical(format!("{what}: singular system")))?;
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Numerical(format!("{what}: condition number {cond:.3e} exceeds {MAX_CONDITION:.0e}")));
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Numerical(format!("{what}: singular system")))
}

/// Left fixed point of `Wbar`, normalised to sum 1.
///
/// One equation of `(Wbar^T - I) pi = 0` is replaced by `sum(pi) = 1`.
pub fn stationary_distribution(mm: &MeanMatrices) -> Result<StationaryDistribution> {
    let n = mm.n();
    let mut a = mm.wbar.transpose() - DMatrix::identity(n, n);
    for c in 0..n {
        a[(n - 1, c)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let pi = guarded_solve(&a, &b, "stationary distribution")?;
    Ok(StationaryDistribution { pi: pi.iter().copied().collect(), method: StationaryMethod::Eigen })
}

/// Power iteration `pi <- pi Wbar` from the uniform vector. Used as a slow
/// independent check of [`stationary_distribution`].
pub fn stationary_power_iteration(wbar: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = wbar.nrows();
    let mut pi = DVector::from_element(n, 1.0 / n as f64).transpose();
    for _ in 0..max_iter {
        let next = &pi * wbar;
        let delta = (&next - &pi).abs().max();
        pi = next;
        if delta < tol {
            let s = pi.sum();
            return Ok(pi.iter().map(|v| v / s).collect());
        }
    }
    Err(Error::Numerical(format!("power iteration did not converge in {max_iter} steps")))
}

/// Whether the off-diagonal support of a symmetric matrix is connected.
pub fn is_irreducible(m: &DMatrix<f64>) -> bool {
    let n = m.nrows();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(v) = queue.pop_front() {
        for u in 0..n {
            if !seen[u] && u != v && (m[(v, u)] > 0.0 || m[(u, v)] > 0.0) {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Fundamental matrix `Y = (I - K + K^inf)^{-1} - K^inf`, `K^inf = ee^T/n`,
/// of an irreducible doubly stochastic `K`.
pub fn fundamental_matrix(k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = k.nrows();
    if n == 0 || k.ncols() != n {
        return Err(Error::InvalidArgument("social matrix must be square and nonempty".into()));
    }
    for i in 0..n {
        let (r, c) = (k.row(i).sum(), k.column(i).sum());
        if (r - 1.0).abs() > 1e-9 || (c - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("social matrix is not doubly stochastic at index {i}")));
        }
    }
    if !is_irreducible(k) {
        return Err(Error::Numerical("social matrix is reducible; fundamental matrix undefined".into()));
    }
    let limit = DMatrix::from_element(n, n, 1.0 / n as f64);
    let a = DMatrix::identity(n, n) - k + &limit;
    let cond = condition_1norm(&a)?;
    if !cond.is_finite() || cond > MAX_CONDITION {
        return Err(Error::Numerical(format!("I - K + K^inf has condition number {cond:.3e}")));
    }
    let z = a
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("I - K + K^inf is singular".into()))?;
    Ok(z - limit)
}

/// `pi` by the perturbation identity
/// `(pi - e/n)^T = (1/n) e^T LY (I - LY)^{-1}`, with `Y` the fundamental
/// matrix of `K`.
pub fn stationary_perturbation(mm: &MeanMatrices) -> Result<StationaryDistribution> {
    let n = mm.n();
    let nf = n as f64;
    let y = fundamental_matrix(&mm.k)?;
    let ly = &mm.l * y;
    // row vector u^T LY with u = e/n
    let rhs = (DVector::from_element(n, 1.0 / nf).transpose() * &ly).transpose();
    // d^T (I - LY) = u^T LY  <=>  (I - LY)^T d = (u^T LY)^T
    let a = (DMatrix::identity(n, n) - ly).transpose();
    let d = guarded_solve(&a, &rhs, "perturbation identity")?;
    let pi = d.iter().map(|v| v + 1.0 / nf).collect();
    Ok(StationaryDistribution { pi, method: StationaryMethod::Perturbation })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassageData {
    pub y: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

/// `m[i][j] = (Y[j][j] - Y[i][j]) / pi[j]` for `i != j`, zero diagonal.
pub fn mean_first_passage(y: &DMatrix<f64>, pi: &[f64]) -> DMatrix<f64> {
    let n = y.nrows();
    DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { (y[(j, j)] - y[(i, j)]) / pi[j] })
}

/// Fundamental matrix and passage times of `K` (uniform stationary law).
pub fn passage_data(k: &DMatrix<f64>) -> Result<PassageData> {
    let n = k.nrows();
    let y = fundamental_matrix(k)?;
    let m = mean_first_passage(&y, &vec![1.0 / n as f64; n]);
    Ok(PassageData { y, m })
}

/// Row-major CSV with shortest round-trip decimals.
pub fn write_matrix_csv<W: Write>(m: &DMatrix<f64>, mut out: W) -> std::io::Result<()> {
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}
