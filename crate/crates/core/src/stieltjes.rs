//! Univariate truncated Stieltjes machinery.
//!
//! A moment sequence `s_0..s_{2n}` defines the Hankel matrix
//! `H = (s_{i+j})_{0<=i,j<=n}`. Its Cholesky factor `H = R^T R` gives the
//! three-term recurrence of the orthogonal polynomials (Golub-Welsch):
//!
//! ```text
//! a_j = R[j][j+1]/R[j][j] - R[j-1][j]/R[j-1][j-1]
//! b_j = R[j][j]/R[j-1][j-1]
//! ```
//!
//! The Gauss rule's nodes are the eigenvalues of the Jacobi matrix and its
//! weights are `s_0` times the squared first eigenvector components. When
//! the Hankel matrix is singular of numerical rank `m <= n`, the rule has `m`
//! nodes and reproduces every given moment.
//!
//! Hankel matrices are badly conditioned; the order is capped
//! ([`StieltjesOptions::max_order`], default 20).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{psd_check, PsdOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StieltjesError {
    #[error("moment sequence must be non-empty, finite, with s_0 >= 0")]
    InvalidMoments,
    #[error("need {needed} moments for order {order}, got {got}")]
    TooFewMoments {
        order: usize,
        needed: usize,
        got: usize,
    },
    #[error("order {order} exceeds the configured cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },
    #[error("Hankel matrix is not positive semidefinite (witness value {value:.3e})")]
    NotPositiveSemidefinite { witness: Vec<f64>, value: f64 },
    #[error("tridiagonal eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("atomic measure invalid: {0}")]
    InvalidMeasure(String),
    #[error("negative node {0} cannot be pushed forward by sqrt")]
    NegativeNode(f64),
}

/// Numerical policy for the univariate solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesOptions {
    /// Relative tolerance of the Hankel PSD test.
    pub psd_eps: f64,
    /// A Cholesky pivot at most `rank_eps * H[i][i]` ends the recurrence.
    pub rank_eps: f64,
    /// `|t| < zero_node_eps * (1 + |t_max|)` flags a node at zero.
    pub zero_node_eps: f64,
    pub max_order: usize,
    pub max_iterations: usize,
}

impl Default for StieltjesOptions {
    fn default() -> Self {
        StieltjesOptions {
            psd_eps: 1e-10,
            rank_eps: 1e-12,
            zero_node_eps: 1e-12,
            max_order: 20,
            max_iterations: 60,
        }
    }
}

/// Moments `s_0, s_1, ..., s_{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence(Vec<f64>);

impl MomentSequence {
    pub fn new(values: Vec<f64>) -> Result<Self, StieltjesError> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) || values[0] < 0.0 {
            return Err(StieltjesError::InvalidMoments);
        }
        Ok(MomentSequence(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Largest `n` with `s_0..s_{2n}` available.
    pub fn order(&self) -> usize {
        (self.0.len() - 1) / 2
    }

    /// Hankel matrix `(s_{i+j+shift})_{0<=i,j<size}`.
    pub fn hankel(&self, size: usize, shift: usize) -> Vec<Vec<f64>> {
        (0..size)
            .map(|i| (0..size).map(|j| self.0[i + j + shift]).collect())
            .collect()
    }
}

/// Non-negative atomic measure `Σ α_i δ_{t_i}`.
///
/// Serialized as `{"nodes": [...], "weights": [...]}`; deserialization
/// applies the same validation as [`AtomicMeasure::new`].
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "RawAtomicMeasure")]
pub struct AtomicMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawAtomicMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TryFrom<RawAtomicMeasure> for AtomicMeasure {
    type Error = StieltjesError;
    fn try_from(raw: RawAtomicMeasure) -> Result<Self, Self::Error> {
        AtomicMeasure::new(raw.nodes, raw.weights)
    }
}

impl AtomicMeasure {
    /// Nodes must be finite and strictly increasing, weights finite and
    /// strictly positive.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self, StieltjesError> {
        if nodes.len() != weights.len() {
            return Err(StieltjesError::InvalidMeasure(format!(
                "{} nodes but {} weights",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(StieltjesError::InvalidMeasure("non-finite value".into()));
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StieltjesError::InvalidMeasure(
                "nodes must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(StieltjesError::InvalidMeasure(
                "weights must be strictly positive".into(),
            ));
        }
        Ok(AtomicMeasure { nodes, weights })
    }

    /// Sorts the atoms and merges coincident nodes.
    pub fn from_unsorted(atoms: Vec<(f64, f64)>) -> Result<Self, StieltjesError> {
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut nodes: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (t, w) in atoms {
            if nodes.last() == Some(&t) {
                *weights.last_mut().expect("paired") += w;
            } else {
                nodes.push(t);
                weights.push(w);
            }
        }
        Self::new(nodes, weights)
    }

    pub fn empty() -> Self {
        AtomicMeasure::default()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫ t^j dν`.
    pub fn moment(&self, j: u32) -> f64 {
        self.atoms().map(|(t, w)| w * t.powi(j as i32)).sum()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.atoms().map(|(t, w)| w * f(t)).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Symmetric tridiagonal Jacobi matrix with diagonal `a_0..a_{m-1}`,
/// off-diagonal `b_1..b_{m-1}` and mass `β_0 = s_0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiMatrix {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub mass: f64,
}

impl JacobiMatrix {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.size();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.offdiag[i];
                m[i + 1][i] = self.offdiag[i];
            }
        }
        m
    }
}

/// Recurrence coefficients and the numerical rank of the Hankel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    pub jacobi: JacobiMatrix,
    /// Numerical rank of `(s_{i+j})_{0<=i,j<=n}`; `n + 1` when full.
    pub rank: usize,
}

impl Recurrence {
    pub fn is_degenerate(&self) -> bool {
        self.rank <= self.jacobi.size()
    }
}

fn check_order(
    s: &MomentSequence,
    n: usize,
    opts: &StieltjesOptions,
) -> Result<(), StieltjesError> {
    if n > opts.max_order {
        return Err(StieltjesError::OrderTooLarge {
            order: n,
            cap: opts.max_order,
        });
    }
    if s.0.len() < 2 * n + 1 {
        return Err(StieltjesError::TooFewMoments {
            order: n,
            needed: 2 * n + 1,
            got: s.0.len(),
        });
    }
    Ok(())
}

/// Jacobi matrix of `s_0..s_{2n}` for `n = s.order()`.
pub fn orthogonal_recurrence(
    s: &MomentSequence,
    opts: &StieltjesOptions,
) -> Result<Recurrence, StieltjesError> {
    recurrence_of_order(s, s.order(), opts)
}

fn recurrence_of_order(
    s: &MomentSequence,
    n: usize,
    opts: &StieltjesOptions,
) -> Result<Recurrence, StieltjesError> {
    check_order(s, n, opts)?;
    let h = s.hankel(n + 1, 0);
    if let PsdOutcome::Indefinite { witness, value } = psd_check(&h, opts.psd_eps) {
        return Err(StieltjesError::NotPositiveSemidefinite { witness, value });
    }

    let size = n + 1;
    let mut r = vec![vec![0.0; size]; size];
    let mut rank = size;
    'rows: for i in 0..size {
        for j in i..size {
            let dot: f64 = (0..i).map(|k| r[k][i] * r[k][j]).sum();
            let v = h[i][j] - dot;
            if j == i {
                if h[i][i] <= 0.0 || v <= opts.rank_eps * h[i][i] {
                    rank = i;
                    break 'rows;
                }
                r[i][i] = v.sqrt();
            } else {
                r[i][j] = v / r[i][i];
            }
        }
    }

    let m = rank.min(n);
    let mut diag = Vec::with_capacity(m);
    let mut offdiag = Vec::with_capacity(m.saturating_sub(1));
    for j in 0..m {
        let prev = if j > 0 {
            r[j - 1][j] / r[j - 1][j - 1]
        } else {
            0.0
        };
        diag.push(r[j][j + 1] / r[j][j] - prev);
        if j > 0 {
            offdiag.push(r[j][j] / r[j - 1][j - 1]);
        }
    }
    Ok(Recurrence {
        jacobi: JacobiMatrix {
            diag,
            offdiag,
            mass: s.0[0],
        },
        rank,
    })
}

/// Eigenvalues (ascending) of a symmetric tridiagonal matrix together with
/// the first component of each normalized eigenvector, by implicit-shift QL.
pub fn tridiagonal_eigen(j: &JacobiMatrix) -> Result<(Vec<f64>, Vec<f64>), StieltjesError> {
    tridiagonal_eigen_capped(j, StieltjesOptions::default().max_iterations)
}

fn tridiagonal_eigen_capped(
    jm: &JacobiMatrix,
    max_iterations: usize,
) -> Result<(Vec<f64>, Vec<f64>), StieltjesError> {
    let n = jm.size();
    let mut d = jm.diag.clone();
    // e[i] couples rows i and i+1; e[n-1] is scratch.
    let mut e = jm.offdiag.clone();
    e.resize(n, 0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > max_iterations {
                return Err(StieltjesError::NoConvergence { iterations: iter });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    Ok((
        order.iter().map(|&i| d[i]).collect(),
        order.iter().map(|&i| z[i]).collect(),
    ))
}

/// A Gauss-Jacobi rule together with solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub measure: AtomicMeasure,
    /// Numerical rank of the Hankel matrix.
    pub rank: usize,
    /// Some node lies at zero within `zero_node_eps`.
    pub node_at_zero: bool,
}

/// Gauss rule for `s_0..s_{2n}`.
///
/// In the nondegenerate case the rule has `n` nodes and reproduces
/// `s_0..s_{2n-1}`; when the Hankel matrix has rank `m <= n` it has `m`
/// nodes and reproduces all given moments.
pub fn gauss_rule(
    s: &MomentSequence,
    n: usize,
    opts: &StieltjesOptions,
) -> Result<GaussRule, StieltjesError> {
    let rec = recurrence_of_order(s, n, opts)?;
    let (nodes, first) = tridiagonal_eigen_capped(&rec.jacobi, opts.max_iterations)?;
    let weights: Vec<f64> = first.iter().map(|z| rec.jacobi.mass * z * z).collect();
    let t_max = nodes.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let node_at_zero = nodes
        .iter()
        .any(|t| t.abs() < opts.zero_node_eps * (1.0 + t_max));
    let measure = AtomicMeasure::new(nodes, weights)?;
    Ok(GaussRule {
        measure,
        rank: rec.rank,
        node_at_zero,
    })
}

/// Image of `ν` under `t ↦ √t`.
pub fn pushforward_sqrt(nu: &AtomicMeasure) -> Result<AtomicMeasure, StieltjesError> {
    if let Some(&t) = nu.nodes.iter().find(|&&t| t < 0.0) {
        return Err(StieltjesError::NegativeNode(t));
    }
    Ok(AtomicMeasure {
        nodes: nu.nodes.iter().map(|t| t.sqrt()).collect(),
        weights: nu.weights.clone(),
    })
}

/// Image of `ν` under `r ↦ r²`, the inverse of [`pushforward_sqrt`] on `[0, ∞)`.
pub fn pushforward_square(nu: &AtomicMeasure) -> Result<AtomicMeasure, StieltjesError> {
    if let Some(&r) = nu.nodes.iter().find(|&&r| r < 0.0) {
        return Err(StieltjesError::NegativeNode(r));
    }
    Ok(AtomicMeasure {
        nodes: nu.nodes.iter().map(|r| r * r).collect(),
        weights: nu.weights.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarlemanVerdict {
    DeterminateSufficient,
    Inconclusive,
}

/// Heuristic thresholds for [`carleman_diagnostic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarlemanConfig {
    pub sum_threshold: f64,
    pub min_last_ratio: f64,
}

impl Default for CarlemanConfig {
    fn default() -> Self {
        CarlemanConfig {
            sum_threshold: 10.0,
            min_last_ratio: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlemanReport {
    pub verdict: CarlemanVerdict,
    /// `Σ_{1<=j<=N} s_j^{-1/(2j)}`.
    pub partial_sum: f64,
    /// Ratio of the last two terms of the sum.
    pub last_ratio: f64,
}

/// Carleman-type sufficient check for Stieltjes determinacy.
///
/// Returns `DeterminateSufficient` when the partial sum exceeds the
/// threshold and the terms are not decaying geometrically; never claims
/// indeterminacy, which finitely many moments cannot certify.
pub fn carleman_diagnostic(s: &MomentSequence, config: &CarlemanConfig) -> CarlemanReport {
    let inconclusive = CarlemanReport {
        verdict: CarlemanVerdict::Inconclusive,
        partial_sum: f64::NAN,
        last_ratio: f64::NAN,
    };
    let v = &s.0;
    if v.len() < 3 || v[0] <= 0.0 || v[1..].iter().any(|&x| x < 0.0) {
        return inconclusive;
    }
    let terms: Vec<f64> = v
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &sj)| {
            if sj == 0.0 {
                f64::INFINITY
            } else {
                (-sj.ln() / (2.0 * j as f64)).exp()
            }
        })
        .collect();
    let partial_sum: f64 = terms.iter().sum();
    let last = terms[terms.len() - 1];
    let prev = terms[terms.len() - 2];
    let last_ratio = if last.is_infinite() {
        f64::INFINITY
    } else {
        last / prev
    };
    let verdict = if partial_sum > config.sum_threshold && last_ratio > config.min_last_ratio {
        CarlemanVerdict::DeterminateSufficient
    } else {
        CarlemanVerdict::Inconclusive
    };
    CarlemanReport {
        verdict,
        partial_sum,
        last_ratio,
    }
}
