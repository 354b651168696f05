//! Component measures `σ_{k,l}` on the `r`-axis representing a functional
//! through `T(f) = Σ_{k,l} ∫ f_{k,l}(r) r^{-k} dσ_{k,l}`, together with
//! signed point rules and summability diagnostics.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decompose::{
    is_pseudo_positive_definite_with, laplace_fourier_decompose, DecomposeError,
    DistributedMomentTable, HankelKind, PseudoPdVerdict,
};
use crate::harmonics::{HarmonicsError, SolidHarmonicBasis};
use crate::polycore::MultiPoly;
use crate::stieltjes::{
    gauss_rule, pushforward_sqrt, tridiagonal_eigen, AtomicMeasure, JacobiMatrix, MomentSequence,
    StieltjesError, StieltjesOptions,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CubatureError {
    #[error("table is not pseudo-positive definite: component ({k},{l}), {matrix:?} Hankel, value {value:.3e}")]
    NotPseudoPositive {
        k: usize,
        l: usize,
        matrix: HankelKind,
        witness: Vec<f64>,
        value: f64,
    },
    #[error("component ({k},{l}): {source}")]
    Component {
        k: usize,
        l: usize,
        source: StieltjesError,
    },
    #[error("unrepresented component ({k},{l})")]
    Unrepresented { k: usize, l: usize },
    #[error("component ({k},{l}) outside the basis")]
    BadIndex { k: usize, l: usize },
    #[error("duplicate component ({k},{l})")]
    Duplicate { k: usize, l: usize },
    #[error("negative radius {r} in component ({k},{l})")]
    NegativeRadius { k: usize, l: usize, r: f64 },
    #[error("point rules are not available in dimension {0}; use the shell form")]
    ShellFormOnly(usize),
    #[error("node at zero with k >= 1 in component ({k},{l}); point weight undefined")]
    NodeAtZero { k: usize, l: usize },
    #[error("basis fingerprint mismatch (measures {measures}, basis {basis})")]
    FingerprintMismatch { measures: String, basis: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
}

/// Non-negative atomic measures `σ_{k,l}` on `[0, ∞)`, keyed by `(k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMeasureSet {
    dim: usize,
    k_max: usize,
    fingerprint: String,
    components: BTreeMap<(usize, usize), AtomicMeasure>,
}

impl ComponentMeasureSet {
    /// Empty set for components `k <= k_max` of `basis`.
    pub fn new(basis: &SolidHarmonicBasis, k_max: usize) -> Result<Self, CubatureError> {
        let fingerprint = basis
            .fingerprint_upto(k_max)
            .ok_or(CubatureError::BadIndex { k: k_max, l: 1 })?
            .to_string();
        Ok(ComponentMeasureSet {
            dim: basis.dim(),
            k_max,
            fingerprint,
            components: BTreeMap::new(),
        })
    }

    pub fn from_parts(
        dim: usize,
        k_max: usize,
        fingerprint: String,
        components: Vec<(usize, usize, AtomicMeasure)>,
    ) -> Result<Self, CubatureError> {
        let mut set = ComponentMeasureSet {
            dim,
            k_max,
            fingerprint,
            components: BTreeMap::new(),
        };
        for (k, l, m) in components {
            set.insert(k, l, m)?;
        }
        Ok(set)
    }

    pub fn insert(
        &mut self,
        k: usize,
        l: usize,
        sigma: AtomicMeasure,
    ) -> Result<(), CubatureError> {
        let count = crate::harmonics::harmonic_dimension(self.dim, k);
        if k > self.k_max || l == 0 || l > count {
            return Err(CubatureError::BadIndex { k, l });
        }
        if let Some(&r) = sigma.nodes().iter().find(|&&r| r < 0.0) {
            return Err(CubatureError::NegativeRadius { k, l, r });
        }
        if self.components.insert((k, l), sigma).is_some() {
            return Err(CubatureError::Duplicate { k, l });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn get(&self, k: usize, l: usize) -> Option<&AtomicMeasure> {
        self.components.get(&(k, l))
    }

    pub fn components(&self) -> impl Iterator<Item = (usize, usize, &AtomicMeasure)> {
        self.components.iter().map(|(&(k, l), m)| (k, l, m))
    }

    /// Largest `k` with a non-empty measure.
    pub fn max_k(&self) -> usize {
        self.components()
            .filter(|(_, _, m)| !m.is_empty())
            .map(|(k, _, _)| k)
            .max()
            .unwrap_or(0)
    }

    pub fn check_basis(&self, basis: &SolidHarmonicBasis) -> Result<(), CubatureError> {
        if basis.dim() != self.dim {
            return Err(CubatureError::DimensionMismatch {
                left: self.dim,
                right: basis.dim(),
            });
        }
        let expected = basis.fingerprint_upto(self.k_max);
        if expected != Some(self.fingerprint.as_str()) {
            return Err(CubatureError::FingerprintMismatch {
                measures: self.fingerprint.clone(),
                basis: expected.unwrap_or("<basis too shallow>").to_string(),
            });
        }
        Ok(())
    }
}

/// Per-component outcome of [`solve_truncated`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDiagnostic {
    pub k: usize,
    pub l: usize,
    pub rank: usize,
    pub nodes: usize,
    pub node_at_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub components: Vec<ComponentDiagnostic>,
}

impl SolveDiagnostics {
    /// Components with `k >= 1` that carry a node at `r = 0`.
    pub fn zero_node_components(&self) -> Vec<(usize, usize)> {
        self.components
            .iter()
            .filter(|c| c.k >= 1 && c.node_at_zero)
            .map(|c| (c.k, c.l))
            .collect()
    }
}

/// Gauss rule in `t = r²` for every component, pushed to the `r`-axis.
///
/// Nodes within `zero_node_eps` of zero are set to exactly zero.
pub fn solve_truncated(
    tbl: &DistributedMomentTable,
    basis: &SolidHarmonicBasis,
    opts: &StieltjesOptions,
) -> Result<(ComponentMeasureSet, SolveDiagnostics), CubatureError> {
    tbl.check_basis(basis)?;
    if let PseudoPdVerdict::Fail {
        k,
        l,
        matrix,
        witness,
        value,
    } = is_pseudo_positive_definite_with(tbl, opts.psd_eps)
    {
        return Err(CubatureError::NotPseudoPositive {
            k,
            l,
            matrix,
            witness,
            value,
        });
    }
    let mut set = ComponentMeasureSet::new(basis, tbl.k_max())?;
    let mut diags = Vec::new();
    for (k, l, c) in tbl.components() {
        let wrap = |source| CubatureError::Component { k, l, source };
        let s = MomentSequence::new(c.to_vec()).map_err(wrap)?;
        let rule = gauss_rule(&s, tbl.order(), opts).map_err(wrap)?;
        let t_max = rule
            .measure
            .nodes()
            .iter()
            .fold(0.0f64, |m, t| m.max(t.abs()));
        let zero = opts.zero_node_eps * (1.0 + t_max);
        let atoms: Vec<(f64, f64)> = rule
            .measure
            .atoms()
            .map(|(t, w)| (if t.abs() < zero { 0.0 } else { t }, w))
            .collect();
        let t_measure = AtomicMeasure::from_unsorted(atoms).map_err(wrap)?;
        let sigma = pushforward_sqrt(&t_measure).map_err(wrap)?;
        diags.push(ComponentDiagnostic {
            k,
            l,
            rank: rule.rank,
            nodes: sigma.len(),
            node_at_zero: rule.node_at_zero,
        });
        set.insert(k, l, sigma)?;
    }
    Ok((set, SolveDiagnostics { components: diags }))
}

/// `T(P) = Σ_{k,l} Σ_i w_i p_{k,l}(r_i²)`.
pub fn functional_value(
    cms: &ComponentMeasureSet,
    p: &MultiPoly,
    basis: &SolidHarmonicBasis,
) -> Result<Complex64, CubatureError> {
    cms.check_basis(basis)?;
    let dec = laplace_fourier_decompose(p, basis)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(k, l), poly) in &dec.components {
        let sigma = cms.get(k, l).ok_or(CubatureError::Unrepresented { k, l })?;
        for (r, w) in sigma.atoms() {
            acc += poly.evaluate(r * r) * w;
        }
    }
    Ok(acc)
}

/// Returns `Σ_i w_i r_i^{p}`, or `None` when an atom at zero makes it infinite.
fn radial_power_sum(sigma: &AtomicMeasure, p: i32) -> Option<f64> {
    let mut acc = 0.0;
    for (r, w) in sigma.atoms() {
        if r == 0.0 {
            match p {
                0 => acc += w,
                p if p < 0 => return None,
                _ => {}
            }
        } else {
            acc += w * r.powi(p);
        }
    }
    Some(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentValue {
    pub k: usize,
    pub l: usize,
    /// `∫ r^{-k} dσ_{k,l}`; `None` when infinite.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    /// `C_N = Σ_{k,l} ∫ r^{N-k} dσ_{k,l}` for `N = 0..=N_max`; `None` when infinite.
    pub c_n: Vec<Option<f64>>,
    pub inverse_moments: Vec<ComponentValue>,
    /// Components with `k >= 1` carrying mass at `r = 0`.
    pub node_at_zero: Vec<(usize, usize)>,
    pub divergence_warnings: Vec<String>,
}

impl SummabilityReport {
    /// Applies [`family_divergence`] to the `k`-indexed values of a
    /// closed-form family and records a warning when it diverges.
    pub fn check_family(&mut self, name: &str, values: &[f64]) -> FamilyDivergence {
        let verdict = family_divergence(values);
        if verdict.divergent {
            self.divergence_warnings.push(format!(
                "{name}: Σ_k ∫ r^(-k) dσ_(k,1) diverges (Raabe ratio {:.4} <= 1, partial sum {:.6e} over {} terms)",
                verdict.raabe, verdict.partial_sum, values.len()
            ));
        }
        verdict
    }
}

pub fn summability(cms: &ComponentMeasureSet, n_max: usize) -> SummabilityReport {
    let mut c_n = vec![Some(0.0); n_max + 1];
    let mut inverse_moments = Vec::new();
    let mut node_at_zero = Vec::new();
    for (k, l, sigma) in cms.components() {
        if k >= 1 && sigma.nodes().first() == Some(&0.0) {
            node_at_zero.push((k, l));
        }
        inverse_moments.push(ComponentValue {
            k,
            l,
            value: radial_power_sum(sigma, -(k as i32)),
        });
        for (n, slot) in c_n.iter_mut().enumerate() {
            *slot = match (*slot, radial_power_sum(sigma, n as i32 - k as i32)) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
    }
    SummabilityReport {
        c_n,
        inverse_moments,
        node_at_zero,
        divergence_warnings: Vec::new(),
    }
}

/// Raabe test on the tail of a positive sequence `a_1, a_2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyDivergence {
    pub partial_sum: f64,
    /// `K (a_K / a_{K+1} - 1)` at the last available index.
    pub raabe: f64,
    pub divergent: bool,
}

/// A series whose Raabe ratio stays at or below 1 over the last quarter of
/// the terms is reported divergent.
pub fn family_divergence(values: &[f64]) -> FamilyDivergence {
    let partial_sum = values.iter().sum();
    if values.len() < 8 || values.iter().any(|&v| !(v > 0.0)) {
        return FamilyDivergence {
            partial_sum,
            raabe: f64::NAN,
            divergent: false,
        };
    }
    let raabe_at = |i: usize| (i + 1) as f64 * (values[i] / values[i + 1] - 1.0);
    let last = values.len() - 2;
    let start = values.len() * 3 / 4;
    let divergent = (start..=last).all(|i| raabe_at(i) <= 1.0);
    FamilyDivergence {
        partial_sum,
        raabe: raabe_at(last),
        divergent,
    }
}

/// Points `θ_q` on the unit sphere with weights `ω_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl AngularRule {
    pub fn integrate<F: Fn(&[f64]) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(x))
            .sum()
    }
}

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jm = JacobiMatrix {
        diag: vec![0.0; n],
        offdiag: (1..n)
            .map(|i| {
                let i = i as f64;
                i / (4.0 * i * i - 1.0).sqrt()
            })
            .collect(),
        mass: 2.0,
    };
    let (nodes, first) = tridiagonal_eigen(&jm).expect("Legendre Jacobi matrix converges");
    (nodes, first.iter().map(|z| 2.0 * z * z).collect())
}

/// Rule exact for spherical polynomials of degree `<= degree`.
///
/// `d = 2`: `degree + 1` equispaced angles. `d = 3`: Gauss-Legendre in the
/// polar cosine times the trapezoid rule in azimuth.
pub fn discretize_sphere(d: usize, degree: usize) -> Result<AngularRule, CubatureError> {
    match d {
        1 => Ok(AngularRule {
            points: vec![vec![-1.0], vec![1.0]],
            weights: vec![0.5, 0.5],
        }),
        2 => {
            let m = degree + 1;
            let step = 2.0 * PI / m as f64;
            Ok(AngularRule {
                points: (0..m)
                    .map(|q| {
                        let t = step * q as f64;
                        vec![t.cos(), t.sin()]
                    })
                    .collect(),
                weights: vec![step; m],
            })
        }
        3 => {
            let (zs, wz) = gauss_legendre(degree / 2 + 1);
            let m = degree + 1;
            let step = 2.0 * PI / m as f64;
            let mut points = Vec::with_capacity(zs.len() * m);
            let mut weights = Vec::with_capacity(zs.len() * m);
            for (z, w) in zs.iter().zip(&wz) {
                let s = (1.0 - z * z).max(0.0).sqrt();
                for q in 0..m {
                    let phi = step * q as f64;
                    points.push(vec![s * phi.cos(), s * phi.sin(), *z]);
                    weights.push(w * step);
                }
            }
            Ok(AngularRule { points, weights })
        }
        _ => Err(CubatureError::ShellFormOnly(d)),
    }
}

/// Radial atom of a shell; `w` is the `σ_{k,l}` weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellNode {
    pub r: f64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub k: usize,
    pub l: usize,
    pub nodes: Vec<ShellNode>,
}

impl Shell {
    /// `(r_i, w_i r_i^{-k})`.
    pub fn shell_weights(&self) -> Vec<(f64, f64)> {
        self.nodes
            .iter()
            .map(|n| (n.r, n.w * n.r.powi(-(self.k as i32))))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubaturePoint {
    pub x: Vec<f64>,
    pub w: f64,
}

/// Signed cubature in shell form and, for `d <= 3`, point form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudoCubature {
    pub dimension: usize,
    pub degree: usize,
    /// Harmonic degree bound of the underlying component set.
    #[serde(default)]
    pub k_max: usize,
    pub shells: Vec<Shell>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<CubaturePoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis_fingerprint: Option<String>,
}

impl PseudoCubature {
    pub fn shell_form(cms: &ComponentMeasureSet, degree: usize) -> Self {
        PseudoCubature {
            dimension: cms.dim(),
            degree,
            k_max: cms.k_max(),
            shells: cms
                .components()
                .filter(|(_, _, m)| !m.is_empty())
                .map(|(k, l, m)| Shell {
                    k,
                    l,
                    nodes: m.atoms().map(|(r, w)| ShellNode { r, w }).collect(),
                })
                .collect(),
            points: None,
            basis_fingerprint: Some(cms.fingerprint().to_string()),
        }
    }

    /// Recovers the component measures stored in the shells.
    pub fn component_measures(
        &self,
        basis: &SolidHarmonicBasis,
    ) -> Result<ComponentMeasureSet, CubatureError> {
        if basis.dim() != self.dimension {
            return Err(CubatureError::DimensionMismatch {
                left: self.dimension,
                right: basis.dim(),
            });
        }
        let k_max = self.shells.iter().map(|s| s.k).fold(self.k_max, usize::max);
        let mut set = ComponentMeasureSet::new(basis, k_max)?;
        if let Some(fp) = &self.basis_fingerprint {
            if *fp != set.fingerprint {
                return Err(CubatureError::FingerprintMismatch {
                    measures: fp.clone(),
                    basis: set.fingerprint.clone(),
                });
            }
        }
        for s in &self.shells {
            let sigma = AtomicMeasure::from_unsorted(s.nodes.iter().map(|n| (n.r, n.w)).collect())
                .map_err(|source| CubatureError::Component {
                    k: s.k,
                    l: s.l,
                    source,
                })?;
            set.insert(s.k, s.l, sigma)?;
        }
        Ok(set)
    }

    /// `Σ w(x) P(x)` over the point form.
    pub fn integrate_points(&self, p: &MultiPoly) -> Option<Complex64> {
        self.points
            .as_ref()
            .map(|pts| pts.iter().map(|pt| p.evaluate(&pt.x) * pt.w).sum())
    }

    /// Exact value through the shell form.
    pub fn integrate_shells(
        &self,
        p: &MultiPoly,
        basis: &SolidHarmonicBasis,
    ) -> Result<Complex64, CubatureError> {
        functional_value(&self.component_measures(basis)?, p, basis)
    }
}

/// Signed point rule with `Σ w P(x) = functional_value(cms, P)` for every `P`
/// of total degree `<= degree` whose components lie in `cms`.
///
/// The point `r_i θ_q` of component `(k, l)` gets weight
/// `w_i ω_q Y_{k,l}(θ_q) r_i^{-k}`; the angular rule is exact to degree
/// `degree + k` so the projection onto `Y_{k,l}` is exact.
pub fn point_cubature(
    cms: &ComponentMeasureSet,
    basis: &SolidHarmonicBasis,
    degree: usize,
) -> Result<PseudoCubature, CubatureError> {
    cms.check_basis(basis)?;
    let rule = discretize_sphere(cms.dim(), degree + cms.max_k())?;
    let mut merged: BTreeMap<(u64, usize), f64> = BTreeMap::new();
    let mut origin = 0.0;
    for (k, l, sigma) in cms.components() {
        let y = basis.get(k, l)?;
        let y_at: Vec<f64> = rule.points.iter().map(|th| y.evaluate(th).re).collect();
        for (r, w) in sigma.atoms() {
            if r == 0.0 {
                if k >= 1 {
                    return Err(CubatureError::NodeAtZero { k, l });
                }
                origin += w * rule
                    .weights
                    .iter()
                    .zip(&y_at)
                    .map(|(o, y)| o * y)
                    .sum::<f64>();
                continue;
            }
            let scale = w * r.powi(-(k as i32));
            for (q, (o, yv)) in rule.weights.iter().zip(&y_at).enumerate() {
                *merged.entry((r.to_bits(), q)).or_insert(0.0) += scale * o * yv;
            }
        }
    }
    let mut points: Vec<CubaturePoint> = merged
        .into_iter()
        .filter(|(_, w)| *w != 0.0)
        .map(|((rb, q), w)| {
            let r = f64::from_bits(rb);
            CubaturePoint {
                x: rule.points[q].iter().map(|c| r * c).collect(),
                w,
            }
        })
        .collect();
    if origin != 0.0 {
        points.insert(
            0,
            CubaturePoint {
                x: vec![0.0; cms.dim()],
                w: origin,
            },
        );
    }
    let mut out = PseudoCubature::shell_form(cms, degree);
    out.points = Some(points);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Representability {
    Ok,
    Rejected { k: usize, l: usize, reason: String },
}

/// Rejects mass at `r <= tolerance` in any component with `k >= 1`, where
/// `∫ r^{-k} dσ_{k,l}` is infinite.
pub fn representability_check(cms: &ComponentMeasureSet, tolerance: f64) -> Representability {
    for (k, l, sigma) in cms.components() {
        if k >= 1 && sigma.atoms().any(|(r, w)| r <= tolerance && w > 0.0) {
            return Representability::Rejected {
                k,
                l,
                reason: format!("mass at r=0 in component ({k},{l})"),
            };
        }
    }
    Representability::Ok
}
