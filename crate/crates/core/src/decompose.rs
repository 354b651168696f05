//! Gauss (Laplace-Fourier) decomposition `P = Σ p_{k,l}(|x|²) Y_{k,l}(x)`,
//! distributed and monomial moment tables, conversion between them, and the
//! pseudo-positive-definiteness test.
//!
//! The coefficient `f_{k,l}(r) = ∫ P(rθ) Y_{k,l}(θ) dθ` of a polynomial is
//! `Σ_m r^m ⟨P_m, Y_{k,l}⟩` over the homogeneous parts `P_m`; it equals
//! `r^k p_{k,l}(r²)`, so only `m = k, k+2, k+4, ...` may contribute.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harmonics::{HarmonicsError, SolidHarmonicBasis};
use crate::linalg::{psd_check, PsdOutcome};
use crate::polycore::{
    homogeneous_parts, monomials_up_to, sphere_inner_product, Monomial, MultiPoly, PolyError,
    UniPoly,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("basis too shallow: polynomial degree {degree} exceeds k_max {k_max}")]
    BasisTooShallow { degree: usize, k_max: usize },
    #[error(
        "non-polynomial component at (k={k}, l={l}): r^{m} coefficient {value:.3e} violates parity"
    )]
    NonPolynomialComponent {
        k: usize,
        l: usize,
        m: usize,
        value: f64,
    },
    #[error("table too small: component (k={k}, l={l}) needs t^{j}, table has k_max {k_max} and j <= {j_max}")]
    TableTooSmall {
        j: usize,
        k: usize,
        l: usize,
        k_max: usize,
        j_max: usize,
    },
    #[error("monomial table degree {have} is below the required {need}")]
    InsufficientDegree { have: usize, need: usize },
    #[error("basis fingerprint mismatch (table {table}, basis {basis})")]
    FingerprintMismatch { table: String, basis: String },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("incomplete index set: missing {0}")]
    IncompleteIndexSet(String),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `(k, l)` index of a solid harmonic, `l` 1-based.
pub type ComponentIndex = (usize, usize);

/// The univariate polynomials `p_{k,l}` of a Gauss decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct LFDecomposition {
    pub dim: usize,
    pub components: BTreeMap<ComponentIndex, UniPoly>,
}

impl LFDecomposition {
    pub fn empty(dim: usize) -> Self {
        LFDecomposition {
            dim,
            components: BTreeMap::new(),
        }
    }

    pub fn component(&self, k: usize, l: usize) -> Option<&UniPoly> {
        self.components.get(&(k, l))
    }

    /// `f_{k,l}(r) = r^k p_{k,l}(r²)`.
    pub fn fourier_coefficient(&self, k: usize, l: usize, r: f64) -> Complex64 {
        self.component(k, l).map_or(Complex64::new(0.0, 0.0), |p| {
            p.evaluate(r * r) * r.powi(k as i32)
        })
    }
}

/// Component coefficients below this fraction of the largest homogeneous
/// part are roundoff from the sphere integrals and are dropped.
const CLEAN_EPS: f64 = 1e-11;

fn ensure_depth(p: &MultiPoly, basis: &SolidHarmonicBasis) -> Result<(), DecomposeError> {
    if p.dim() != basis.dim() {
        return Err(DecomposeError::DimensionMismatch {
            left: p.dim(),
            right: basis.dim(),
        });
    }
    let deg = p.degree().max(0) as usize;
    // d = 1 only has harmonics of degree 0 and 1.
    let complete = if basis.dim() == 1 {
        basis.k_max() >= 1
    } else {
        false
    };
    if deg > basis.k_max() && !complete {
        return Err(DecomposeError::BasisTooShallow {
            degree: deg,
            k_max: basis.k_max(),
        });
    }
    Ok(())
}

/// Computes `p_{k,l}` for every `(k, l)` with a nonzero component.
pub fn laplace_fourier_decompose(
    p: &MultiPoly,
    basis: &SolidHarmonicBasis,
) -> Result<LFDecomposition, DecomposeError> {
    ensure_depth(p, basis)?;
    let mut out = LFDecomposition::empty(p.dim());
    if p.is_zero() {
        return Ok(out);
    }
    let parts = homogeneous_parts(p);
    let norms: Vec<f64> = parts
        .iter()
        .map(|part| Ok(sphere_inner_product(part, part)?.re.sqrt()))
        .collect::<Result<_, PolyError>>()?;
    let scale = norms
        .iter()
        .fold(0.0f64, |a, &b| a.max(b))
        .max(f64::MIN_POSITIVE);
    let top = parts.len() - 1;

    for (k, l, y) in basis.iter() {
        if k > top {
            break;
        }
        let mut coeffs = Vec::new();
        for (m, part) in parts.iter().enumerate() {
            if part.is_zero() {
                if m >= k && (m - k) % 2 == 0 {
                    coeffs.push(Complex64::new(0.0, 0.0));
                }
                continue;
            }
            let v = sphere_inner_product(part, y)?;
            if m >= k && (m - k) % 2 == 0 {
                coeffs.push(v);
            } else if v.norm() > 1e-10 * scale {
                return Err(DecomposeError::NonPolynomialComponent {
                    k,
                    l,
                    m,
                    value: v.norm(),
                });
            }
        }
        let cleaned: Vec<Complex64> = coeffs
            .into_iter()
            .map(|c| {
                if c.norm() <= CLEAN_EPS * scale {
                    Complex64::new(0.0, 0.0)
                } else {
                    c
                }
            })
            .collect();
        let poly = UniPoly::new(cleaned);
        if !poly.is_zero() {
            out.components.insert((k, l), poly);
        }
    }
    Ok(out)
}

/// `Σ p_{k,l}(|x|²) Y_{k,l}(x)` as an explicit polynomial.
pub fn reconstruct(
    dec: &LFDecomposition,
    basis: &SolidHarmonicBasis,
) -> Result<MultiPoly, DecomposeError> {
    if dec.dim != basis.dim() {
        return Err(DecomposeError::DimensionMismatch {
            left: dec.dim,
            right: basis.dim(),
        });
    }
    let mut out = MultiPoly::zero(dec.dim);
    let mut radial = vec![MultiPoly::one(dec.dim)];
    for (&(k, l), p) in &dec.components {
        let y = basis.get(k, l)?;
        while radial.len() < p.coeffs().len() {
            let next = &radial[radial.len() - 1] * &MultiPoly::radius_power(dec.dim, 1);
            radial.push(next);
        }
        let mut q = MultiPoly::zero(dec.dim);
        for (j, c) in p.coeffs().iter().enumerate() {
            q = &q + &radial[j].scale(*c);
        }
        out = &out + &(&q * y);
    }
    Ok(out)
}

/// Distributed moments `c_{j,k,l}` for `0 <= j <= 2n`, `0 <= k <= k_max`,
/// `1 <= l <= a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributedMomentTable {
    dim: usize,
    k_max: usize,
    order: usize,
    fingerprint: String,
    /// `values[k][l-1][j]`
    values: Vec<Vec<Vec<f64>>>,
}

impl DistributedMomentTable {
    /// Builds a complete table from `f(j, k, l)`; the basis fixes the index
    /// set and the fingerprint.
    pub fn from_fn<F>(
        basis: &SolidHarmonicBasis,
        order: usize,
        k_max: usize,
        mut f: F,
    ) -> Result<Self, DecomposeError>
    where
        F: FnMut(usize, usize, usize) -> f64,
    {
        if k_max > basis.k_max() {
            return Err(DecomposeError::InvalidTable(format!(
                "table k_max {k_max} exceeds basis k_max {}",
                basis.k_max()
            )));
        }
        let mut values = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let mut level = Vec::with_capacity(basis.count(k));
            for l in 1..=basis.count(k) {
                let col: Vec<f64> = (0..=2 * order).map(|j| f(j, k, l)).collect();
                if let Some(bad) = col.iter().find(|v| !v.is_finite()) {
                    return Err(DecomposeError::InvalidTable(format!(
                        "non-finite entry {bad} at (k={k}, l={l})"
                    )));
                }
                level.push(col);
            }
            values.push(level);
        }
        Ok(DistributedMomentTable {
            dim: basis.dim(),
            k_max,
            order,
            fingerprint: basis
                .fingerprint_upto(k_max)
                .expect("k_max within basis")
                .to_string(),
            values,
        })
    }

    /// Assembles a table from raw entries; every index must be present
    /// exactly once.
    pub fn from_entries(
        dim: usize,
        k_max: usize,
        order: usize,
        fingerprint: String,
        entries: &[(usize, usize, usize, f64)],
    ) -> Result<Self, DecomposeError> {
        if dim == 0 {
            return Err(DecomposeError::InvalidTable(
                "dimension must be >= 1".into(),
            ));
        }
        let counts: Vec<usize> = (0..=k_max)
            .map(|k| crate::harmonics::harmonic_dimension(dim, k))
            .collect();
        let mut slots: Vec<Vec<Vec<Option<f64>>>> = counts
            .iter()
            .map(|&a| vec![vec![None; 2 * order + 1]; a])
            .collect();
        for &(j, k, l, v) in entries {
            if k > k_max || l == 0 || l > counts[k] || j > 2 * order {
                return Err(DecomposeError::InvalidTable(format!(
                    "entry (j={j}, k={k}, l={l}) outside the index set"
                )));
            }
            if !v.is_finite() {
                return Err(DecomposeError::InvalidTable(format!(
                    "non-finite value at (j={j}, k={k}, l={l})"
                )));
            }
            let slot = &mut slots[k][l - 1][j];
            if slot.is_some() {
                return Err(DecomposeError::InvalidTable(format!(
                    "duplicate entry (j={j}, k={k}, l={l})"
                )));
            }
            *slot = Some(v);
        }
        let mut values = Vec::with_capacity(k_max + 1);
        for (k, level) in slots.into_iter().enumerate() {
            let mut out_level = Vec::with_capacity(level.len());
            for (li, col) in level.into_iter().enumerate() {
                let mut out_col = Vec::with_capacity(col.len());
                for (j, v) in col.into_iter().enumerate() {
                    match v {
                        Some(v) => out_col.push(v),
                        None => {
                            return Err(DecomposeError::IncompleteIndexSet(format!(
                                "(j={j}, k={k}, l={})",
                                li + 1
                            )))
                        }
                    }
                }
                out_level.push(out_col);
            }
            values.push(out_level);
        }
        Ok(DistributedMomentTable {
            dim,
            k_max,
            order,
            fingerprint,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn get(&self, j: usize, k: usize, l: usize) -> Option<f64> {
        self.values.get(k)?.get(l.checked_sub(1)?)?.get(j).copied()
    }

    /// The sequence `c_{0,k,l}, ..., c_{2n,k,l}`.
    pub fn component(&self, k: usize, l: usize) -> Option<&[f64]> {
        Some(self.values.get(k)?.get(l.checked_sub(1)?)?.as_slice())
    }

    /// Iterates `(k, l, c_{·,k,l})` in index order.
    pub fn components(&self) -> impl Iterator<Item = (usize, usize, &[f64])> {
        self.values.iter().enumerate().flat_map(|(k, level)| {
            level
                .iter()
                .enumerate()
                .map(move |(i, col)| (k, i + 1, col.as_slice()))
        })
    }

    /// Entries `(j, k, l, value)` in index order.
    pub fn entries(&self) -> Vec<(usize, usize, usize, f64)> {
        self.components()
            .flat_map(|(k, l, col)| col.iter().enumerate().map(move |(j, &v)| (j, k, l, v)))
            .collect()
    }

    /// Checks that this table was produced with `basis`.
    pub fn check_basis(&self, basis: &SolidHarmonicBasis) -> Result<(), DecomposeError> {
        if basis.dim() != self.dim {
            return Err(DecomposeError::DimensionMismatch {
                left: self.dim,
                right: basis.dim(),
            });
        }
        let expected = basis.fingerprint_upto(self.k_max);
        if expected != Some(self.fingerprint.as_str()) {
            return Err(DecomposeError::FingerprintMismatch {
                table: self.fingerprint.clone(),
                basis: expected.unwrap_or("<basis too shallow>").to_string(),
            });
        }
        Ok(())
    }
}

/// Monomial moments `m_α = ∫ x^α dμ` for `|α| <= D`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMomentTable {
    dim: usize,
    degree: usize,
    values: BTreeMap<Monomial, f64>,
}

impl MonomialMomentTable {
    pub fn from_fn<F: FnMut(&[u32]) -> f64>(dim: usize, degree: usize, mut f: F) -> Self {
        let values = monomials_up_to(dim, degree as u32)
            .into_iter()
            .map(|m| {
                let v = f(m.exponents());
                (m, v)
            })
            .collect();
        MonomialMomentTable {
            dim,
            degree,
            values,
        }
    }

    /// Requires every `α` with `|α| <= degree` exactly once.
    pub fn from_entries(
        dim: usize,
        degree: usize,
        entries: Vec<(Vec<u32>, f64)>,
    ) -> Result<Self, DecomposeError> {
        let mut values = BTreeMap::new();
        for (alpha, v) in entries {
            if alpha.len() != dim || alpha.iter().sum::<u32>() as usize > degree {
                return Err(DecomposeError::InvalidTable(format!(
                    "multi-index {alpha:?} outside the index set"
                )));
            }
            if !v.is_finite() {
                return Err(DecomposeError::InvalidTable(format!(
                    "non-finite value at {alpha:?}"
                )));
            }
            if values.insert(Monomial::new(alpha.clone()), v).is_some() {
                return Err(DecomposeError::InvalidTable(format!(
                    "duplicate multi-index {alpha:?}"
                )));
            }
        }
        for m in monomials_up_to(dim, degree as u32) {
            if !values.contains_key(&m) {
                return Err(DecomposeError::IncompleteIndexSet(format!(
                    "{:?}",
                    m.exponents()
                )));
            }
        }
        Ok(MonomialMomentTable {
            dim,
            degree,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, alpha: &[u32]) -> Option<f64> {
        self.values.get(&Monomial::new(alpha.to_vec())).copied()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.values.iter().map(|(m, &v)| (m.exponents(), v))
    }

    /// `∫ P dμ` for `deg P <= D`.
    pub fn integrate(&self, p: &MultiPoly) -> Option<Complex64> {
        p.terms()
            .map(|(m, c)| self.values.get(m).map(|v| c * v))
            .sum()
    }
}

/// `T(P) = Σ_{k,l} Σ_j [p_{k,l}]_j c_{j,k,l}`.
pub fn apply_functional(
    tbl: &DistributedMomentTable,
    p: &MultiPoly,
    basis: &SolidHarmonicBasis,
) -> Result<Complex64, DecomposeError> {
    tbl.check_basis(basis)?;
    let dec = laplace_fourier_decompose(p, basis)?;
    let j_max = 2 * tbl.order;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&(k, l), poly) in &dec.components {
        let col = tbl.component(k, l);
        for (j, c) in poly.coeffs().iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            match col.and_then(|col| col.get(j)) {
                Some(v) => acc += c * v,
                None => {
                    return Err(DecomposeError::TableTooSmall {
                        j,
                        k,
                        l,
                        k_max: tbl.k_max,
                        j_max,
                    })
                }
            }
        }
    }
    Ok(acc)
}

/// `c_{j,k,l} = Σ_α [|x|^{2j} Y_{k,l}]_α m_α`.
///
/// Needs monomials up to degree `4n + k_0` (restricted to degrees that carry
/// harmonics).
pub fn distributed_from_monomial(
    m: &MonomialMomentTable,
    basis: &SolidHarmonicBasis,
    order: usize,
    k_max: usize,
) -> Result<DistributedMomentTable, DecomposeError> {
    if m.dim != basis.dim() {
        return Err(DecomposeError::DimensionMismatch {
            left: m.dim,
            right: basis.dim(),
        });
    }
    let top_k = (0..=k_max.min(basis.k_max()))
        .filter(|&k| basis.count(k) > 0)
        .max()
        .unwrap_or(0);
    let need = 4 * order + top_k;
    if m.degree < need {
        return Err(DecomposeError::InsufficientDegree {
            have: m.degree,
            need,
        });
    }
    let radial: Vec<MultiPoly> = (0..=2 * order)
        .map(|j| MultiPoly::radius_power(basis.dim(), j as u32))
        .collect();
    let mut err = None;
    let tbl = DistributedMomentTable::from_fn(basis, order, k_max, |j, k, l| {
        let y = basis.get(k, l).expect("index from basis");
        let q = &radial[j] * y;
        match m.integrate(&q) {
            Some(v) => v.re,
            None => {
                err = Some(DecomposeError::InsufficientDegree {
                    have: m.degree,
                    need: q.degree() as usize,
                });
                0.0
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(tbl),
    }
}

/// `m_α = T(x^α)` for `|α| <= degree`.
pub fn monomial_from_distributed(
    tbl: &DistributedMomentTable,
    basis: &SolidHarmonicBasis,
    degree: usize,
) -> Result<MonomialMomentTable, DecomposeError> {
    tbl.check_basis(basis)?;
    let mut entries = Vec::new();
    for m in monomials_up_to(tbl.dim, degree as u32) {
        let p = MultiPoly::monomial(m.clone(), Complex64::new(1.0, 0.0));
        let v = apply_functional(tbl, &p, basis)?;
        entries.push((m.exponents().to_vec(), v.re));
    }
    MonomialMomentTable::from_entries(tbl.dim, degree, entries)
}

/// Which Hankel matrix of a component failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HankelKind {
    /// `(c_{i+j})_{0<=i,j<=n}`, i.e. `T_{k,l}(p* p) >= 0`.
    Plain,
    /// `(c_{i+j+1})_{0<=i,j<=n-1}`, i.e. `T_{k,l}(t p* p) >= 0`.
    Shifted,
}

/// Numerical ranks of both Hankel matrices of a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentRank {
    pub k: usize,
    pub l: usize,
    pub plain_rank: usize,
    pub shifted_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum PseudoPdVerdict {
    Pass {
        ranks: Vec<ComponentRank>,
    },
    /// `witness` holds the coefficients of `p` with `T_{k,l}(p* p) < 0`
    /// (or `T_{k,l}(t p* p) < 0` for the shifted matrix).
    Fail {
        k: usize,
        l: usize,
        matrix: HankelKind,
        witness: Vec<f64>,
        value: f64,
    },
}

impl PseudoPdVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, PseudoPdVerdict::Pass { .. })
    }
}

/// Default relative tolerance of the Hankel PSD tests.
pub const PSD_EPS: f64 = 1e-10;

pub fn is_pseudo_positive_definite(tbl: &DistributedMomentTable) -> PseudoPdVerdict {
    is_pseudo_positive_definite_with(tbl, PSD_EPS)
}

/// Both Hankel matrices of every component must be PSD within `eps`.
///
/// A component whose every entry is at most `eps` times the largest entry
/// of the same order `j` across all components is read as zero: tables
/// converted from monomial moments carry sphere-integral roundoff in
/// components that vanish exactly.
pub fn is_pseudo_positive_definite_with(tbl: &DistributedMomentTable, eps: f64) -> PseudoPdVerdict {
    let n = tbl.order;
    let floor: Vec<f64> = (0..=2 * n)
        .map(|j| {
            eps * tbl
                .components()
                .fold(0.0f64, |m, (_, _, c)| m.max(c[j].abs()))
        })
        .collect();
    let mut ranks = Vec::new();
    for (k, l, c) in tbl.components() {
        if c.iter().zip(&floor).all(|(v, f)| v.abs() <= *f) {
            ranks.push(ComponentRank {
                k,
                l,
                plain_rank: 0,
                shifted_rank: 0,
            });
            continue;
        }
        let plain: Vec<Vec<f64>> = (0..=n)
            .map(|i| (0..=n).map(|j| c[i + j]).collect())
            .collect();
        let shifted: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| c[i + j + 1]).collect())
            .collect();
        let plain_rank = match psd_check(&plain, eps) {
            PsdOutcome::Psd { rank } => rank,
            PsdOutcome::Indefinite { witness, value } => {
                return PseudoPdVerdict::Fail {
                    k,
                    l,
                    matrix: HankelKind::Plain,
                    witness,
                    value,
                }
            }
        };
        let shifted_rank = match psd_check(&shifted, eps) {
            PsdOutcome::Psd { rank } => rank,
            PsdOutcome::Indefinite { witness, value } => {
                return PseudoPdVerdict::Fail {
                    k,
                    l,
                    matrix: HankelKind::Shifted,
                    witness,
                    value,
                }
            }
        };
        ranks.push(ComponentRank {
            k,
            l,
            plain_rank,
            shifted_rank,
        });
    }
    PseudoPdVerdict::Pass { ranks }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ClassicalVerdict {
    Pass {
        rank: usize,
    },
    /// `witness[i]` multiplies `x^{monomials[i]}`.
    Fail {
        monomials: Vec<Vec<u32>>,
        witness: Vec<f64>,
        value: f64,
    },
}

impl ClassicalVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, ClassicalVerdict::Pass { .. })
    }
}

/// PSD test of the moment matrix `(m_{α+β})` over `|α|, |β| <= n`.
pub fn is_positive_definite_classical(
    m: &MonomialMomentTable,
    n: usize,
) -> Result<ClassicalVerdict, DecomposeError> {
    if m.degree < 2 * n {
        return Err(DecomposeError::InsufficientDegree {
            have: m.degree,
            need: 2 * n,
        });
    }
    let index = monomials_up_to(m.dim, n as u32);
    let mat: Vec<Vec<f64>> = index
        .iter()
        .map(|a| {
            index
                .iter()
                .map(|b| {
                    let sum: Vec<u32> = a
                        .exponents()
                        .iter()
                        .zip(b.exponents())
                        .map(|(x, y)| x + y)
                        .collect();
                    m.get(&sum).expect("complete table")
                })
                .collect()
        })
        .collect();
    Ok(match psd_check(&mat, PSD_EPS) {
        PsdOutcome::Psd { rank } => ClassicalVerdict::Pass { rank },
        PsdOutcome::Indefinite { witness, value } => ClassicalVerdict::Fail {
            monomials: index.iter().map(|a| a.exponents().to_vec()).collect(),
            witness,
            value,
        },
    })
}
