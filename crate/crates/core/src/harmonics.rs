//! Orthonormal solid harmonics `Y_{k,l}` in any dimension.
//!
//! For `d >= 3` the harmonic polynomials of degree `k` are generated from the
//! decomposition `h = Σ_j x_1^j q_j(x_2, ..., x_d)`: `Δh = 0` forces
//! `q_{j+2} = -Δ' q_j / ((j+2)(j+1))`, so `h` is fixed by a free choice of
//! `q_0` (degree `k`) and `q_1` (degree `k-1`). Each monomial choice of
//! `q_0` or `q_1` gives one kernel vector of the Laplacian; these are
//! orthonormalized by modified Gram-Schmidt (two passes) under the sphere
//! inner product: `q_0` seeds first, then `q_1` seeds, each in graded-lex
//! order.
//!
//! `d = 1` uses `{1, x}` and `d = 2` uses `r^k cos kt / √π`,
//! `r^k sin kt / √π` and the constant `1/√(2π)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::polycore::{
    gamma_half_integer, homogeneous_parts, monomials_of_degree, sphere_inner_product, Monomial,
    MultiPoly, PolyError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarmonicsError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("Gram-Schmidt lost rank at degree {k} (residual norm {residual:.3e})")]
    RankLoss { k: usize, residual: f64 },
    #[error("harmonic index (k={k}, l={l}) out of range")]
    IndexOutOfRange { k: usize, l: usize },
    #[error("point has dimension {got}, basis has dimension {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("invalid basis JSON: {0}")]
    InvalidJson(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// `a_k = dim H_k(R^d)`.
pub fn harmonic_dimension(d: usize, k: usize) -> usize {
    assert!(d >= 1, "dimension must be at least 1");
    if d == 1 {
        return usize::from(k <= 1);
    }
    let (d, k) = (d as u64, k as u64);
    let all = binomial(k + d - 1, d - 1);
    let lower = if k >= 2 {
        binomial(k + d - 3, d - 1)
    } else {
        0
    };
    (all - lower) as usize
}

/// Surface area `ω_{d-1} = 2 π^{d/2} / Γ(d/2)` of `S^{d-1}`.
///
/// For `d = 1` this returns `1`, the total mass of the normalized two-point
/// measure on `{-1, 1}`.
pub fn surface_area(d: usize) -> f64 {
    assert!(d >= 1, "dimension must be at least 1");
    if d == 1 {
        return 1.0;
    }
    2.0 * PI.powf(d as f64 / 2.0) / gamma_half_integer(d as u32)
}

/// Orthonormal basis of solid harmonics up to degree `k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolidHarmonicBasis {
    dim: usize,
    k_max: usize,
    harmonics: Vec<Vec<MultiPoly>>,
    surface_area: f64,
    fingerprints: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct BasisJson {
    dimension: usize,
    k_max: usize,
    surface_area: f64,
    harmonics: Vec<HarmonicJson>,
}

#[derive(Serialize, Deserialize)]
struct HarmonicJson {
    k: usize,
    l: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exponents: Vec<u32>,
    coeff: f64,
}

impl SolidHarmonicBasis {
    pub fn build(d: usize, k_max: usize) -> Result<Self, HarmonicsError> {
        if d == 0 {
            return Err(HarmonicsError::ZeroDimension);
        }
        let mut harmonics = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let level = match d {
                1 => basis_d1(k),
                2 => basis_d2(k),
                _ => basis_general(d, k)?,
            };
            debug_assert_eq!(level.len(), harmonic_dimension(d, k));
            harmonics.push(level);
        }
        Ok(Self::assemble(d, k_max, harmonics))
    }

    fn assemble(dim: usize, k_max: usize, harmonics: Vec<Vec<MultiPoly>>) -> Self {
        let mut basis = SolidHarmonicBasis {
            dim,
            k_max,
            harmonics,
            surface_area: surface_area(dim),
            fingerprints: Vec::new(),
        };
        basis.fingerprints = (0..=k_max)
            .map(|k| {
                let digest = Sha256::digest(basis.json_upto(k).as_bytes());
                hex::encode(digest)
            })
            .collect();
        basis
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn surface_area(&self) -> f64 {
        self.surface_area
    }

    /// Number of basis elements `a_k` at degree `k` (0 beyond `k_max`).
    pub fn count(&self, k: usize) -> usize {
        self.harmonics.get(k).map_or(0, Vec::len)
    }

    /// `Y_{k,l}` with 1-based `l`.
    pub fn get(&self, k: usize, l: usize) -> Result<&MultiPoly, HarmonicsError> {
        if l == 0 {
            return Err(HarmonicsError::IndexOutOfRange { k, l });
        }
        self.harmonics
            .get(k)
            .and_then(|level| level.get(l - 1))
            .ok_or(HarmonicsError::IndexOutOfRange { k, l })
    }

    /// Iterates `(k, l, Y_{k,l})` in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &MultiPoly)> {
        self.harmonics
            .iter()
            .enumerate()
            .flat_map(|(k, level)| level.iter().enumerate().map(move |(i, y)| (k, i + 1, y)))
    }

    /// Fingerprint of the basis restricted to degrees `0..=k`.
    ///
    /// The construction is degree-local, so a deeper basis agrees with a
    /// shallower one on their common degrees and shares these fingerprints.
    pub fn fingerprint_upto(&self, k: usize) -> Option<&str> {
        self.fingerprints.get(k).map(String::as_str)
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprints[self.k_max]
    }

    pub fn to_json(&self) -> String {
        self.json_upto(self.k_max)
    }

    fn json_upto(&self, k_top: usize) -> String {
        let harmonics = self
            .iter()
            .filter(|(k, _, _)| *k <= k_top)
            .map(|(k, l, y)| HarmonicJson {
                k,
                l,
                terms: y
                    .terms()
                    .map(|(m, c)| TermJson {
                        exponents: m.exponents().to_vec(),
                        coeff: c.re,
                    })
                    .collect(),
            })
            .collect();
        let doc = BasisJson {
            dimension: self.dim,
            k_max: k_top,
            surface_area: self.surface_area,
            harmonics,
        };
        serde_json::to_string(&doc).expect("basis serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self, HarmonicsError> {
        let doc: BasisJson =
            serde_json::from_str(text).map_err(|e| HarmonicsError::InvalidJson(e.to_string()))?;
        if doc.dimension == 0 {
            return Err(HarmonicsError::ZeroDimension);
        }
        let mut harmonics: Vec<Vec<MultiPoly>> = vec![Vec::new(); doc.k_max + 1];
        for h in doc.harmonics {
            if h.k > doc.k_max || h.l != harmonics[h.k].len() + 1 {
                return Err(HarmonicsError::InvalidJson(format!(
                    "unexpected entry (k={}, l={})",
                    h.k, h.l
                )));
            }
            let y = MultiPoly::from_terms(
                doc.dimension,
                h.terms
                    .into_iter()
                    .map(|t| (t.exponents, Complex64::new(t.coeff, 0.0))),
            )?;
            harmonics[h.k].push(y);
        }
        for (k, level) in harmonics.iter().enumerate() {
            if level.len() != harmonic_dimension(doc.dimension, k) {
                return Err(HarmonicsError::InvalidJson(format!(
                    "degree {k} has {} elements, expected {}",
                    level.len(),
                    harmonic_dimension(doc.dimension, k)
                )));
            }
        }
        Ok(Self::assemble(doc.dimension, doc.k_max, harmonics))
    }
}

/// `Y_{k,l}(x)`.
pub fn evaluate_harmonic(
    basis: &SolidHarmonicBasis,
    k: usize,
    l: usize,
    x: &[f64],
) -> Result<f64, HarmonicsError> {
    let y = basis.get(k, l)?;
    if x.len() != basis.dim {
        return Err(HarmonicsError::PointDimension {
            expected: basis.dim,
            got: x.len(),
        });
    }
    Ok(y.evaluate(x).re)
}

fn real(c: f64) -> Complex64 {
    Complex64::new(c, 0.0)
}

fn basis_d1(k: usize) -> Vec<MultiPoly> {
    match k {
        0 => vec![MultiPoly::one(1)],
        1 => vec![MultiPoly::var(1, 0)],
        _ => Vec::new(),
    }
}

fn basis_d2(k: usize) -> Vec<MultiPoly> {
    if k == 0 {
        return vec![MultiPoly::constant(2, real(1.0 / (2.0 * PI).sqrt()))];
    }
    // (x + i y)^k = Σ_j C(k,j) x^{k-j} (iy)^j
    let mut re = MultiPoly::zero(2);
    let mut im = MultiPoly::zero(2);
    let norm = 1.0 / PI.sqrt();
    for j in 0..=k {
        let b = binomial(k as u64, j as u64) as f64 * norm;
        let m = Monomial::new(vec![(k - j) as u32, j as u32]);
        match j % 4 {
            0 => re.add_term(m, real(b)),
            1 => im.add_term(m, real(b)),
            2 => re.add_term(m, real(-b)),
            _ => im.add_term(m, real(-b)),
        }
    }
    vec![re, im]
}

fn basis_general(d: usize, k: usize) -> Result<Vec<MultiPoly>, HarmonicsError> {
    let mut kernel = Vec::new();
    for m in monomials_of_degree(d - 1, k as u32) {
        kernel.push(harmonic_from_seed(d, k, &m, 0));
    }
    if k >= 1 {
        for m in monomials_of_degree(d - 1, k as u32 - 1) {
            kernel.push(harmonic_from_seed(d, k, &m, 1));
        }
    }
    orthonormalize(kernel, k)
}

/// Harmonic `h = Σ_j x_1^j q_j` with `q_start` the monomial `seed` in
/// `x_2..x_d` and the other free part zero.
fn harmonic_from_seed(d: usize, k: usize, seed: &Monomial, start: usize) -> MultiPoly {
    let mut q = MultiPoly::monomial(seed.clone(), real(1.0));
    let mut h = MultiPoly::zero(d);
    let mut j = start;
    loop {
        for (m, c) in q.terms() {
            let mut e = Vec::with_capacity(d);
            e.push(j as u32);
            e.extend_from_slice(m.exponents());
            h.add_term(Monomial::new(e), *c);
        }
        if j + 2 > k {
            break;
        }
        let factor = -1.0 / ((j + 2) * (j + 1)) as f64;
        q = q.laplacian().scale(real(factor));
        if q.is_zero() {
            break;
        }
        j += 2;
    }
    h
}

fn orthonormalize(vectors: Vec<MultiPoly>, k: usize) -> Result<Vec<MultiPoly>, HarmonicsError> {
    let mut out: Vec<MultiPoly> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let start_norm = sphere_inner_product(&v, &v)?.re.sqrt();
        let mut w = v;
        for _pass in 0..2 {
            for q in &out {
                let proj = sphere_inner_product(&w, q)?.re;
                w = &w - &q.scale(real(proj));
            }
        }
        let norm = sphere_inner_product(&w, &w)?.re.sqrt();
        if !(norm > 1e-10 * start_norm) {
            return Err(HarmonicsError::RankLoss {
                k,
                residual: norm / start_norm,
            });
        }
        // Drop round-off residue so coefficients stay exactly structured.
        let w = w.scale(real(1.0 / norm)).pruned(1e-15);
        out.push(w);
    }
    Ok(out)
}

/// Checks the homogeneity `Y(r θ) = r^k Y(θ)` by splitting into homogeneous
/// parts; every part except degree `k` must vanish.
pub fn is_homogeneous_of_degree(p: &MultiPoly, k: usize) -> bool {
    homogeneous_parts(p)
        .iter()
        .enumerate()
        .all(|(m, part)| m == k || part.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_examples() {
        assert_eq!(harmonic_dimension(2, 3), 2);
        assert_eq!(harmonic_dimension(1, 0), 1);
        assert_eq!(harmonic_dimension(1, 1), 1);
        assert_eq!(harmonic_dimension(1, 2), 0);
        assert_eq!(harmonic_dimension(4, 2), 9);
        assert_eq!(harmonic_dimension(3, 4), 9);
        assert_eq!(harmonic_dimension(2, 0), 1);
    }

    #[test]
    fn harmonic_dimension_is_laplacian_nullity() {
        // nullity of Δ : P_k -> P_{k-2} (Δ is onto) = dim P_k - dim P_{k-2}
        for d in 2..=5 {
            for k in 0..=6u32 {
                let top = monomials_of_degree(d, k).len();
                let low = if k >= 2 {
                    monomials_of_degree(d, k - 2).len()
                } else {
                    0
                };
                assert_eq!(harmonic_dimension(d, k as usize), top - low);
            }
        }
    }

    #[test]
    fn surface_area_examples() {
        assert!((surface_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((surface_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((surface_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn surface_area_matches_slice_recursion() {
        // ω_{d-1} = ω_{d-2} ∫_{-1}^{1} (1-t²)^{(d-3)/2} dt, i.e. ω_{d-1} = ω_{d-2} B(1/2,(d-1)/2)
        let mut prev = 2.0 * PI;
        for d in 3..=8 {
            let beta = gamma_half_integer(1) * gamma_half_integer(d as u32 - 1)
                / gamma_half_integer(d as u32);
            let next = prev * beta;
            assert!((surface_area(d) - next).abs() < 1e-12 * next, "d={d}");
            prev = next;
        }
    }

    #[test]
    fn d2_examples() {
        let b = SolidHarmonicBasis::build(2, 3).unwrap();
        let y11 = b.get(1, 1).unwrap();
        assert!((y11.coeff(&[1, 0]).re - 1.0 / PI.sqrt()).abs() < 1e-15);
        let y12 = b.get(1, 2).unwrap();
        assert!((y12.coeff(&[0, 1]).re - 1.0 / PI.sqrt()).abs() < 1e-15);
        let v = evaluate_harmonic(&b, 2, 1, &[1.0, 0.0]).unwrap();
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-15);
        let y0 = b.get(0, 1).unwrap();
        assert!((y0.coeff(&[0, 0]).re - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn d1_basis() {
        let b = SolidHarmonicBasis::build(1, 4).unwrap();
        assert_eq!(b.count(0), 1);
        assert_eq!(b.count(1), 1);
        assert_eq!(b.count(2), 0);
        assert_eq!(b.get(0, 1).unwrap(), &MultiPoly::one(1));
        assert_eq!(b.get(1, 1).unwrap(), &MultiPoly::var(1, 0));
    }

    #[test]
    fn index_errors() {
        let b = SolidHarmonicBasis::build(3, 2).unwrap();
        assert!(matches!(
            b.get(3, 1),
            Err(HarmonicsError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            b.get(1, 0),
            Err(HarmonicsError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            b.get(1, 4),
            Err(HarmonicsError::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            evaluate_harmonic(&b, 1, 1, &[1.0, 0.0]),
            Err(HarmonicsError::PointDimension { .. })
        ));
    }

    #[test]
    fn vanishes_at_origin() {
        let b = SolidHarmonicBasis::build(3, 4).unwrap();
        for (k, l, _) in b.iter().filter(|(k, _, _)| *k >= 1) {
            assert_eq!(evaluate_harmonic(&b, k, l, &[0.0; 3]).unwrap(), 0.0);
        }
    }

    #[test]
    fn json_round_trip_preserves_fingerprint() {
        let b = SolidHarmonicBasis::build(3, 4).unwrap();
        let back = SolidHarmonicBasis::from_json(&b.to_json()).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.fingerprint(), b.fingerprint());
    }

    #[test]
    fn truncated_fingerprints_agree() {
        let deep = SolidHarmonicBasis::build(3, 5).unwrap();
        let shallow = SolidHarmonicBasis::build(3, 3).unwrap();
        assert_eq!(deep.fingerprint_upto(3), Some(shallow.fingerprint()));
        assert_ne!(deep.fingerprint(), shallow.fingerprint());
        let other = SolidHarmonicBasis::build(4, 3).unwrap();
        assert_ne!(other.fingerprint(), shallow.fingerprint());
    }
}
