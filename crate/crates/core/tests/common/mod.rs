//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use pseudomoment::cubature::ComponentMeasureSet;
use pseudomoment::decompose::DistributedMomentTable;
use pseudomoment::harmonics::SolidHarmonicBasis;
use pseudomoment::polycore::{monomials_up_to, MultiPoly};
use pseudomoment::stieltjes::AtomicMeasure;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real polynomial of total degree `<= deg` with coefficients in [-1, 1].
pub fn random_poly(rng: &mut impl Rng, dim: usize, deg: u32, density: f64) -> MultiPoly {
    let mut p = MultiPoly::zero(dim);
    for m in monomials_up_to(dim, deg) {
        if rng.gen_bool(density) {
            p.add_term(m, Complex64::new(rng.gen_range(-1.0..1.0), 0.0));
        }
    }
    p
}

/// Non-negative atomic measure on `[lo, hi]` with `atoms` distinct nodes.
pub fn random_measure(rng: &mut impl Rng, atoms: usize, lo: f64, hi: f64) -> AtomicMeasure {
    let pts = (0..atoms)
        .map(|_| (rng.gen_range(lo..hi), rng.gen_range(0.1..2.0)))
        .collect();
    AtomicMeasure::from_unsorted(pts).unwrap()
}

/// Component measures for every `(k, l)` with `k <= k_max`, at most
/// `max_atoms` atoms each, radii in `[0.3, 1.5]`.
pub fn random_component_set(
    rng: &mut impl Rng,
    basis: &SolidHarmonicBasis,
    k_max: usize,
    max_atoms: usize,
) -> ComponentMeasureSet {
    let mut cms = ComponentMeasureSet::new(basis, k_max).unwrap();
    for (k, l, _) in basis.iter().filter(|(k, _, _)| *k <= k_max) {
        let atoms = rng.gen_range(1..=max_atoms);
        cms.insert(k, l, random_measure(rng, atoms, 0.3, 1.5))
            .unwrap();
    }
    cms
}

/// Table with `c_{j,k,l} = ∫ r^{2j} dσ_{k,l}`.
pub fn table_from_components(
    cms: &ComponentMeasureSet,
    basis: &SolidHarmonicBasis,
    n: usize,
) -> DistributedMomentTable {
    DistributedMomentTable::from_fn(basis, n, cms.k_max(), |j, k, l| {
        cms.get(k, l).map_or(0.0, |s| s.moment(2 * j as u32))
    })
    .unwrap()
}

pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------------------
// Exact Gauss-rule oracle: Hankel-determinant orthogonal polynomials in
// rational arithmetic, bisection with exact sign evaluation, and an exact
// Vandermonde solve for the weights.

pub type Q = BigRational;

pub fn q_from_f64(x: f64) -> Q {
    BigRational::from_float(x).expect("finite")
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().expect("representable")
}

pub fn q_int(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Determinant by Gaussian elimination over the rationals.
pub fn det(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let pivot = a[c][c].clone();
        d *= &pivot;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &pivot;
            for j in c..n {
                let v = &f * &a[c][j];
                a[r][j] -= v;
            }
        }
    }
    d
}

/// Solves `a x = b` over the rationals; `a` must be nonsingular.
pub fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Vec<Q> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("nonsingular");
        a.swap(p, c);
        b.swap(p, c);
        for r in 0..n {
            if r == c || a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &a[c][c];
            for j in c..n {
                let v = &f * &a[c][j];
                a[r][j] -= v;
            }
            let v = &f * &b[c];
            b[r] -= v;
        }
    }
    (0..n).map(|i| &b[i] / &a[i][i]).collect()
}

/// Coefficients (ascending) of `π_m(t) = det[[s_{i+j}]_{i<m}; [t^j]]`.
pub fn orthogonal_poly(s: &[Q], m: usize) -> Vec<Q> {
    (0..=m)
        .map(|j| {
            let minor: Vec<Vec<Q>> = (0..m)
                .map(|i| {
                    (0..=m)
                        .filter(|&c| c != j)
                        .map(|c| s[i + c].clone())
                        .collect()
                })
                .collect();
            let sign = if (m + j).is_multiple_of(2) {
                Q::one()
            } else {
                -Q::one()
            };
            sign * det(minor)
        })
        .collect()
}

fn eval_sign(p: &[Q], t: f64) -> i32 {
    let t = q_from_f64(t);
    let mut acc = Q::zero();
    for c in p.iter().rev() {
        acc = acc * &t + c;
    }
    if acc.is_zero() {
        0
    } else if acc.is_positive() {
        1
    } else {
        -1
    }
}

fn bisect(p: &[Q], mut lo: f64, mut hi: f64) -> f64 {
    let s_lo = eval_sign(p, lo);
    if s_lo == 0 {
        return lo;
    }
    if eval_sign(p, hi) == 0 {
        return hi;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        match eval_sign(p, mid) {
            0 => return mid,
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
}

/// Real roots of `π_1, ..., π_m`, each bracketed by the interlacing roots of
/// its predecessor; returns the roots of `π_m`.
fn interlaced_roots(s: &[Q], m: usize, upper: f64) -> Vec<f64> {
    let mut prev: Vec<f64> = Vec::new();
    for k in 1..=m {
        let p = orthogonal_poly(s, k);
        let mut edges = vec![0.0];
        edges.extend(prev.iter().copied());
        edges.push(upper);
        prev = edges.windows(2).map(|w| bisect(&p, w[0], w[1])).collect();
    }
    prev
}

/// Oracle Gauss rule for the exact moments `s_0..s_{2n}` of a measure on
/// `(0, upper)`; the rank is read off the leading Hankel minors.
pub fn oracle_gauss_rule(s: &[Q], n: usize, upper: f64) -> (Vec<f64>, Vec<f64>) {
    let mut m = 0;
    while m < n {
        let h: Vec<Vec<Q>> = (0..=m)
            .map(|i| (0..=m).map(|j| s[i + j].clone()).collect())
            .collect();
        if det(h).is_zero() {
            break;
        }
        m += 1;
    }
    let nodes = interlaced_roots(s, m, upper);
    let v: Vec<Vec<Q>> = (0..m)
        .map(|j| {
            nodes
                .iter()
                .map(|&t| {
                    let t = q_from_f64(t);
                    num_traits::pow(t, j)
                })
                .collect()
        })
        .collect();
    let w = solve(v, s[..m].to_vec());
    (nodes, w.iter().map(q_to_f64).collect())
}

/// Exact moments of a rational atomic measure.
pub fn exact_moments(atoms: &[(Q, Q)], count: usize) -> Vec<Q> {
    (0..count)
        .map(|j| {
            atoms
                .iter()
                .map(|(t, w)| w * num_traits::pow(t.clone(), j))
                .fold(Q::zero(), |a, b| a + b)
        })
        .collect()
}

/// Rational atomic measure with distinct nodes `u / 64`, `u ∈ [lo, hi]`,
/// and weights `v / 16`, `v ∈ [1, 32]`.
pub fn random_rational_measure(rng: &mut impl Rng, atoms: usize, lo: i64, hi: i64) -> Vec<(Q, Q)> {
    let mut us: Vec<i64> = Vec::new();
    while us.len() < atoms {
        let u = rng.gen_range(lo..=hi);
        if !us.contains(&u) {
            us.push(u);
        }
    }
    us.sort_unstable();
    us.into_iter()
        .map(|u| {
            let v = rng.gen_range(1..=32);
            (
                Q::new(BigInt::from(u), BigInt::from(64)),
                Q::new(BigInt::from(v), BigInt::from(16)),
            )
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sturm-sequence bisection for symmetric tridiagonal eigenvalues.

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let denom = if q == 0.0 {
            f64::EPSILON * (off[i - 1].abs() + 1.0)
        } else {
            q
        };
        q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues, ascending, by bisection on the Sturm count.
pub fn sturm_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let radius = (0..n)
        .map(|i| {
            diag[i].abs()
                + if i > 0 { off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { off[i].abs() } else { 0.0 }
        })
        .fold(0.0f64, f64::max)
        + 1.0;
    (0..n)
        .map(|i| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if sturm_count(diag, off, mid) > i {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}
