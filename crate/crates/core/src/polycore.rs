//! Sparse multivariate polynomials with complex coefficients, univariate
//! polynomials, and exact integration of monomials over the unit sphere.
//!
//! Terms are kept in a [`BTreeMap`] keyed by [`Monomial`], whose ordering is
//! graded-lexicographic (total degree first, then `x1 > x2 > ... > xd`), so
//! iteration and serialization are deterministic.
//!
//! The sphere `S^{d-1}` carries its surface measure for `d >= 2`. For `d = 1`
//! the "sphere" is `{-1, 1}` with weight `1/2` at each point, which makes
//! `{1, x}` an orthonormal pair.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("exponent vector has length {got}, expected {expected}")]
    BadExponent { expected: usize, got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("polynomial parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Exponent multi-index `alpha` of a monomial `x^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn constant(dim: usize) -> Self {
        Monomial(vec![0; dim])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of length `dim` with total degree exactly `degree`,
/// in graded-lex order.
pub fn monomials_of_degree(dim: usize, degree: u32) -> Vec<Monomial> {
    fn rec(prefix: &mut Vec<u32>, remaining: u32, slots: usize, out: &mut Vec<Monomial>) {
        if slots == 1 {
            prefix.push(remaining);
            out.push(Monomial(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            rec(prefix, remaining - e, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(&mut Vec::with_capacity(dim), degree, dim, &mut out);
    out
}

/// All exponent vectors of length `dim` with total degree at most `max_degree`.
pub fn monomials_up_to(dim: usize, max_degree: u32) -> Vec<Monomial> {
    (0..=max_degree)
        .flat_map(|m| monomials_of_degree(dim, m))
        .collect()
}

/// Sparse polynomial in `d` variables with complex coefficients.
///
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Monomial::constant(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Complex64::new(1.0, 0.0))
    }

    /// The coordinate function `x_{i+1}` (0-based `i`).
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(
            i < dim,
            "variable index {i} out of range for dimension {dim}"
        );
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(Monomial(e), Complex64::new(1.0, 0.0))
    }

    pub fn monomial(m: Monomial, c: Complex64) -> Self {
        let mut p = Self::zero(m.dim());
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        if dim == 0 {
            return Err(PolyError::ZeroDimension);
        }
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(PolyError::BadExponent {
                    expected: dim,
                    got: e.len(),
                });
            }
            p.add_term(Monomial(e), c);
        }
        Ok(p)
    }

    /// `|x|^{2j} = (x_1^2 + ... + x_d^2)^j`.
    pub fn radius_power(dim: usize, j: u32) -> Self {
        let mut r2 = Self::zero(dim);
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 2;
            r2.add_term(Monomial(e), Complex64::new(1.0, 0.0));
        }
        let mut out = Self::one(dim);
        for _ in 0..j {
            out = &out * &r2;
        }
        out
    }

    pub fn add_term(&mut self, m: Monomial, c: Complex64) {
        debug_assert_eq!(m.dim(), self.dim);
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == Complex64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|m| m.degree() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exponents: &[u32]) -> Complex64 {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        MultiPoly {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > tol)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_dim(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, PolyError> {
        multiply(self, other)
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.dim, "point has wrong dimension");
        self.terms
            .iter()
            .map(|(m, c)| {
                let v: f64 =
                    m.0.iter()
                        .zip(x)
                        .map(|(&e, &xi)| xi.powi(e as i32))
                        .product();
                c * v
            })
            .sum()
    }

    /// Exact polynomial Laplacian.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            for i in 0..self.dim {
                let e = m.0[i];
                if e >= 2 {
                    let mut ex = m.0.clone();
                    ex[i] -= 2;
                    out.add_term(Monomial(ex), c * (e * (e - 1)) as f64);
                }
            }
        }
        out
    }

    fn same_dim(&self, other: &Self) -> Result<(), PolyError> {
        if self.dim != other.dim {
            return Err(PolyError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

/// Exact product of two polynomials.
pub fn multiply(p: &MultiPoly, q: &MultiPoly) -> Result<MultiPoly, PolyError> {
    p.same_dim(q)?;
    let mut out = MultiPoly::zero(p.dim);
    for (mp, cp) in &p.terms {
        for (mq, cq) in &q.terms {
            out.add_term(mp.mul(mq), cp * cq);
        }
    }
    Ok(out)
}

/// Coefficient-wise complex conjugate; an involution.
pub fn conjugate_poly(p: &MultiPoly) -> MultiPoly {
    MultiPoly {
        dim: p.dim,
        terms: p.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
    }
}

/// Splits `p` into homogeneous parts; `parts[m]` has degree exactly `m` (or
/// is zero). The zero polynomial gives an empty list.
pub fn homogeneous_parts(p: &MultiPoly) -> Vec<MultiPoly> {
    let deg = p.degree();
    if deg < 0 {
        return Vec::new();
    }
    let mut parts = vec![MultiPoly::zero(p.dim); deg as usize + 1];
    for (m, c) in &p.terms {
        parts[m.degree() as usize].add_term(m.clone(), *c);
    }
    parts
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        self.checked_add(rhs)
            .expect("dimension mismatch in polynomial addition")
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        multiply(self, rhs).expect("dimension mismatch in polynomial product")
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

// ---------------------------------------------------------------------------
// Univariate polynomials

/// Dense univariate polynomial `c_0 + c_1 t + ... + c_m t^m`; trailing zero
/// coefficients are trimmed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UniPoly {
    coeffs: Vec<Complex64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs
            .last()
            .is_some_and(|c| *c == Complex64::new(0.0, 0.0))
        {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }
}

// ---------------------------------------------------------------------------
// Sphere integration

/// `Gamma(n/2)` for a positive integer `n`, via the integer factorial or
/// the half-integer closed form `Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)`.
pub fn gamma_half_integer(n: u32) -> f64 {
    assert!(n > 0, "Gamma(0) is undefined");
    if n.is_multiple_of(2) {
        (1..n / 2).map(f64::from).product()
    } else {
        // (2m)! / (4^m m!) = prod_{i=1}^{m} (2i - 1) / 2
        let m = (n - 1) / 2;
        (1..=m).map(|i| (2 * i - 1) as f64 / 2.0).product::<f64>() * PI.sqrt()
    }
}

/// `∫_{S^{d-1}} θ^α dθ`, exact up to rounding.
///
/// Zero if any exponent is odd; otherwise
/// `2 ∏ Γ((α_i+1)/2) / Γ((|α|+d)/2)`. For `d = 1` the two-point rule with
/// weight `1/2` is used.
pub fn sphere_integral_monomial(alpha: &[u32], d: usize) -> f64 {
    assert_eq!(
        alpha.len(),
        d,
        "multi-index length must equal the dimension"
    );
    if d == 1 {
        return if alpha[0].is_multiple_of(2) { 1.0 } else { 0.0 };
    }
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    let total: u32 = alpha.iter().sum();
    let num: f64 = alpha.iter().map(|&a| gamma_half_integer(a + 1)).product();
    2.0 * num / gamma_half_integer(total + d as u32)
}

/// `⟨f, g⟩ = ∫_{S^{d-1}} f \bar g dθ`, evaluated exactly term by term.
pub fn sphere_inner_product(f: &MultiPoly, g: &MultiPoly) -> Result<Complex64, PolyError> {
    f.same_dim(g)?;
    let d = f.dim;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut alpha = vec![0u32; d];
    for (mf, cf) in &f.terms {
        for (mg, cg) in &g.terms {
            let mut even = true;
            for i in 0..d {
                alpha[i] = mf.0[i] + mg.0[i];
                if d > 1 && alpha[i] % 2 == 1 {
                    even = false;
                    break;
                }
            }
            if !even {
                continue;
            }
            let w = sphere_integral_monomial(&alpha, d);
            if w != 0.0 {
                acc += cf * cg.conj() * w;
            }
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Text format: sum of `coeff*x1^a1*...*xd^ad`, `**` accepted for `^`.

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            if c.im == 0.0 {
                match (idx > 0, c.re.is_sign_negative()) {
                    (true, true) => write!(f, " - {:?}", -c.re)?,
                    (true, false) => write!(f, " + {:?}", c.re)?,
                    _ => write!(f, "{:?}", c.re)?,
                }
            } else {
                if idx > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({:?}{:+?}i)", c.re, c.im)?;
            }
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Parse {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_pow(&mut self) -> bool {
        if self.eat(b'^') {
            return true;
        }
        self.skip_ws();
        if self.src[self.pos..].starts_with(b"**") {
            self.pos += 2;
            return true;
        }
        false
    }

    fn number(&mut self) -> Result<f64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let b = self.src[self.pos];
            let exp_sign = (b == b'+' || b == b'-')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if b.is_ascii_digit() || b == b'.' || b == b'e' || b == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err(format!("expected a number, found {text:?}"))
            }
        }
    }

    fn unsigned_int(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .map_or_else(|| self.err("expected a non-negative integer"), Ok)
    }

    /// A real or imaginary literal: `2.5`, `3i`, `i`.
    fn literal(&mut self) -> Result<Complex64, PolyError> {
        if self.eat(b'i') {
            return Ok(Complex64::new(0.0, 1.0));
        }
        let v = self.number()?;
        if self.src.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            Ok(Complex64::new(0.0, v))
        } else {
            Ok(Complex64::new(v, 0.0))
        }
    }

    /// `a`, `bi`, `a+bi`, `a-bi` inside parentheses.
    fn complex_group(&mut self) -> Result<Complex64, PolyError> {
        let mut sign = 1.0;
        if self.eat(b'-') {
            sign = -1.0;
        } else {
            self.eat(b'+');
        }
        let mut acc = self.literal()? * sign;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc += self.literal()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc -= self.literal()?;
                }
                _ => break,
            }
        }
        if !self.eat(b')') {
            return self.err("expected ')'");
        }
        Ok(acc)
    }

    fn factor(&mut self, coeff: &mut Complex64, expo: &mut [u32]) -> Result<(), PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                *coeff *= self.complex_group()?;
            }
            Some(b'x') => {
                self.pos += 1;
                let idx = self.unsigned_int()? as usize;
                if idx == 0 || idx > self.dim {
                    return self.err(format!("variable x{idx} outside 1..={}", self.dim));
                }
                let power = if self.eat_pow() {
                    self.unsigned_int()?
                } else {
                    1
                };
                expo[idx - 1] += power;
            }
            Some(b) if b.is_ascii_digit() || b == b'.' || b == b'i' => {
                *coeff *= self.literal()?;
            }
            _ => return self.err("expected a coefficient or a variable"),
        }
        Ok(())
    }

    fn term(&mut self, sign: f64) -> Result<(Vec<u32>, Complex64), PolyError> {
        let mut coeff = Complex64::new(sign, 0.0);
        let mut expo = vec![0u32; self.dim];
        self.factor(&mut coeff, &mut expo)?;
        while self.eat(b'*') {
            self.factor(&mut coeff, &mut expo)?;
        }
        Ok((expo, coeff))
    }

    fn poly(&mut self) -> Result<MultiPoly, PolyError> {
        let mut p = MultiPoly::zero(self.dim);
        let mut sign = if self.eat(b'-') {
            -1.0
        } else {
            self.eat(b'+');
            1.0
        };
        loop {
            let (e, c) = self.term(sign)?;
            p.add_term(Monomial(e), c);
            match self.peek() {
                None => break,
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                Some(_) => return self.err("expected '+', '-' or end of input"),
            }
        }
        Ok(p)
    }
}

/// Parses the CLI polynomial text format, e.g. `(1+2i)*x1^2 - 3*x1*x2 + x2**4`.
pub fn parse_poly(text: &str, dim: usize) -> Result<MultiPoly, PolyError> {
    if dim == 0 {
        return Err(PolyError::ZeroDimension);
    }
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        dim,
    };
    if parser.peek().is_none() {
        return parser.err("empty polynomial");
    }
    if parser.peek() == Some(b'0') && text.trim() == "0" {
        return Ok(MultiPoly::zero(dim));
    }
    parser.poly()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn multiply_examples() {
        let x1 = MultiPoly::var(2, 0);
        let x2 = MultiPoly::var(2, 1);
        let sq = multiply(&x1, &x1).unwrap();
        assert_eq!(sq.coeff(&[2, 0]), c(1.0));
        assert_eq!(sq.num_terms(), 1);

        assert!(multiply(&x1, &MultiPoly::zero(2)).unwrap().is_zero());

        let s = &x1 + &x2;
        let s2 = &s * &s;
        assert_eq!(s2.coeff(&[2, 0]), c(1.0));
        assert_eq!(s2.coeff(&[1, 1]), c(2.0));
        assert_eq!(s2.coeff(&[0, 2]), c(1.0));
        assert_eq!(s2.degree(), 2);
    }

    #[test]
    fn multiply_dimension_mismatch() {
        let err = multiply(&MultiPoly::one(2), &MultiPoly::one(3)).unwrap_err();
        assert_eq!(err, PolyError::DimensionMismatch { left: 2, right: 3 });
    }

    #[test]
    fn conjugate_examples() {
        let p = MultiPoly::var(1, 0).scale(Complex64::new(1.0, 1.0));
        let q = conjugate_poly(&p);
        assert_eq!(q.coeff(&[1]), Complex64::new(1.0, -1.0));
        let real = parse_poly("3*x1^2 - x2", 2).unwrap();
        assert_eq!(conjugate_poly(&real), real);
        assert_eq!(conjugate_poly(&q), p);
    }

    #[test]
    fn sphere_monomial_examples() {
        let tol = 1e-13;
        assert!((sphere_integral_monomial(&[0, 0], 2) - 2.0 * PI).abs() < tol * 2.0 * PI);
        let v = sphere_integral_monomial(&[2, 0, 0], 3);
        assert!((v - 4.0 * PI / 3.0).abs() < tol * v);
        let v = sphere_integral_monomial(&[2, 2, 0], 3);
        assert!((v - 4.0 * PI / 15.0).abs() < tol * v);
        assert_eq!(sphere_integral_monomial(&[1, 2, 0], 3), 0.0);
    }

    #[test]
    fn gamma_closed_forms() {
        assert!((gamma_half_integer(1) - PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half_integer(2), 1.0);
        assert_eq!(gamma_half_integer(10), 24.0);
        // Γ(7/2) = 15/8 √π
        assert!((gamma_half_integer(7) - 15.0 / 8.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inner_product_examples() {
        let one = MultiPoly::one(3);
        let v = sphere_inner_product(&one, &one).unwrap();
        assert!((v.re - 4.0 * PI).abs() < 1e-13 && v.im == 0.0);

        let x = MultiPoly::var(2, 0);
        assert_eq!(
            sphere_inner_product(&x, &MultiPoly::one(2)).unwrap().norm(),
            0.0
        );

        let x = MultiPoly::var(1, 0);
        assert!((sphere_inner_product(&x, &x).unwrap().re - 1.0).abs() < 1e-15);
        // d = 1: f = 1 + x, g = x  ->  ½·2·1 + ½·0 = 1
        let f = parse_poly("1 + x1", 1).unwrap();
        assert!((sphere_inner_product(&f, &x).unwrap().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inner_product_conjugates_second_argument() {
        let f = MultiPoly::one(2).scale(Complex64::new(0.0, 1.0));
        let v = sphere_inner_product(&f, &f).unwrap();
        assert!((v.re - 2.0 * PI).abs() < 1e-13 && v.im.abs() < 1e-15);
    }

    #[test]
    fn homogeneous_parts_examples() {
        let p = parse_poly("1 + x1^2", 1).unwrap();
        let parts = homogeneous_parts(&p);
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], MultiPoly::one(1));
        assert!(parts[1].is_zero());
        assert_eq!(parts[2].coeff(&[2]), c(1.0));

        assert!(homogeneous_parts(&MultiPoly::zero(3)).is_empty());

        let p = parse_poly("x1*x2 + x1", 2).unwrap();
        let parts = homogeneous_parts(&p);
        assert!(parts[0].is_zero());
        assert_eq!(parts[1], MultiPoly::var(2, 0));
        assert_eq!(parts[2].coeff(&[1, 1]), c(1.0));
    }

    #[test]
    fn degree_of_zero_is_minus_one() {
        assert_eq!(MultiPoly::zero(2).degree(), -1);
        assert_eq!(UniPoly::zero().degree(), -1);
        assert_eq!(UniPoly::from_real(&[1.0, 0.0, 0.0]).degree(), 0);
    }

    #[test]
    fn graded_lex_order() {
        let ms = monomials_of_degree(2, 2);
        let exps: Vec<_> = ms.iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(exps, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert!(Monomial::new(vec![0, 1]) > Monomial::new(vec![1, 0]));
        assert!(Monomial::new(vec![0, 0]) < Monomial::new(vec![0, 1]));
        assert_eq!(monomials_up_to(3, 2).len(), 10);
    }

    #[test]
    fn laplacian_of_harmonic_is_zero() {
        let p = parse_poly("x1^2 - x2^2 + x1*x2", 2).unwrap();
        assert!(p.laplacian().is_zero());
        let p = parse_poly("x1^2", 3).unwrap();
        assert_eq!(p.laplacian(), MultiPoly::constant(3, c(2.0)));
    }

    #[test]
    fn parse_variants() {
        let p = parse_poly(" (1+2i) * x1 ** 2 - 3*x1*x2 + 2i*x2 ", 2).unwrap();
        assert_eq!(p.coeff(&[2, 0]), Complex64::new(1.0, 2.0));
        assert_eq!(p.coeff(&[1, 1]), c(-3.0));
        assert_eq!(p.coeff(&[0, 1]), Complex64::new(0.0, 2.0));

        let p = parse_poly("-x1 + 1.5e-3 - x1", 1).unwrap();
        assert_eq!(p.coeff(&[1]), c(-2.0));
        assert_eq!(p.coeff(&[0]), c(1.5e-3));

        assert_eq!(parse_poly("0", 2).unwrap(), MultiPoly::zero(2));
        assert!(matches!(parse_poly("x3", 2), Err(PolyError::Parse { .. })));
        assert!(matches!(parse_poly("", 2), Err(PolyError::Parse { .. })));
        assert!(matches!(
            parse_poly("x1 +", 2),
            Err(PolyError::Parse { .. })
        ));
    }

    #[test]
    fn display_parses_back() {
        let p = parse_poly("(0.25-1i)*x1^3*x2 + 7 - x2^2", 2).unwrap();
        let q = parse_poly(&p.to_string(), 2).unwrap();
        assert_eq!(p, q);
    }
}
