//! Reference measures and functionals with closed-form distributed moments.
//!
//! A radial profile `w_{k,l}` describes the density `f(x)` through its
//! angular coefficients `w_{k,l}(r) = ∫ f(rθ) Y_{k,l}(θ) dθ`, so that
//! `dμ_{k,l} = r^{k+d-1} w_{k,l}(r) dr` on the `r`-axis and
//! `c_{j,k,l} = ∫ r^{2j} dμ_{k,l}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::decompose::{DecomposeError, DistributedMomentTable};
use crate::harmonics::SolidHarmonicBasis;
use crate::quadrature::{integrate, QuadratureError, Tolerance};
use crate::stieltjes::AtomicMeasure;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefMeasureError {
    #[error("alpha must be positive, got {0}")]
    NonPositiveAlpha(f64),
    #[error("component index k must be >= {min}, got {k}")]
    BadComponent { k: usize, min: usize },
    #[error("interval endpoint a must be positive, got {0}")]
    NonPositiveEndpoint(f64),
    #[error("measure atom at {node} lies outside [{a}, {b}]")]
    OutsideInterval { node: f64, a: f64, b: f64 },
    #[error("support radius must be positive and finite, got {0}")]
    BadSupport(f64),
    #[error("reference table requires dimension {expected}, basis has {got}")]
    WrongDimension { expected: usize, got: usize },
    #[error("profile integral diverges: exponent sum {0} <= 0")]
    Divergent(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
}

/// `coeff * r^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// Radial profile on `[0, support]`.
#[derive(Clone)]
pub enum ProfileShape {
    /// `Σ coeff * r^exponent`, moments in closed form.
    Terms(Vec<ProfileTerm>),
    /// Generic density, integrated numerically.
    Callable(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for ProfileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileShape::Terms(t) => f.debug_tuple("Terms").field(t).finish(),
            ProfileShape::Callable(_) => f.write_str("Callable(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialDensityProfile {
    pub k: usize,
    pub l: usize,
    pub shape: ProfileShape,
    pub support: f64,
}

impl RadialDensityProfile {
    pub fn zero(k: usize, l: usize) -> Self {
        RadialDensityProfile {
            k,
            l,
            shape: ProfileShape::Terms(Vec::new()),
            support: 1.0,
        }
    }

    pub fn evaluate(&self, r: f64) -> f64 {
        if !(0.0..=self.support).contains(&r) {
            return 0.0;
        }
        match &self.shape {
            ProfileShape::Terms(terms) => terms.iter().map(|t| t.coeff * r.powf(t.exponent)).sum(),
            ProfileShape::Callable(f) => f(r),
        }
    }

    /// `∫_0^R r^p w(r) dr`.
    pub fn weighted_integral(&self, p: f64) -> Result<f64, RefMeasureError> {
        match &self.shape {
            ProfileShape::Terms(terms) => terms
                .iter()
                .filter(|t| t.coeff != 0.0)
                .map(|t| {
                    let e = t.exponent + p + 1.0;
                    if e <= 0.0 {
                        Err(RefMeasureError::Divergent(e))
                    } else {
                        Ok(t.coeff * self.support.powf(e) / e)
                    }
                })
                .sum(),
            ProfileShape::Callable(f) => Ok(integrate(
                |r| r.powf(p) * f(r),
                0.0,
                self.support,
                &Tolerance::default(),
            )?),
        }
    }
}

/// `c_{j,k,l} = ∫ r^{2j+k+d-1} w_{k,l}(r) dr`.
pub fn density_component_moments(
    profile: &RadialDensityProfile,
    d: usize,
    j: usize,
) -> Result<f64, RefMeasureError> {
    profile.weighted_integral((2 * j + profile.k + d - 1) as f64)
}

/// `∫ r^{-k} dμ_{k,l} = ∫ r^{d-1} w_{k,l}(r) dr`.
pub fn inverse_moment(profile: &RadialDensityProfile, d: usize) -> Result<f64, RefMeasureError> {
    profile.weighted_integral((d - 1) as f64)
}

fn check_alpha(alpha: f64) -> Result<(), RefMeasureError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(RefMeasureError::NonPositiveAlpha(alpha))
    }
}

/// Profile of the damped Poisson kernel `(1 - r^α) P(r e^{it})` on the unit
/// disk, for any `(k, l)` of the planar basis.
pub fn poisson_alpha_profile(
    alpha: f64,
    k: usize,
    l: usize,
) -> Result<RadialDensityProfile, RefMeasureError> {
    check_alpha(alpha)?;
    let amp = match (k, l) {
        (0, _) => (2.0 * PI).sqrt(),
        (_, 1) => 2.0 * PI.sqrt(),
        _ => 0.0,
    };
    let terms = if amp == 0.0 {
        Vec::new()
    } else {
        vec![
            ProfileTerm {
                coeff: amp,
                exponent: k as f64,
            },
            ProfileTerm {
                coeff: -amp,
                exponent: k as f64 + alpha,
            },
        ]
    };
    Ok(RadialDensityProfile {
        k,
        l,
        shape: ProfileShape::Terms(terms),
        support: 1.0,
    })
}

/// `w_{k,1}(r) = 2√π r^k (1 - r^α)` and `∫ r^{-k} dμ_{k,1} = 2√π α / ((k+2)(α+k+2))`.
pub fn poisson_alpha_components(
    alpha: f64,
    k: usize,
) -> Result<(RadialDensityProfile, f64), RefMeasureError> {
    if k == 0 {
        return Err(RefMeasureError::BadComponent { k, min: 1 });
    }
    let profile = poisson_alpha_profile(alpha, k, 1)?;
    let kf = k as f64;
    Ok((
        profile,
        2.0 * PI.sqrt() * alpha / ((kf + 2.0) * (alpha + kf + 2.0)),
    ))
}

/// Undamped Poisson kernel: `w_{k,1}(r) = 2√π r^k`, `∫ r^{-k} dμ_{k,1} = 2√π/(k+2)`.
pub fn poisson_kernel_components(k: usize) -> Result<(RadialDensityProfile, f64), RefMeasureError> {
    if k == 0 {
        return Err(RefMeasureError::BadComponent { k, min: 1 });
    }
    let profile = RadialDensityProfile {
        k,
        l: 1,
        shape: ProfileShape::Terms(vec![ProfileTerm {
            coeff: 2.0 * PI.sqrt(),
            exponent: k as f64,
        }]),
        support: 1.0,
    };
    Ok((profile, 2.0 * PI.sqrt() / (k as f64 + 2.0)))
}

fn require_dim(basis: &SolidHarmonicBasis, d: usize) -> Result<(), RefMeasureError> {
    if basis.dim() == d {
        Ok(())
    } else {
        Err(RefMeasureError::WrongDimension {
            expected: d,
            got: basis.dim(),
        })
    }
}

/// Distributed moments of the damped Poisson density on the unit disk.
pub fn poisson_alpha_table(
    alpha: f64,
    basis: &SolidHarmonicBasis,
    n: usize,
    k_max: usize,
) -> Result<DistributedMomentTable, RefMeasureError> {
    require_dim(basis, 2)?;
    check_alpha(alpha)?;
    let mut err = None;
    let tbl = DistributedMomentTable::from_fn(basis, n, k_max, |j, k, l| {
        match poisson_alpha_profile(alpha, k, l).and_then(|p| density_component_moments(&p, 2, j)) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        }
    })?;
    err.map_or(Ok(tbl), Err)
}

/// Table of `T(f) = ∫_a^b f(x) dσ - ∫_a^b f(-x) dσ` on the line:
/// `c_{j,0,1} = 0` and `c_{j,1,1} = 2 ∫ r^{2j+1} dσ`.
pub fn univariate_example_table(
    a: f64,
    b: f64,
    sigma: &AtomicMeasure,
    n: usize,
    basis: &SolidHarmonicBasis,
) -> Result<DistributedMomentTable, RefMeasureError> {
    require_dim(basis, 1)?;
    if !(a > 0.0) {
        return Err(RefMeasureError::NonPositiveEndpoint(a));
    }
    if let Some(node) = sigma.nodes().iter().copied().find(|&r| r < a || r > b) {
        return Err(RefMeasureError::OutsideInterval { node, a, b });
    }
    Ok(DistributedMomentTable::from_fn(basis, n, 1, |j, k, _| {
        if k == 1 {
            2.0 * sigma.moment(2 * j as u32 + 1)
        } else {
            0.0
        }
    })?)
}

/// `T(f) = ∫_0^R f_{1,1}(r) r^{-1} dδ_0`: `c_{j,1,1} = δ_{j,0}`, zero elsewhere.
pub fn dirac_counterexample_table(
    basis: &SolidHarmonicBasis,
    n: usize,
    radius: f64,
) -> Result<DistributedMomentTable, RefMeasureError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(RefMeasureError::BadSupport(radius));
    }
    if basis.k_max() < 1 || basis.count(1) == 0 {
        return Err(RefMeasureError::BadComponent {
            k: basis.k_max(),
            min: 1,
        });
    }
    Ok(DistributedMomentTable::from_fn(basis, n, 1, |j, k, l| {
        if (j, k, l) == (0, 1, 1) {
            1.0
        } else {
            0.0
        }
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{
        is_positive_definite_classical, is_pseudo_positive_definite, monomial_from_distributed,
    };

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn poisson_alpha_closed_forms() {
        let (_, v) = poisson_alpha_components(1.0, 1).unwrap();
        assert!(rel(v, PI.sqrt() / 6.0) < 1e-15);
        let (_, v) = poisson_alpha_components(2.0, 2).unwrap();
        assert!(rel(v, PI.sqrt() / 6.0) < 1e-15);
        for alpha in [0.5, 1.0, 2.0, 3.5] {
            for k in 1..=8 {
                let (p, v) = poisson_alpha_components(alpha, k).unwrap();
                assert!(rel(inverse_moment(&p, 2).unwrap(), v) < 1e-14);
            }
        }
        assert!(poisson_alpha_components(0.0, 1).is_err());
        assert!(poisson_alpha_components(1.0, 0).is_err());
    }

    #[test]
    fn large_alpha_tends_to_kernel() {
        for k in 1..=5 {
            let (_, lim) = poisson_kernel_components(k).unwrap();
            let (_, v) = poisson_alpha_components(1e9, k).unwrap();
            assert!(rel(v, lim) < 1e-8);
        }
    }

    #[test]
    fn component_moment_examples() {
        let (p, _) = poisson_kernel_components(3).unwrap();
        // j = 0 moment of the undamped kernel integrates r^{2k+1}
        assert!(
            rel(
                density_component_moments(&p, 2, 0).unwrap(),
                2.0 * PI.sqrt() / 8.0
            ) < 1e-15
        );
        assert_eq!(
            density_component_moments(&RadialDensityProfile::zero(0, 1), 2, 3).unwrap(),
            0.0
        );
        let flat = RadialDensityProfile {
            k: 0,
            l: 1,
            shape: ProfileShape::Terms(vec![ProfileTerm {
                coeff: 1.0,
                exponent: 0.0,
            }]),
            support: 1.0,
        };
        assert!(rel(density_component_moments(&flat, 2, 1).unwrap(), 0.25) < 1e-15);
    }

    #[test]
    fn callable_profile_matches_terms() {
        let alpha = 1.7;
        let terms = poisson_alpha_profile(alpha, 2, 1).unwrap();
        let callable = RadialDensityProfile {
            shape: ProfileShape::Callable(Arc::new(move |r: f64| {
                2.0 * PI.sqrt() * r * r * (1.0 - r.powf(alpha))
            })),
            ..terms.clone()
        };
        for j in 0..5 {
            let a = density_component_moments(&terms, 2, j).unwrap();
            let b = density_component_moments(&callable, 2, j).unwrap();
            assert!(rel(b, a) < 1e-10, "j={j}");
        }
    }

    #[test]
    fn poisson_table_layout() {
        let b = SolidHarmonicBasis::build(2, 3).unwrap();
        let tbl = poisson_alpha_table(1.0, &b, 2, 3).unwrap();
        for k in 1..=3 {
            assert!(tbl.get(0, k, 1).unwrap() > 0.0);
            assert_eq!(tbl.get(2, k, 2).unwrap(), 0.0);
        }
        // k = 0: √(2π) ∫ r (1 - r) dr
        assert!(rel(tbl.get(0, 0, 1).unwrap(), (2.0 * PI).sqrt() / 6.0) < 1e-15);
        assert!(is_pseudo_positive_definite(&tbl).passed());
        let b3 = SolidHarmonicBasis::build(3, 2).unwrap();
        assert!(poisson_alpha_table(1.0, &b3, 2, 2).is_err());
    }

    #[test]
    fn univariate_example() {
        let b = SolidHarmonicBasis::build(1, 1).unwrap();
        let sigma = AtomicMeasure::new(vec![1.0], vec![1.0]).unwrap();
        let tbl = univariate_example_table(1.0, 1.0, &sigma, 3, &b).unwrap();
        for j in 0..=6 {
            assert_eq!(tbl.get(j, 0, 1), Some(0.0));
            assert_eq!(tbl.get(j, 1, 1), Some(2.0));
        }
        assert!(is_pseudo_positive_definite(&tbl).passed());
        let m = monomial_from_distributed(&tbl, &b, 2).unwrap();
        assert_eq!(m.get(&[0]), Some(0.0));
        assert_eq!(m.get(&[1]), Some(2.0));
        assert!(!is_positive_definite_classical(&m, 1).unwrap().passed());

        assert!(univariate_example_table(0.0, 1.0, &sigma, 3, &b).is_err());
        assert!(univariate_example_table(2.0, 3.0, &sigma, 3, &b).is_err());
    }

    #[test]
    fn dirac_table() {
        let b = SolidHarmonicBasis::build(2, 2).unwrap();
        let tbl = dirac_counterexample_table(&b, 3, 1.0).unwrap();
        assert_eq!(tbl.get(0, 1, 1), Some(1.0));
        assert_eq!(tbl.get(1, 1, 1), Some(0.0));
        assert_eq!(tbl.get(0, 0, 1), Some(0.0));
        assert_eq!(tbl.get(0, 1, 2), Some(0.0));
        assert!(is_pseudo_positive_definite(&tbl).passed());
        assert!(dirac_counterexample_table(&b, 3, 0.0).is_err());
    }
}
