//! Distributed moments, Laplace-Fourier decomposition and pseudo-positive
//! representing measures for multivariate moment problems.

pub mod cli;
pub mod cubature;
pub mod decompose;
pub mod harmonics;
pub mod io;
pub mod linalg;
pub mod polycore;
pub mod quadrature;
pub mod refmeasures;
pub mod stieltjes;

pub use cubature::{
    functional_value, point_cubature, solve_truncated, ComponentMeasureSet, PseudoCubature,
};
pub use decompose::{
    apply_functional, is_pseudo_positive_definite, laplace_fourier_decompose,
    DistributedMomentTable, MonomialMomentTable,
};
pub use harmonics::SolidHarmonicBasis;
pub use polycore::{parse_poly, MultiPoly};
pub use stieltjes::{gauss_rule, AtomicMeasure, MomentSequence, StieltjesOptions};
