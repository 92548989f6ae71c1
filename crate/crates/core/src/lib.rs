//! Compressed quasi-Monte Carlo (QMC) integration on regions of analytically
//! parametrized surfaces in 3D.
//!
//! The pipeline: generate a large uniformly distributed node set on a surface
//! region by low-discrepancy rejection sampling, select a polynomial basis of
//! the trivariate space restricted to the nodes, then extract a small set of
//! re-weighted nodes matching all basis moments via a bottom-up non-negative
//! least-squares loop. The compressed rule has positive weights, at most `N`
//! nodes (the restricted space dimension) and reproduces the original QMC sum
//! on every polynomial of the requested degree.

pub mod compress;
pub mod error;
pub mod linalg;
pub mod lowdisc;
pub mod nnls;
pub mod polyspace;
pub mod region;
pub mod scene;
pub mod surface;

pub use error::{Error, Result};
pub use nalgebra::{DMatrix, DVector};

pub use compress::{
    bottom_up_compress, caratheodory_compress, evaluate_rule, qmc_integrate, qmc_moments,
    CompressParams, CompressedRule, IterationRecord, MomentVector,
};
pub use lowdisc::{halton_2d, radical_inverse, rejection_sample, HaltonStream, UnitSquarePoint};
pub use nnls::{nnls_solve, NnlsOptions, NnlsResult};
pub use polyspace::{chebvand, fit_box, graded_lex_indices, select_basis, Box3, MultiIndex3, PolyBasis};
pub use region::Region;
pub use scene::Scene;
pub use surface::{ParamDomain, ParamSurface, SampleSet};

/// Point of the ambient 3D space.
pub type Point3 = nalgebra::Point3<f64>;

/// Formats a real with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}
