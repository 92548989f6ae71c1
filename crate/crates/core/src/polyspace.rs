//! Trivariate Chebyshev product basis of total degree `n` in graded
//! lexicographic order, Chebyshev-Vandermonde matrices on a fitted bounding
//! box, and selection of a polynomial basis of the space restricted to the
//! sampled points.
//!
//! On algebraic surfaces the restricted space has lower dimension than the
//! free trivariate count (e.g. `(n+1)^2` on a sphere); the selection step
//! detects this through the numerical rank of the Vandermonde matrix and a
//! column-pivoted QR.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::Point3;

/// Exponent triple of a trivariate monomial/Chebyshev product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiIndex3(pub u32, pub u32, pub u32);

impl MultiIndex3 {
    pub fn degree(&self) -> u32 {
        self.0 + self.1 + self.2
    }
}

/// All exponent triples of total degree <= n, sorted by total degree and
/// lexicographically inside each degree class (first coordinate most
/// significant, ascending). Length `(n+1)(n+2)(n+3)/6`.
pub fn graded_lex_indices(n: usize) -> Vec<MultiIndex3> {
    let mut out = Vec::with_capacity((n + 1) * (n + 2) * (n + 3) / 6);
    for d in 0..=n as u32 {
        for a1 in 0..=d {
            for a2 in 0..=(d - a1) {
                out.push(MultiIndex3(a1, a2, d - a1 - a2));
            }
        }
    }
    out
}

/// Axis-aligned bounding box of the sampled points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3 {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Box3 {
    /// Affine map of coordinate `dim` onto [-1, 1].
    pub fn map_to_unit(&self, dim: usize, t: f64) -> f64 {
        (2.0 * t - self.hi[dim] - self.lo[dim]) / (self.hi[dim] - self.lo[dim])
    }
}

/// Componentwise min/max box of the points; flat dimensions are inflated
/// symmetrically so every affine map stays well defined.
pub fn fit_box(points: &[Point3]) -> Result<Box3> {
    if points.is_empty() {
        return Err(Error::InvalidParameter(
            "bounding box of an empty point set".into(),
        ));
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut scale: f64 = 0.0;
    for p in points {
        let c = [p.x, p.y, p.z];
        for dim in 0..3 {
            if !c[dim].is_finite() {
                return Err(Error::NonFinite("point coordinates"));
            }
            lo[dim] = lo[dim].min(c[dim]);
            hi[dim] = hi[dim].max(c[dim]);
            scale = scale.max(c[dim].abs());
        }
    }
    let pad = (1e-12 * scale).max(1e-12);
    for dim in 0..3 {
        if hi[dim] - lo[dim] < 1e-12 * scale.max(1.0) {
            lo[dim] -= pad;
            hi[dim] += pad;
        }
    }
    Ok(Box3 { lo, hi })
}

/// Chebyshev-Vandermonde matrix: entry (i, j) is the product of first-kind
/// Chebyshev values at the box-mapped coordinates of point `i`, with columns
/// in graded lexicographic order. Column 1 is identically one.
pub fn chebvand(points: &[Point3], n: usize, bounding_box: &Box3) -> Result<DMatrix<f64>> {
    if points.is_empty() {
        return Err(Error::InvalidParameter(
            "Vandermonde matrix of an empty point set".into(),
        ));
    }
    let indices = graded_lex_indices(n);
    let v = indices.len();
    let m = points.len();
    let mut out = DMatrix::zeros(m, v);
    let mut tab = vec![[0.0f64; 3]; n + 1];
    for (i, p) in points.iter().enumerate() {
        let coords = [p.x, p.y, p.z];
        for dim in 0..3 {
            let x = bounding_box.map_to_unit(dim, coords[dim]);
            if x.abs() > 1.0 + 1e-12 {
                return Err(Error::PointOutsideBox { index: i });
            }
            tab[0][dim] = 1.0;
            if n >= 1 {
                tab[1][dim] = x;
            }
            for k in 2..=n {
                tab[k][dim] = 2.0 * x * tab[k - 1][dim] - tab[k - 2][dim];
            }
        }
        for (j, mi) in indices.iter().enumerate() {
            out[(i, j)] =
                tab[mi.0 as usize][0] * tab[mi.1 as usize][1] * tab[mi.2 as usize][2];
        }
    }
    Ok(out)
}

/// A selected basis of the degree-`n` space restricted to the sampled points.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    pub degree: usize,
    pub bounding_box: Box3,
    /// Dimension of the free trivariate space, `(n+1)(n+2)(n+3)/6`.
    pub full_dim: usize,
    /// Column indices (into the graded-lex basis) of the selected
    /// polynomials, in pivot order. Its length is the restricted dimension.
    pub selected: Vec<usize>,
    /// Set when the full-matrix rank re-verification had to shrink the
    /// selection.
    pub diagnostic: Option<String>,
}

impl PolyBasis {
    /// Restricted-space dimension `N`.
    pub fn dim(&self) -> usize {
        self.selected.len()
    }

    /// Vandermonde matrix of the selected basis at arbitrary points inside
    /// the fitted box.
    pub fn vandermonde(&self, points: &[Point3]) -> Result<DMatrix<f64>> {
        let c = chebvand(points, self.degree, &self.bounding_box)?;
        Ok(c.select_columns(self.selected.iter()))
    }
}

/// Selects a basis of the restricted polynomial space on `points`.
///
/// The rank is taken on the principal square submatrix (first `V` rows) when
/// `M >= V`, which is numerically equivalent for uniformly distributed
/// points and much cheaper than ranking the full rectangular matrix; the
/// column choice comes from a pivoted QR of the same submatrix. The rank of
/// the resulting `M x N` matrix is re-verified on the full row set.
pub fn select_basis(points: &[Point3], n: usize) -> Result<(PolyBasis, DMatrix<f64>)> {
    let bounding_box = fit_box(points)?;
    let c = chebvand(points, n, &bounding_box)?;
    let m = c.nrows();
    let v = c.ncols();

    let c_v = if m >= v {
        c.rows(0, v).into_owned()
    } else {
        c.clone()
    };
    let rank = linalg::numerical_rank(&c_v)?;
    if rank == 0 {
        return Err(Error::InvalidParameter(
            "Vandermonde matrix has numerical rank zero".into(),
        ));
    }
    let (_, _, perm) = linalg::qr_pivoted(&c_v)?;
    let mut selected: Vec<usize> = perm[..rank].to_vec();
    let mut v_m = c.select_columns(selected.iter());

    // Re-verify on all rows: rank(V_M) equals the rank of its triangular
    // factor, at the threshold scaled by the full row count.
    let (_, r_full) = linalg::qr_economy(&v_m)?;
    let rtol = m.max(rank) as f64 * f64::EPSILON;
    let verified = linalg::numerical_rank_with_rtol(&r_full, rtol)?;
    let mut diagnostic = None;
    if verified < rank {
        diagnostic = Some(format!(
            "rank on all {m} rows is {verified}, below the submatrix rank {rank}; selection truncated"
        ));
        selected.truncate(verified);
        v_m = c.select_columns(selected.iter());
    }

    Ok((
        PolyBasis {
            degree: n,
            bounding_box,
            full_dim: v,
            selected,
            diagnostic,
        },
        v_m,
    ))
}
