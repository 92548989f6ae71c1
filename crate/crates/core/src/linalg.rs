//! Dense real matrix kernels shared by the basis-selection and compression
//! stages: economy QR (plain and column-pivoted), numerical rank, and
//! transposed-triangular solves with row pivoting.
//!
//! Everything is dense `f64`; the Vandermonde-like matrices this crate
//! produces have no exploitable sparsity.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

fn check_finite(a: &DMatrix<f64>, what: &'static str) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Economy QR factorization `A = QR` of an m x n matrix with m >= n,
/// by Householder reflections. `Q` is m x n with orthonormal columns and
/// `R` is n x n upper triangular.
pub fn qr_economy(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::DimensionMismatch(format!(
            "economy QR needs at least as many rows as columns, got {m}x{n}"
        )));
    }
    check_finite(a, "qr_economy input")?;
    let qr = a.clone().qr();
    Ok((qr.q(), qr.r()))
}

/// Householder QR with classical max-column-norm pivoting.
///
/// Returns `(Q, R, perm)` with `Q` m x k, `R` k x n (k = min(m, n)) and
/// `perm` the column permutation: `A[:, perm] = Q R`. The diagonal of `R`
/// has non-increasing magnitudes.
///
/// Residual column norms are downdated and recomputed when the downdate
/// loses accuracy, as in the LAPACK pivoted factorizations.
pub fn qr_pivoted(a: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, Vec<usize>)> {
    check_finite(a, "qr_pivoted input")?;
    let (m, n) = a.shape();
    let k = m.min(n);
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);

    let mut norms2: Vec<f64> = (0..n).map(|j| w.column(j).norm_squared()).collect();
    let mut down2 = norms2.clone();

    for i in 0..k {
        let mut jmax = i;
        for j in (i + 1)..n {
            if down2[j] > down2[jmax] {
                jmax = j;
            }
        }
        if jmax != i {
            w.swap_columns(i, jmax);
            perm.swap(i, jmax);
            norms2.swap(i, jmax);
            down2.swap(i, jmax);
        }

        // Householder vector annihilating w[i+1.., i].
        let mut sigma2 = 0.0;
        for r in i..m {
            sigma2 += w[(r, i)] * w[(r, i)];
        }
        let sigma = sigma2.sqrt();
        if sigma == 0.0 {
            reflectors.push((0.0, Vec::new()));
            continue;
        }
        let x0 = w[(i, i)];
        let alpha = if x0 >= 0.0 { -sigma } else { sigma };
        let mut v: Vec<f64> = (i..m).map(|r| w[(r, i)]).collect();
        v[0] = x0 - alpha;
        let beta = 2.0 / v.iter().map(|x| x * x).sum::<f64>();

        w[(i, i)] = alpha;
        for r in (i + 1)..m {
            w[(r, i)] = 0.0;
        }
        for j in (i + 1)..n {
            let mut col_view = w.column_mut(j);
            let col = &mut col_view.as_mut_slice()[i..m];
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let s = beta * dot;
            for (cr, vr) in col.iter_mut().zip(v.iter()) {
                *cr -= s * vr;
            }
            // downdate the residual norm; recompute on accuracy loss
            let head = col[0];
            down2[j] -= head * head;
            if down2[j] <= 1e-12 * norms2[j] {
                down2[j] = col[1..].iter().map(|x| x * x).sum();
                norms2[j] = down2[j];
            }
        }
        reflectors.push((beta, v));
    }

    // Accumulate the economy Q by applying the reflectors to the first k
    // identity columns, in reverse order.
    let mut q = DMatrix::<f64>::zeros(m, k);
    for i in 0..k {
        q[(i, i)] = 1.0;
    }
    for i in (0..k).rev() {
        let (beta, v) = &reflectors[i];
        if *beta == 0.0 {
            continue;
        }
        for col in 0..k {
            let mut col_view = q.column_mut(col);
            let qcol = &mut col_view.as_mut_slice()[i..m];
            let dot: f64 = v.iter().zip(qcol.iter()).map(|(a, b)| a * b).sum();
            let s = beta * dot;
            for (qr, vr) in qcol.iter_mut().zip(v.iter()) {
                *qr -= s * vr;
            }
        }
    }

    let mut rfac = DMatrix::<f64>::zeros(k, n);
    for i in 0..k {
        for j in i..n {
            rfac[(i, j)] = w[(i, j)];
        }
    }
    Ok((q, rfac, perm))
}

/// Number of singular values strictly above `rtol * sigma_max`.
pub fn numerical_rank_with_rtol(a: &DMatrix<f64>, rtol: f64) -> Result<usize> {
    if !rtol.is_finite() || rtol <= 0.0 || rtol >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "rank tolerance must lie in (0, 1), got {rtol}"
        )));
    }
    check_finite(a, "numerical_rank input")?;
    let sv = a.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return Ok(0);
    }
    let thresh = rtol * smax;
    Ok(sv.iter().filter(|&&s| s > thresh).count())
}

/// Numerical rank with the machine-precision-scaled default threshold
/// `max(m, n) * eps * sigma_max`.
pub fn numerical_rank(a: &DMatrix<f64>) -> Result<usize> {
    let dim = a.nrows().max(a.ncols());
    numerical_rank_with_rtol(a, dim as f64 * f64::EPSILON)
}

/// Solution of `R^t X = B` for upper-triangular `R`.
#[derive(Debug, Clone)]
pub struct TriangularSolve {
    pub x: DMatrix<f64>,
    /// Set when the diagonal of `R` spans more than ~1e3/eps in magnitude;
    /// the solve still proceeds.
    pub ill_conditioned: bool,
}

/// Solves `R^t X = B` by Gaussian elimination with row pivoting, never by
/// explicit inversion of `R`.
pub fn solve_transposed_triangular(r: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<TriangularSolve> {
    let n = r.nrows();
    if r.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "triangular factor must be square, got {}x{}",
            n,
            r.ncols()
        )));
    }
    if b.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} rows, expected {}",
            b.nrows(),
            n
        )));
    }
    check_finite(r, "solve_transposed_triangular factor")?;
    check_finite(b, "solve_transposed_triangular rhs")?;

    let mut dmin = f64::INFINITY;
    let mut dmax: f64 = 0.0;
    for i in 0..n {
        let d = r[(i, i)].abs();
        dmin = dmin.min(d);
        dmax = dmax.max(d);
    }
    let ill_conditioned = dmin <= 1e3 * f64::EPSILON * dmax;

    let lu = r.transpose().lu();
    match lu.solve(b) {
        Some(x) => Ok(TriangularSolve { x, ill_conditioned }),
        None => Err(Error::SingularMatrix),
    }
}
