//! Lawson-Hanson active-set solver for `min ||B u - d||_2` subject to
//! `u >= 0`.
//!
//! The active-set iteration naturally produces a sparse solution whose
//! support does not exceed the number of rows of `B`, which is what makes
//! the moment-matching extraction work: each positive entry of `u` becomes
//! a quadrature weight. The restricted least-squares subproblem on the
//! passive set is re-solved from scratch by a dense QR at every change;
//! at the problem sizes this crate produces (a few hundred moments), the
//! simplicity is worth more than incremental up/downdating.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Knobs of the active-set iteration.
#[derive(Debug, Clone)]
pub struct NnlsOptions {
    /// Cap on outer iterations; `None` means `10 * q` for `q` unknowns.
    pub max_outer: Option<usize>,
    /// Relative dual-feasibility tolerance: the iteration stops when every
    /// inactive gradient entry is below `kkt_tol * ||B^t d||_inf`.
    pub kkt_tol: f64,
}

impl Default for NnlsOptions {
    fn default() -> Self {
        NnlsOptions {
            max_outer: None,
            kkt_tol: 1e-12,
        }
    }
}

/// Outcome of one NNLS solve.
#[derive(Debug, Clone)]
pub struct NnlsResult {
    /// Nonnegative solution vector of length `q`.
    pub u: DVector<f64>,
    /// `||B u - d||_2` at the returned iterate.
    pub residual_norm: f64,
    /// Indices with `u_i > 0`, ascending.
    pub support: Vec<usize>,
    /// Outer iterations performed.
    pub iterations: usize,
    /// False when `max_outer` was exhausted; the best iterate is still
    /// returned and the caller decides.
    pub converged: bool,
    /// Residual norm after each outer iteration, starting from `||d||`.
    pub residual_trace: Vec<f64>,
}

fn residual_vec(
    b: &DMatrix<f64>,
    d: &DVector<f64>,
    passive: &[usize],
    x: &DVector<f64>,
) -> DVector<f64> {
    let mut r = d.clone();
    for &i in passive {
        r.axpy(-x[i], &b.column(i).into_owned(), 1.0);
    }
    r
}

/// Least-squares solution restricted to the passive columns, or `None` when
/// the submatrix is numerically singular.
fn restricted_lstsq(
    b: &DMatrix<f64>,
    d: &DVector<f64>,
    passive: &[usize],
) -> Option<DVector<f64>> {
    let k = passive.len();
    let sub = b.select_columns(passive.iter());
    let qr = sub.qr();
    let mut rhs = d.clone();
    qr.q_tr_mul(&mut rhs);
    let r = qr.r();
    let z = r.solve_upper_triangular(&rhs.rows(0, k).into_owned())?;
    if z.iter().all(|v| v.is_finite()) {
        Some(z)
    } else {
        None
    }
}

/// Solves `min ||B u - d||_2, u >= 0` by the Lawson-Hanson active-set
/// method.
pub fn nnls_solve(b: &DMatrix<f64>, d: &DVector<f64>, options: &NnlsOptions) -> Result<NnlsResult> {
    let (p, q) = b.shape();
    if q == 0 {
        return Err(Error::InvalidParameter(
            "NNLS needs at least one unknown".into(),
        ));
    }
    if d.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {p}x{q} but right-hand side has length {}",
            d.len()
        )));
    }
    if !b.iter().all(|x| x.is_finite()) || !d.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("nnls input"));
    }

    let max_outer = options.max_outer.unwrap_or(10 * q);
    let grad_scale = b.tr_mul(d).amax();
    let kkt_thresh = if grad_scale > 0.0 {
        options.kkt_tol * grad_scale
    } else {
        options.kkt_tol
    };

    let mut x = DVector::<f64>::zeros(q);
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = vec![false; q];
    let mut iterations = 0usize;
    let mut converged = false;
    let mut residual_trace = vec![d.norm()];

    'outer: while iterations < max_outer {
        let r = residual_vec(b, d, &passive, &x);
        let w = b.tr_mul(&r);

        // Pick the most positive inactive gradient entry; entries that fail
        // the tentative solve are skipped for the rest of this pass.
        let mut excluded = vec![false; q];
        let mut z;
        loop {
            if passive.len() >= p.min(q) {
                converged = true;
                break 'outer;
            }
            let mut best: Option<usize> = None;
            let mut best_val = kkt_thresh;
            for i in 0..q {
                if !in_passive[i] && !excluded[i] && w[i] > best_val {
                    best = Some(i);
                    best_val = w[i];
                }
            }
            let j = match best {
                Some(j) => j,
                None => {
                    converged = true;
                    break 'outer;
                }
            };
            passive.push(j);
            in_passive[j] = true;
            match restricted_lstsq(b, d, &passive) {
                Some(cand) if cand[passive.len() - 1] > 0.0 => {
                    z = cand;
                    break;
                }
                _ => {
                    passive.pop();
                    in_passive[j] = false;
                    excluded[j] = true;
                }
            }
        }

        // Inner loop: shorten the step until the passive iterate is
        // strictly feasible; variables driven to zero go back to the
        // active set.
        loop {
            if z.iter().all(|&zi| zi > 0.0) {
                for (k, &i) in passive.iter().enumerate() {
                    x[i] = z[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            let mut leaving = usize::MAX;
            for (k, &i) in passive.iter().enumerate() {
                if z[k] <= 0.0 {
                    let denom = x[i] - z[k];
                    let a = if denom > 0.0 { x[i] / denom } else { 0.0 };
                    if a < alpha {
                        alpha = a;
                        leaving = k;
                    }
                }
            }
            for (k, &i) in passive.iter().enumerate() {
                x[i] += alpha * (z[k] - x[i]);
            }
            let xmax = passive.iter().map(|&i| x[i]).fold(0.0f64, f64::max);
            let leaving_idx = passive[leaving];
            let mut kept = Vec::with_capacity(passive.len());
            for &i in &passive {
                if i == leaving_idx || x[i] <= 1e-14 * xmax {
                    x[i] = 0.0;
                    in_passive[i] = false;
                } else {
                    kept.push(i);
                }
            }
            passive = kept;
            if passive.is_empty() {
                break;
            }
            match restricted_lstsq(b, d, &passive) {
                Some(cand) => z = cand,
                None => {
                    // degenerate passive set: drop the smallest variable
                    let (k, _) = passive
                        .iter()
                        .enumerate()
                        .min_by(|a, b| x[*a.1].partial_cmp(&x[*b.1]).unwrap())
                        .unwrap();
                    let i = passive.remove(k);
                    x[i] = 0.0;
                    in_passive[i] = false;
                    if passive.is_empty() {
                        break;
                    }
                    z = match restricted_lstsq(b, d, &passive) {
                        Some(cand) => cand,
                        None => break,
                    };
                }
            }
        }

        iterations += 1;
        residual_trace.push(residual_vec(b, d, &passive, &x).norm());
    }

    let residual_norm = residual_vec(b, d, &passive, &x).norm();
    let mut support: Vec<usize> = (0..q).filter(|&i| x[i] > 0.0).collect();
    support.sort_unstable();
    Ok(NnlsResult {
        u: x,
        residual_norm,
        support,
        iterations,
        converged,
        residual_trace,
    })
}
