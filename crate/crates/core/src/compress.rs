//! The QMC functional, its moments, and node-set compression: a bottom-up
//! loop that solves a sequence of small nonnegative moment-matching problems
//! on nested point prefixes, plus the full-matrix one-shot variant used as a
//! baseline and cross-check.
//!
//! Given `M` uniform nodes and the `N`-dimensional selected basis, the loop
//! factors the first `m` Vandermonde rows, orthogonalizes the moment system,
//! and asks the NNLS solver for a sparse nonnegative representation. The
//! residual decides what happens next: accept, grow `m` geometrically, or —
//! when the residual stalls — switch to the numerically sturdier moment
//! computation that runs through the full matrix.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fmt_g17;
use crate::linalg::{qr_economy, solve_transposed_triangular};
use crate::nnls::{nnls_solve, NnlsOptions, NnlsResult};
use crate::surface::SampleSet;
use crate::Point3;

/// Knobs of the bottom-up compression loop.
#[derive(Debug, Clone)]
pub struct CompressParams {
    /// Relative moment-residual tolerance for acceptance.
    pub eps: f64,
    /// Geometric growth factor for the working prefix size.
    pub theta: f64,
    /// Residual-decrease threshold: a step that improves the residual by
    /// less than this factor triggers the fallback path.
    pub tau: f64,
    /// The initial prefix holds `ceil(m_init_factor * N)` points.
    pub m_init_factor: f64,
}

impl Default for CompressParams {
    fn default() -> Self {
        CompressParams {
            eps: 1e-10,
            theta: 2.0,
            tau: 10.0,
            m_init_factor: 2.0,
        }
    }
}

impl CompressParams {
    fn validate(&self) -> Result<()> {
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "residual tolerance must be positive, got {}",
                self.eps
            )));
        }
        if self.theta.is_nan() || self.theta <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "growth factor must exceed 1, got {}",
                self.theta
            )));
        }
        if self.tau.is_nan() || self.tau <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "decrease threshold must exceed 1, got {}",
                self.tau
            )));
        }
        if self.m_init_factor.is_nan() || self.m_init_factor < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "initial prefix factor must be >= 1, got {}",
                self.m_init_factor
            )));
        }
        Ok(())
    }
}

/// QMC moments of the selected basis.
#[derive(Debug, Clone)]
pub struct MomentVector {
    pub lambda: DVector<f64>,
    pub sigma_j: f64,
}

/// One record per NNLS solve of a compression run.
#[derive(Debug, Clone, Copy)]
pub struct IterationRecord {
    /// Prefix size used.
    pub m: usize,
    /// 0: moments through the triangular solve; 1: through the full matrix.
    pub momtype: u8,
    /// Relative moment residual after the solve.
    pub residual: f64,
    /// Whether the NNLS solve hit its KKT tolerance.
    pub nnls_converged: bool,
    /// Wall time spent building the full preconditioned matrix, when the
    /// fallback path ran (0 otherwise).
    pub a_full_seconds: f64,
}

/// A compressed QMC rule: few nodes, positive weights, matched moments.
#[derive(Debug, Clone)]
pub struct CompressedRule {
    pub nodes: Vec<Point3>,
    pub weights: Vec<f64>,
    /// Positions of the nodes in the original sample.
    pub indices: Vec<usize>,
    pub degree: usize,
    pub sigma_j: f64,
    /// Relative moment residual at extraction.
    pub residual: f64,
    pub trace: Vec<IterationRecord>,
    pub converged: bool,
}

impl CompressedRule {
    /// Number of nodes.
    pub fn nu(&self) -> usize {
        self.weights.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Applies the rule to an integrand.
    pub fn evaluate<F: Fn(&Point3) -> f64>(&self, f: F) -> Result<f64> {
        evaluate_rule(self, f)
    }

    /// Serializes the rule with 17-significant-digit reals.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"degree\": {},\n", self.degree));
        out.push_str(&format!("  \"nu\": {},\n", self.nu()));
        out.push_str(&format!("  \"sigma_J\": {},\n", fmt_g17(self.sigma_j)));
        out.push_str(&format!("  \"residual\": {},\n", fmt_g17(self.residual)));
        out.push_str(&format!("  \"converged\": {},\n", self.converged));
        out.push_str("  \"nodes\": [\n");
        for (k, p) in self.nodes.iter().enumerate() {
            let sep = if k + 1 < self.nodes.len() { "," } else { "" };
            out.push_str(&format!(
                "    [{}, {}, {}]{}\n",
                fmt_g17(p.x),
                fmt_g17(p.y),
                fmt_g17(p.z),
                sep
            ));
        }
        out.push_str("  ],\n");
        out.push_str("  \"weights\": [\n");
        for (k, w) in self.weights.iter().enumerate() {
            let sep = if k + 1 < self.weights.len() { "," } else { "" };
            out.push_str(&format!("    {}{}\n", fmt_g17(*w), sep));
        }
        out.push_str("  ],\n");
        out.push_str("  \"trace\": [\n");
        for (k, rec) in self.trace.iter().enumerate() {
            let sep = if k + 1 < self.trace.len() { "," } else { "" };
            out.push_str(&format!(
                "    {{\"m\": {}, \"momtype\": {}, \"residual\": {}}}{}\n",
                rec.m,
                rec.momtype,
                fmt_g17(rec.residual),
                sep
            ));
        }
        out.push_str("  ]\n}\n");
        out
    }
}

/// QMC moments `lambda = V_M^t e` with `e = (sigma_J / M) (1, ..., 1)^t`.
pub fn qmc_moments(v_m: &DMatrix<f64>, sigma_j: f64) -> Result<MomentVector> {
    if v_m.nrows() == 0 {
        return Err(Error::DimensionMismatch(
            "moment computation needs at least one row".into(),
        ));
    }
    if !sigma_j.is_finite() || sigma_j <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "region measure must be positive, got {sigma_j}"
        )));
    }
    let m = v_m.nrows();
    let e = DVector::from_element(m, sigma_j / m as f64);
    Ok(MomentVector {
        lambda: v_m.tr_mul(&e),
        sigma_j,
    })
}

/// The plain QMC sum `sigma(J)/M * sum_i f(P_i)`.
pub fn qmc_integrate<F: Fn(&Point3) -> f64>(sample: &SampleSet, f: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample { m0: sample.m0 });
    }
    let mut acc = 0.0;
    for p in &sample.points {
        let y = f(p);
        if !y.is_finite() {
            return Err(Error::NonFinite("integrand value"));
        }
        acc += y;
    }
    Ok(sample.sigma_j * (acc / sample.len() as f64))
}

/// The compressed sum `sum_k w_k f(Z_k)`.
pub fn evaluate_rule<F: Fn(&Point3) -> f64>(rule: &CompressedRule, f: F) -> Result<f64> {
    if rule.nodes.is_empty() {
        return Err(Error::InvalidParameter("empty rule".into()));
    }
    let mut acc = 0.0;
    for (p, w) in rule.nodes.iter().zip(&rule.weights) {
        let y = f(p);
        if !y.is_finite() {
            return Err(Error::NonFinite("integrand value"));
        }
        acc += w * y;
    }
    Ok(acc)
}

fn extract_rule(
    sample: &SampleSet,
    nnls: &NnlsResult,
    degree: usize,
    sigma_j: f64,
    residual: f64,
    trace: Vec<IterationRecord>,
    converged: bool,
) -> Result<CompressedRule> {
    if nnls.support.is_empty() {
        return Err(Error::InvalidParameter(
            "compression produced an empty support".into(),
        ));
    }
    let mut nodes = Vec::with_capacity(nnls.support.len());
    let mut weights = Vec::with_capacity(nnls.support.len());
    for &i in &nnls.support {
        nodes.push(sample.points[i]);
        weights.push(nnls.u[i]);
    }
    Ok(CompressedRule {
        nodes,
        weights,
        indices: nnls.support.clone(),
        degree,
        sigma_j,
        residual,
        trace,
        converged,
    })
}

struct MomentSystem {
    b: DMatrix<f64>,
    q_mom: DVector<f64>,
    a_full_seconds: f64,
}

/// Orthogonalized moment system on the first `m` rows: NNLS matrix `A_m^t`
/// and modified moments `q_m`.
fn moment_system(
    v_m: &DMatrix<f64>,
    v_sub: &DMatrix<f64>,
    r_fact: &DMatrix<f64>,
    q_fact: DMatrix<f64>,
    lambda: &DVector<f64>,
    sigma_j: f64,
    momtype: u8,
) -> Result<MomentSystem> {
    let n_dim = v_sub.ncols();
    if momtype == 0 {
        let lam_col = DMatrix::from_column_slice(n_dim, 1, lambda.as_slice());
        let sol = solve_transposed_triangular(r_fact, &lam_col)?;
        Ok(MomentSystem {
            b: q_fact.transpose(),
            q_mom: DVector::from_column_slice(sol.x.as_slice()),
            a_full_seconds: 0.0,
        })
    } else {
        // A_M^t = R^-t V_M^t, computed through the triangular solve; the
        // modified moments come from the full matrix: q_m = A_M^t e.
        let t0 = Instant::now();
        let m_total = v_m.nrows();
        let vt = v_m.transpose();
        let a_m_t = solve_transposed_triangular(r_fact, &vt)?.x;
        let e_val = sigma_j / m_total as f64;
        let q_mom = DVector::from_fn(n_dim, |i, _| a_m_t.row(i).sum() * e_val);
        let b = a_m_t.columns(0, v_sub.nrows()).into_owned();
        Ok(MomentSystem {
            b,
            q_mom,
            a_full_seconds: t0.elapsed().as_secs_f64(),
        })
    }
}

/// Bottom-up compression of the QMC functional.
///
/// Works on nested prefixes `X_m` of the sample, growing `m` by `theta`
/// until the relative moment residual drops below `eps`. A residual that
/// improves by less than `tau` switches the moment computation to the
/// full-matrix path once, and afterwards jumps straight to `m = M`; when
/// geometric growth would overshoot, one final pass at `m = M` runs before
/// the run is declared not converged. Runs that fail still return the best
/// rule found, flagged `converged = false`.
pub fn bottom_up_compress(
    sample: &SampleSet,
    v_m: &DMatrix<f64>,
    moments: &MomentVector,
    params: &CompressParams,
    degree: usize,
) -> Result<CompressedRule> {
    params.validate()?;
    let m_total = v_m.nrows();
    let n_dim = v_m.ncols();
    if sample.len() != m_total {
        return Err(Error::DimensionMismatch(format!(
            "sample has {} points but the Vandermonde matrix has {m_total} rows",
            sample.len()
        )));
    }
    if moments.lambda.len() != n_dim {
        return Err(Error::DimensionMismatch(format!(
            "moment vector has length {} for {n_dim} basis columns",
            moments.lambda.len()
        )));
    }
    if n_dim > m_total {
        return Err(Error::DimensionMismatch(format!(
            "need at least as many points as basis functions ({n_dim} > {m_total})"
        )));
    }
    let lambda = &moments.lambda;
    let lambda_norm = lambda.norm();
    if lambda_norm == 0.0 {
        return Err(Error::InvalidParameter("zero moment vector".into()));
    }

    let mut m = ((params.m_init_factor * n_dim as f64).ceil() as usize)
        .max(n_dim)
        .min(m_total);
    let mut momtype: u8 = 0;
    let mut prev_res: Option<f64> = None;
    let mut trace: Vec<IterationRecord> = Vec::new();
    let mut best: Option<(f64, NnlsResult)> = None;

    loop {
        let v_sub = v_m.rows(0, m).into_owned();
        let (q_fact, r_fact) = qr_economy(&v_sub)?;
        let system = moment_system(
            v_m,
            &v_sub,
            &r_fact,
            q_fact,
            lambda,
            moments.sigma_j,
            momtype,
        )?;
        let nnls = nnls_solve(&system.b, &system.q_mom, &NnlsOptions::default())?;
        let res = (v_sub.tr_mul(&nnls.u) - lambda).norm() / lambda_norm;
        trace.push(IterationRecord {
            m,
            momtype,
            residual: res,
            nnls_converged: nnls.converged,
            a_full_seconds: system.a_full_seconds,
        });

        if best.as_ref().is_none_or(|(b_res, _)| res < *b_res) {
            best = Some((res, nnls.clone()));
        }

        // Insufficient residual decrease: switch the moment path once, then
        // exhaust the whole sample. This check precedes acceptance.
        if let Some(pr) = prev_res {
            if m < m_total && pr / res < params.tau {
                if momtype == 0 {
                    momtype = 1;
                } else {
                    m = m_total;
                }
                continue;
            }
        }

        if res <= params.eps {
            return extract_rule(sample, &nnls, degree, moments.sigma_j, res, trace, true);
        }
        let grown = (params.theta * m as f64).ceil() as usize;
        if grown <= m_total {
            prev_res = Some(res);
            m = grown;
        } else if m < m_total {
            prev_res = Some(res);
            m = m_total;
        } else {
            let (best_res, best_nnls) = best.expect("at least one iteration ran");
            return extract_rule(
                sample,
                &best_nnls,
                degree,
                moments.sigma_j,
                best_res,
                trace,
                false,
            );
        }
    }
}

/// One-shot compression on the full matrix, with the same orthogonalization
/// preconditioning as the bottom-up loop. Intended for moderate sample sizes
/// as a baseline and cross-check.
pub fn caratheodory_compress(
    sample: &SampleSet,
    v_m: &DMatrix<f64>,
    moments: &MomentVector,
    eps: f64,
    degree: usize,
) -> Result<CompressedRule> {
    let m_total = v_m.nrows();
    if sample.len() != m_total {
        return Err(Error::DimensionMismatch(format!(
            "sample has {} points but the Vandermonde matrix has {m_total} rows",
            sample.len()
        )));
    }
    let lambda = &moments.lambda;
    let lambda_norm = lambda.norm();
    if lambda_norm == 0.0 {
        return Err(Error::InvalidParameter("zero moment vector".into()));
    }
    let (q_fact, r_fact) = qr_economy(v_m)?;
    let lam_col = DMatrix::from_column_slice(v_m.ncols(), 1, lambda.as_slice());
    let q_mom = DVector::from_column_slice(
        solve_transposed_triangular(&r_fact, &lam_col)?.x.as_slice(),
    );
    let b = q_fact.transpose();
    let nnls = nnls_solve(&b, &q_mom, &NnlsOptions::default())?;
    let res = (v_m.tr_mul(&nnls.u) - lambda).norm() / lambda_norm;
    let trace = vec![IterationRecord {
        m: m_total,
        momtype: 0,
        residual: res,
        nnls_converged: nnls.converged,
        a_full_seconds: 0.0,
    }];
    extract_rule(
        sample,
        &nnls,
        degree,
        moments.sigma_j,
        res,
        trace,
        res <= eps,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowdisc::HaltonStream;
    use crate::polyspace::select_basis;
    use crate::region::Region;
    use crate::surface::{sample_region, sphere_cap, torus};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn torus_sample(m0: usize) -> SampleSet {
        let t = torus(3.0, 2.0).unwrap();
        let mut stream = HaltonStream::new();
        sample_region(&t, &Region::Full, m0, &mut stream, None).unwrap()
    }

    #[test]
    fn moments_of_constant_column() {
        let v = DMatrix::<f64>::from_element(10, 1, 1.0);
        let mom = qmc_moments(&v, 2.5).unwrap();
        assert!((mom.lambda[0] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn moments_of_alternating_column_cancel() {
        let m = 100;
        let v = DMatrix::from_fn(m, 2, |i, j| {
            if j == 0 || i % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        });
        let mom = qmc_moments(&v, 7.0).unwrap();
        assert!((mom.lambda[0] - 7.0).abs() < 1e-13);
        assert!(mom.lambda[1].abs() < 1e-13);
    }

    #[test]
    fn moments_match_rowwise_accumulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = DMatrix::from_fn(100, 7, |_, _| rng.random::<f64>() - 0.5);
        let sigma = 3.7;
        let mom = qmc_moments(&v, sigma).unwrap();
        let mut naive = DVector::<f64>::zeros(7);
        for i in 0..100 {
            for j in 0..7 {
                naive[j] += v[(i, j)] * sigma / 100.0;
            }
        }
        assert!((mom.lambda - naive).norm() <= 1e-13 * sigma);
    }

    #[test]
    fn qmc_integrate_constants() {
        let s = torus_sample(2000);
        assert_eq!(qmc_integrate(&s, |_| 1.0).unwrap(), s.sigma_j);
        let c = 2.5;
        let got = qmc_integrate(&s, |_| c).unwrap();
        assert!((got - c * s.sigma_j).abs() <= 1e-13 * s.sigma_j);
    }

    #[test]
    fn qmc_integrate_odd_function_on_torus() {
        let s = torus_sample(100_000);
        let val = qmc_integrate(&s, |p| p.z).unwrap();
        assert!(val.abs() <= 0.5, "z integral {val}");
    }

    #[test]
    fn qmc_integrate_rejects_nonfinite_integrand() {
        let s = torus_sample(100);
        assert!(qmc_integrate(&s, |p| (p.x - p.x) / 0.0).is_err());
    }

    #[test]
    fn degree_zero_gives_single_node_with_total_mass() {
        let s = torus_sample(500);
        let (basis, v) = select_basis(&s.points, 0).unwrap();
        assert_eq!(basis.dim(), 1);
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        let rule = bottom_up_compress(&s, &v, &mom, &CompressParams::default(), 0).unwrap();
        assert!(rule.converged);
        assert_eq!(rule.nu(), 1);
        assert!(rule.residual <= 1e-15);
        assert!((rule.total_weight() - s.sigma_j).abs() <= 1e-12 * s.sigma_j);
        assert_eq!(rule.trace.len(), 1);
    }

    #[test]
    fn sphere_cap_compression_validates_from_scratch() {
        let cap = sphere_cap(1.0, 0.2).unwrap();
        let mut stream = HaltonStream::new();
        let s = sample_region(&cap, &Region::Full, 4000, &mut stream, None).unwrap();
        let (basis, v) = select_basis(&s.points, 3).unwrap();
        assert_eq!(basis.dim(), 16);
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        let rule = bottom_up_compress(&s, &v, &mom, &CompressParams::default(), 3).unwrap();
        assert!(rule.converged);
        assert!(rule.nu() <= 16);
        assert!(rule.weights.iter().all(|&w| w > 0.0));

        // moment residual recomputed from a fresh Vandermonde at the nodes
        let v_nodes = basis.vandermonde(&rule.nodes).unwrap();
        let w = DVector::from_column_slice(&rule.weights);
        let res = (v_nodes.tr_mul(&w) - &mom.lambda).norm() / mom.lambda.norm();
        assert!(res <= 1e-10, "recomputed residual {res}");

        // nodes are sample points
        for (&idx, node) in rule.indices.iter().zip(&rule.nodes) {
            assert_eq!(&s.points[idx], node);
        }

        // constant exactness and basis-polynomial exactness
        let mass = evaluate_rule(&rule, |_| 1.0).unwrap();
        assert!((mass - s.sigma_j).abs() <= 1e-9 * s.sigma_j);
        for j in 0..basis.dim() {
            let col = v_nodes.column(j);
            let lhs: f64 = col.iter().zip(&rule.weights).map(|(a, w)| a * w).sum();
            assert!((lhs - mom.lambda[j]).abs() <= 1e-10 * mom.lambda.norm());
        }
    }

    #[test]
    fn bottom_up_agrees_with_full_matrix_baseline() {
        let s = torus_sample(3000);
        let (_, v) = select_basis(&s.points, 3).unwrap();
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        let fast = bottom_up_compress(&s, &v, &mom, &CompressParams::default(), 3).unwrap();
        let full = caratheodory_compress(&s, &v, &mom, 1e-10, 3).unwrap();
        assert!(fast.converged && full.converged);
        assert!(fast.residual <= 1e-10 && full.residual <= 1e-10);
        assert!(full.nu() <= 20 && fast.nu() <= 20);
    }

    #[test]
    fn trace_structure_is_sound() {
        // a degree high enough that the initial prefix cannot match moments
        let s = torus_sample(4000);
        let (basis, v) = select_basis(&s.points, 6).unwrap();
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        let rule = bottom_up_compress(&s, &v, &mom, &CompressParams::default(), 6).unwrap();
        assert!(rule.converged, "trace: {:?}", rule.trace);
        assert!(rule.nu() <= basis.dim());
        let mut switches = 0;
        for pair in rule.trace.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if b.momtype != a.momtype {
                assert_eq!((a.momtype, b.momtype), (0, 1));
                assert_eq!(a.m, b.m, "momtype switch must repeat the same m");
                switches += 1;
            } else {
                assert!(b.m > a.m, "m must strictly increase");
            }
        }
        assert!(switches <= 1);
    }

    #[test]
    fn fallback_switches_momtype_once_then_exhausts_sample() {
        // start at m = N so the first pass cannot match the moments, and an
        // enormous decrease threshold makes the second pass look stalled,
        // forcing the full-matrix moment path and then m = M
        let s = torus_sample(2500);
        let (_, v) = select_basis(&s.points, 6).unwrap();
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        let params = CompressParams {
            tau: 1e30,
            m_init_factor: 1.0,
            ..CompressParams::default()
        };
        let rule = bottom_up_compress(&s, &v, &mom, &params, 6).unwrap();
        let kinds: Vec<(usize, u8)> = rule.trace.iter().map(|r| (r.m, r.momtype)).collect();
        assert!(kinds.len() >= 3, "trace: {kinds:?}");
        // same m repeated across the momtype switch
        assert_eq!(kinds[1].0, kinds[2].0);
        assert_eq!((kinds[1].1, kinds[2].1), (0, 1));
        // afterwards the loop jumps to the whole sample, still on momtype 1
        let last = rule.trace.last().unwrap();
        assert_eq!(last.m, s.len());
        assert_eq!(last.momtype, 1);
        assert!(rule.converged, "trace: {:?}", rule.trace);

        // both moment paths solve the same problem at the repeated m
        let (a, b) = (rule.trace[1].residual, rule.trace[2].residual);
        assert!((a - b).abs() <= 1e-8 + 1e-6 * a.max(b), "residuals {a} vs {b}");
    }

    #[test]
    fn unreachable_tolerance_reports_not_converged() {
        let s = torus_sample(300);
        let (_, v) = select_basis(&s.points, 4).unwrap();
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        // impossible tolerance: even exact matching sits at ~1e-16
        let params = CompressParams {
            eps: 1e-30,
            ..CompressParams::default()
        };
        let rule = bottom_up_compress(&s, &v, &mom, &params, 4).unwrap();
        assert!(!rule.converged);
        assert!(rule.residual > 0.0);
        let last = rule.trace.last().unwrap();
        assert_eq!(last.m, s.len(), "the loop must exhaust the sample");
    }

    #[test]
    fn caratheodory_square_system() {
        // M = N: the determined system reproduces the unique solution
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cap = sphere_cap(1.0, 0.3).unwrap();
        let mut stream = HaltonStream::new();
        let s = sample_region(&cap, &Region::Full, 16, &mut stream, None).unwrap();
        let (_, v) = select_basis(&s.points, 1).unwrap();
        // build moments from a known nonnegative u*
        let u_true = DVector::from_fn(16, |_, _| rng.random::<f64>() + 0.1);
        let lambda = v.tr_mul(&u_true);
        let mom = MomentVector {
            lambda,
            sigma_j: s.sigma_j,
        };
        let rule = caratheodory_compress(&s, &v, &mom, 1e-10, 1).unwrap();
        assert!(rule.residual <= 1e-12);
    }

    #[test]
    fn params_are_validated() {
        let s = torus_sample(100);
        let (_, v) = select_basis(&s.points, 1).unwrap();
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        for bad in [
            CompressParams {
                eps: 0.0,
                ..Default::default()
            },
            CompressParams {
                theta: 1.0,
                ..Default::default()
            },
            CompressParams {
                tau: 0.5,
                ..Default::default()
            },
            CompressParams {
                m_init_factor: 0.5,
                ..Default::default()
            },
        ] {
            assert!(bottom_up_compress(&s, &v, &mom, &bad, 1).is_err());
        }
    }

    #[test]
    fn rule_json_has_expected_shape() {
        let s = torus_sample(400);
        let (_, v) = select_basis(&s.points, 2).unwrap();
        let mom = qmc_moments(&v, s.sigma_j).unwrap();
        let rule = bottom_up_compress(&s, &v, &mom, &CompressParams::default(), 2).unwrap();
        let json = rule.to_json();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["degree"], 2);
        assert_eq!(parsed["nu"].as_u64().unwrap() as usize, rule.nu());
        assert_eq!(parsed["nodes"].as_array().unwrap().len(), rule.nu());
        assert_eq!(parsed["weights"].as_array().unwrap().len(), rule.nu());
        assert!(!parsed["trace"].as_array().unwrap().is_empty());
        assert_eq!(parsed["converged"], true);
    }
}
