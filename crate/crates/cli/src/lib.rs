//! End-to-end driver: load a scene, sample it, compress at each requested
//! degree, compare against the full-matrix baseline and a high-cardinality
//! reference, and write everything to CSV/JSON artifacts.
//!
//! All artifact files are deterministic functions of
//! (scene, degrees, parameters, seed index); wall-clock timings are reported
//! on standard output only, never in the files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use qsurf_core::compress::{
    bottom_up_compress, caratheodory_compress, qmc_integrate, qmc_moments, CompressParams,
    CompressedRule, MomentVector,
};
use qsurf_core::polyspace::{select_basis, PolyBasis};
use qsurf_core::scene::{load_scene, Scene};
use qsurf_core::surface::{sample_region, SampleSet};
use qsurf_core::{fmt_g17, DVector, Error, HaltonStream, Point3, Result};

/// The three standard test integrands, anchored at a scene point.
#[derive(Debug, Clone, Copy)]
pub struct TestFunctions {
    p0: Point3,
}

impl TestFunctions {
    pub const NAMES: [&'static str; 3] = ["g1", "g2", "g3"];

    pub fn new(p0: Point3) -> Self {
        TestFunctions { p0 }
    }

    /// `exp(-|P - P0|)`
    pub fn g1(&self, p: &Point3) -> f64 {
        (-(p - self.p0).norm()).exp()
    }

    /// `cos(x + y + z)`
    pub fn g2(&self, p: &Point3) -> f64 {
        (p.x + p.y + p.z).cos()
    }

    /// `|P - P0|^5`
    pub fn g3(&self, p: &Point3) -> f64 {
        (p - self.p0).norm().powi(5)
    }

    pub fn eval(&self, index: usize, p: &Point3) -> f64 {
        match index {
            0 => self.g1(p),
            1 => self.g2(p),
            2 => self.g3(p),
            _ => panic!("test function index out of range"),
        }
    }
}

/// [`TestFunctions`] anchored at `p0`.
pub fn test_functions(p0: Point3) -> TestFunctions {
    TestFunctions::new(p0)
}

/// QMC value of `f` on an independent, longer low-discrepancy prefix
/// starting at `start_index`.
pub fn reference_integral<F: Fn(&Point3) -> f64>(
    scene: &Scene,
    f: F,
    m0_ref: usize,
    start_index: u64,
) -> Result<f64> {
    let mut stream = HaltonStream::starting_at(start_index);
    let sample = sample_region(&scene.surface, &scene.region, m0_ref, &mut stream, scene.sigma_j)?;
    qmc_integrate(&sample, f)
}

/// Whether to run the full-matrix baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMode {
    /// Run it when the sample is at most `baseline_cap` points.
    Auto,
    On,
    Off,
}

impl std::str::FromStr for BaselineMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "auto" => Ok(BaselineMode::Auto),
            "on" => Ok(BaselineMode::On),
            "off" => Ok(BaselineMode::Off),
            other => Err(format!("unknown baseline mode {other:?} (auto|on|off)")),
        }
    }
}

/// Everything a scene run needs besides the scene itself.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub degrees: Vec<usize>,
    pub params: CompressParams,
    /// Halton start index of the run; the reference prefix starts right
    /// after the run's raw attempts.
    pub seed_index: u64,
    /// Overrides the scene's raw sample budget.
    pub m0_override: Option<usize>,
    pub baseline: BaselineMode,
    /// Sample-size cap for the automatic baseline.
    pub baseline_cap: usize,
    /// Reference budget as a multiple of the run's budget.
    pub ref_factor: usize,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn new(degrees: Vec<usize>, out_dir: PathBuf) -> Self {
        RunConfig {
            degrees,
            params: CompressParams::default(),
            seed_index: 1,
            m0_override: None,
            baseline: BaselineMode::Auto,
            baseline_cap: 20_000,
            ref_factor: 20,
            out_dir,
        }
    }
}

/// Per-function relative errors against the reference value.
#[derive(Debug, Clone)]
pub struct FunctionErrors {
    pub function: &'static str,
    pub qmc: f64,
    pub compressed: f64,
    pub baseline: Option<f64>,
}

/// Everything measured for one degree.
#[derive(Debug)]
pub struct DegreeReport {
    pub degree: usize,
    pub full_dim: usize,
    pub dim: usize,
    pub rule: CompressedRule,
    /// Moment residual recomputed from a fresh Vandermonde at the nodes,
    /// never copied from solver state.
    pub residual_recomputed: f64,
    pub baseline: Option<CompressedRule>,
    pub baseline_residual_recomputed: Option<f64>,
    pub compression_ratio: f64,
    pub errors: Vec<FunctionErrors>,
    pub t_basis: f64,
    pub t_compress: f64,
    pub t_baseline: Option<f64>,
}

/// Full outcome of one scene run.
#[derive(Debug)]
pub struct RunReport {
    pub scene_name: String,
    pub m0: usize,
    pub m_surface: usize,
    pub m: usize,
    pub sigma_j: f64,
    /// Reference integrals of g1..g3.
    pub reference: [f64; 3],
    /// Plain QMC integrals of g1..g3 on the run sample.
    pub qmc_values: [f64; 3],
    pub degrees: Vec<DegreeReport>,
    pub t_sample: f64,
    pub t_reference: f64,
    pub all_converged: bool,
}

fn recomputed_residual(
    basis: &PolyBasis,
    rule: &CompressedRule,
    moments: &MomentVector,
) -> Result<f64> {
    let v_nodes = basis.vandermonde(&rule.nodes)?;
    let w = DVector::from_column_slice(&rule.weights);
    Ok((v_nodes.tr_mul(&w) - &moments.lambda).norm() / moments.lambda.norm())
}

fn rel_err(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs()
}

fn write_points_csv(path: &Path, sample: &SampleSet) -> Result<()> {
    let mut out = String::with_capacity(sample.len() * 64);
    out.push_str("x,y,z\n");
    for p in &sample.points {
        let _ = writeln!(out, "{},{},{}", fmt_g17(p.x), fmt_g17(p.y), fmt_g17(p.z));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_report_csv(path: &Path, report: &RunReport) -> Result<()> {
    let mut out = String::new();
    out.push_str(
        "scene,degree,M0,M_S,M,sigma_J,full_dim,N,nu,residual,iterations,converged,\
         compression_ratio,nu_baseline,residual_baseline,baseline_converged\n",
    );
    for d in &report.degrees {
        let (nu_b, res_b, conv_b) = match (&d.baseline, d.baseline_residual_recomputed) {
            (Some(b), Some(r)) => (b.nu().to_string(), fmt_g17(r), b.converged.to_string()),
            _ => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            report.scene_name,
            d.degree,
            report.m0,
            report.m_surface,
            report.m,
            fmt_g17(report.sigma_j),
            d.full_dim,
            d.dim,
            d.rule.nu(),
            fmt_g17(d.residual_recomputed),
            d.rule.trace.len(),
            d.rule.converged,
            fmt_g17(d.compression_ratio),
            nu_b,
            res_b,
            conv_b,
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn write_errors_csv(path: &Path, report: &RunReport) -> Result<()> {
    let mut out = String::new();
    out.push_str("function,method");
    for d in &report.degrees {
        let _ = write!(out, ",deg{}", d.degree);
    }
    out.push('\n');
    for (fi, name) in TestFunctions::NAMES.iter().enumerate() {
        for method in ["qmc", "bottom_up", "baseline"] {
            let _ = write!(out, "{name},{method}");
            for d in &report.degrees {
                let cell = match method {
                    "qmc" => Some(d.errors[fi].qmc),
                    "bottom_up" => Some(d.errors[fi].compressed),
                    _ => d.errors[fi].baseline,
                };
                match cell {
                    Some(v) => {
                        let _ = write!(out, ",{}", fmt_g17(v));
                    }
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Runs a loaded scene end to end and writes all artifacts to
/// `cfg.out_dir`: `points.csv`, one `rule_deg<n>.json` per degree,
/// `report.csv` and `errors.csv`.
pub fn run_loaded_scene(scene: &Scene, cfg: &RunConfig) -> Result<RunReport> {
    if cfg.degrees.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one degree is required".into(),
        ));
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let m0 = cfg.m0_override.unwrap_or(scene.m0);

    let t0 = Instant::now();
    let mut stream = HaltonStream::starting_at(cfg.seed_index);
    let sample = sample_region(&scene.surface, &scene.region, m0, &mut stream, scene.sigma_j)?;
    let t_sample = t0.elapsed().as_secs_f64();
    write_points_csv(&cfg.out_dir.join("points.csv"), &sample)?;

    let tf = TestFunctions::new(scene.p0);
    let t1 = Instant::now();
    let mut ref_stream = HaltonStream::starting_at(cfg.seed_index + m0 as u64);
    let ref_sample = sample_region(
        &scene.surface,
        &scene.region,
        cfg.ref_factor.max(1) * m0,
        &mut ref_stream,
        scene.sigma_j,
    )?;
    let mut reference = [0.0; 3];
    let mut qmc_values = [0.0; 3];
    for i in 0..3 {
        reference[i] = qmc_integrate(&ref_sample, |p| tf.eval(i, p))?;
        qmc_values[i] = qmc_integrate(&sample, |p| tf.eval(i, p))?;
    }
    let t_reference = t1.elapsed().as_secs_f64();

    let mut degrees = Vec::new();
    let mut all_converged = true;
    for &degree in &cfg.degrees {
        let t2 = Instant::now();
        let (basis, v) = select_basis(&sample.points, degree)?;
        let moments = qmc_moments(&v, sample.sigma_j)?;
        let t_basis = t2.elapsed().as_secs_f64();

        let t3 = Instant::now();
        let rule = bottom_up_compress(&sample, &v, &moments, &cfg.params, degree)?;
        let t_compress = t3.elapsed().as_secs_f64();
        all_converged &= rule.converged;
        let residual_recomputed = recomputed_residual(&basis, &rule, &moments)?;
        std::fs::write(
            cfg.out_dir.join(format!("rule_deg{degree}.json")),
            rule.to_json(),
        )?;

        let run_baseline = match cfg.baseline {
            BaselineMode::On => true,
            BaselineMode::Off => false,
            BaselineMode::Auto => sample.len() <= cfg.baseline_cap,
        };
        let (baseline, baseline_residual_recomputed, t_baseline) = if run_baseline {
            let t4 = Instant::now();
            let b = caratheodory_compress(&sample, &v, &moments, cfg.params.eps, degree)?;
            let t = t4.elapsed().as_secs_f64();
            let r = recomputed_residual(&basis, &b, &moments)?;
            (Some(b), Some(r), Some(t))
        } else {
            (None, None, None)
        };

        let mut errors = Vec::new();
        for (fi, name) in TestFunctions::NAMES.iter().enumerate() {
            let compressed = rule.evaluate(|p| tf.eval(fi, p))?;
            let baseline_err = match &baseline {
                Some(b) => Some(rel_err(b.evaluate(|p| tf.eval(fi, p))?, reference[fi])),
                None => None,
            };
            errors.push(FunctionErrors {
                function: name,
                qmc: rel_err(qmc_values[fi], reference[fi]),
                compressed: rel_err(compressed, reference[fi]),
                baseline: baseline_err,
            });
        }

        degrees.push(DegreeReport {
            degree,
            full_dim: basis.full_dim,
            dim: basis.dim(),
            compression_ratio: sample.len() as f64 / rule.nu() as f64,
            rule,
            residual_recomputed,
            baseline,
            baseline_residual_recomputed,
            errors,
            t_basis,
            t_compress,
            t_baseline,
        });
    }

    let report = RunReport {
        scene_name: scene.name.clone(),
        m0,
        m_surface: sample.m_surface,
        m: sample.len(),
        sigma_j: sample.sigma_j,
        reference,
        qmc_values,
        degrees,
        t_sample,
        t_reference,
        all_converged,
    };
    write_report_csv(&cfg.out_dir.join("report.csv"), &report)?;
    write_errors_csv(&cfg.out_dir.join("errors.csv"), &report)?;
    Ok(report)
}

/// Loads the scene file and runs it; see [`run_loaded_scene`].
pub fn run_scene(scene_path: &Path, cfg: &RunConfig) -> Result<RunReport> {
    let scene = load_scene(scene_path)?;
    run_loaded_scene(&scene, cfg)
}

/// Human-readable run summary, with timings. Stdout only.
pub fn print_summary(report: &RunReport) {
    println!(
        "scene {}: M0={} on-surface={} in-region={} sigma_J={:.6e} (sample {:.2}s, reference {:.2}s)",
        report.scene_name,
        report.m0,
        report.m_surface,
        report.m,
        report.sigma_j,
        report.t_sample,
        report.t_reference,
    );
    for d in &report.degrees {
        println!(
            "  degree {:>2}: N={} nu={} residual={:.2e} iterations={} converged={} ratio={:.1} \
             (basis {:.2}s, compress {:.2}s)",
            d.degree,
            d.dim,
            d.rule.nu(),
            d.residual_recomputed,
            d.rule.trace.len(),
            d.rule.converged,
            d.compression_ratio,
            d.t_basis,
            d.t_compress,
        );
        if let (Some(b), Some(r), Some(t)) =
            (&d.baseline, d.baseline_residual_recomputed, d.t_baseline)
        {
            println!(
                "             baseline: nu={} residual={:.2e} converged={} ({:.2}s, speed-up {:.1})",
                b.nu(),
                r,
                b.converged,
                t,
                t / d.t_compress.max(1e-9),
            );
        }
        for e in &d.errors {
            match e.baseline {
                Some(b) => println!(
                    "             {}: qmc {:.2e} | bottom-up {:.2e} | baseline {:.2e}",
                    e.function, e.qmc, e.compressed, b
                ),
                None => println!(
                    "             {}: qmc {:.2e} | bottom-up {:.2e}",
                    e.function, e.qmc, e.compressed
                ),
            }
        }
    }
}
