use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsurf_cli::{run_scene, print_summary, BaselineMode, RunConfig};
use qsurf_core::compress::CompressParams;

#[derive(Parser)]
#[command(
    name = "qsurf",
    about = "Compressed QMC integration on regions of parametric surfaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a scene, compress the QMC rule at each degree, write reports
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scene description file (JSON)
    #[arg(long)]
    scene: PathBuf,

    /// Comma-separated moment-matching degrees
    #[arg(long, value_delimiter = ',', default_value = "3,6,9")]
    degrees: Vec<usize>,

    /// Raw low-discrepancy attempts, overriding the scene's M0
    #[arg(long)]
    m0: Option<usize>,

    /// Relative moment-residual tolerance
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,

    /// Prefix growth factor
    #[arg(long, default_value_t = 2.0)]
    theta: f64,

    /// Residual decrease threshold triggering the fallback path
    #[arg(long, default_value_t = 10.0)]
    tau: f64,

    /// Initial prefix size as a multiple of the basis dimension
    #[arg(long, default_value_t = 2.0)]
    m_init_factor: f64,

    /// Full-matrix baseline: run when the sample fits under --baseline-cap
    /// (auto), always (on), or never (off)
    #[arg(long, default_value = "auto")]
    baseline: BaselineMode,

    /// Sample-size cap for the automatic baseline
    #[arg(long, default_value_t = 20_000)]
    baseline_cap: usize,

    /// Reference sample budget as a multiple of M0
    #[arg(long, default_value_t = 20)]
    ref_factor: usize,

    /// Halton start index
    #[arg(long, default_value_t = 1)]
    seed_index: u64,

    /// Output directory; the QSURF_OUT environment variable overrides this
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => run(args),
    }
}

fn run(args: RunArgs) -> ExitCode {
    let out_dir = match std::env::var_os("QSURF_OUT") {
        Some(dir) => PathBuf::from(dir),
        None => args.out.clone(),
    };
    let cfg = RunConfig {
        degrees: args.degrees.clone(),
        params: CompressParams {
            eps: args.eps,
            theta: args.theta,
            tau: args.tau,
            m_init_factor: args.m_init_factor,
        },
        seed_index: args.seed_index,
        m0_override: args.m0,
        baseline: args.baseline,
        baseline_cap: args.baseline_cap,
        ref_factor: args.ref_factor,
        out_dir,
    };
    match run_scene(&args.scene, &cfg) {
        Ok(report) => {
            print_summary(&report);
            if report.all_converged {
                ExitCode::SUCCESS
            } else {
                for d in &report.degrees {
                    if !d.rule.converged {
                        eprintln!(
                            "degree {} did not reach the residual tolerance; trace:",
                            d.degree
                        );
                        for rec in &d.rule.trace {
                            eprintln!(
                                "  m={} momtype={} residual={:.3e}",
                                rec.m, rec.momtype, rec.residual
                            );
                        }
                    }
                }
                ExitCode::from(2)
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
