//! `icf`: batch driver for inverse-curvature-flow experiments.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::EXIT_USAGE;
use config::{ConfigInputs, FileConfig, AUDIT_CHECKS, CONVERGE_CHECKS, FLOW_CHECKS};

const COLUMNS_HELP: &str = "series.csv columns (frozen; additions are append-only):\n  t               flow time\n  int_sigma_km2   ∫σ_{k-2} dμ   (for k = 1: the support integral (m+1)·Vol)\n  int_sigma_km1   ∫σ_{k-1} dμ\n  int_sigma_k     ∫σ_k dμ\n  int_sigma_k_r2  ∫σ_k r² dμ   (r measured from the axis point O)\n  Q_<k>           monotone quantity of the run's flow index\n  guan_li         scale-invariant monotone quantity\n  volume          enclosed volume\n  area            surface area\n  roundness       max ρ / min ρ of the rescaled surface\n  hm_residual_max largest relative Hsiung-Minkowski residual over j = 1..m\n\nexit codes: 0 all verdicts pass; 2 flow breakdown (snapshot written);\n64 invalid configuration; otherwise the number of failed verdicts (max 125).\n\nenvironment: ICF_OUTPUT_DIR sets the default output directory.";

#[derive(Parser)]
#[command(
    name = "icf",
    about = "Inverse curvature flow laboratory: evolve axisymmetric star-shaped hypersurfaces, track monotone quantities, audit integral identities and inequalities",
    after_long_help = COLUMNS_HELP,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct SurfaceArgs {
    /// Flat JSON config file; flags given here override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Surface dimension m (the hypersurface lives in R^{m+1}).
    #[arg(long)]
    m: Option<usize>,
    /// Flow / audit index k in 1..=m.
    #[arg(long)]
    k: Option<usize>,
    /// Grid size: power of two in [32, 1024].
    #[arg(long = "N")]
    n: Option<usize>,
    /// Surface family: sphere | spheroid | legendre_bump.
    #[arg(long)]
    family: Option<String>,
    /// Sphere / bump radius.
    #[arg(long = "R")]
    radius: Option<f64>,
    /// Spheroid equatorial semi-axis.
    #[arg(long)]
    a: Option<f64>,
    /// Spheroid polar semi-axis.
    #[arg(long)]
    c: Option<f64>,
    /// Bump amplitude ε in ρ = R (1 + ε P_n(cos θ)).
    #[arg(long)]
    eps: Option<f64>,
    /// Bump Legendre degree n.
    #[arg(long)]
    degree: Option<usize>,
    /// Axial offset of the evaluation point O from the star center.
    #[arg(long)]
    d: Option<f64>,
    /// Comma-separated list of checks to run (defaults to all).
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    /// Output directory (default: $ICF_OUTPUT_DIR or ./icf-out).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a surface under ∂X/∂t = (σ_{k-1}/σ_k) ν and verify the
    /// monotone quantities; writes series.csv and verdicts.json.
    Flow {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Evolve until this flow time.
        #[arg(long)]
        t_end: Option<f64>,
        /// Sampling cadence for the quantity series.
        #[arg(long)]
        sample_every: Option<f64>,
        /// Also write the terminal profile as profile_final.csv.
        #[arg(long)]
        snapshot_final: bool,
    },
    /// Evaluate every integral functional, identity residual and
    /// inequality gap on one surface; writes report.json and verdicts.json.
    Audit {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// Audit the surface across a grid-refinement ladder and estimate the
    /// convergence order of every residual; writes orders.json.
    Converge {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Comma-separated ladder of grid sizes, e.g. 32,64,128.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<usize>>,
    },
    /// Fuzz the curvature algebra on random spectra: trace identities,
    /// Newton inequality, deletion identity, cone nesting.
    Identities {
        /// Flat JSON config file; flags given here override it.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
        /// Number of random spectra.
        #[arg(long)]
        samples: Option<u64>,
        /// Largest spectrum size to draw.
        #[arg(long)]
        m_max: Option<usize>,
        /// RNG seed (fixed default keeps reruns byte-identical).
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (default: $ICF_OUTPUT_DIR or ./icf-out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl SurfaceArgs {
    fn to_overrides(&self) -> FileConfig {
        FileConfig {
            m: self.m,
            k: self.k,
            n: self.n,
            family: self.family.clone(),
            r: self.radius,
            a: self.a,
            c: self.c,
            eps: self.eps,
            degree: self.degree,
            d: self.d,
            checks: self.checks.clone(),
            output_dir: self.out.clone(),
            ..Default::default()
        }
    }
}

fn load_file(config: &Option<PathBuf>) -> Result<FileConfig, String> {
    match config {
        Some(path) => FileConfig::load(path),
        None => Ok(FileConfig::default()),
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Flow {
            surface,
            t_end,
            sample_every,
            snapshot_final,
        } => {
            let mut flags = surface.to_overrides();
            flags.t_end = t_end;
            flags.sample_every = sample_every;
            flags.snapshot_final = snapshot_final.then_some(true);
            let config = ConfigInputs {
                file: load_file(&surface.config)?,
                flags,
            }
            .resolve(FLOW_CHECKS)?;
            commands::cmd_flow(&config)
        }
        Command::Audit { surface } => {
            let config = ConfigInputs {
                file: load_file(&surface.config)?,
                flags: surface.to_overrides(),
            }
            .resolve(AUDIT_CHECKS)?;
            commands::cmd_audit(&config)
        }
        Command::Converge { surface, ladder } => {
            let mut flags = surface.to_overrides();
            flags.ladder = ladder;
            let config = ConfigInputs {
                file: load_file(&surface.config)?,
                flags,
            }
            .resolve(CONVERGE_CHECKS)?;
            commands::cmd_converge(&config)
        }
        Command::Identities {
            config,
            samples,
            m_max,
            seed,
            out,
        } => {
            let flags = FileConfig {
                samples,
                m_max,
                seed,
                output_dir: out,
                ..Default::default()
            };
            let resolved = ConfigInputs {
                file: load_file(&config)?,
                flags,
            }
            .resolve(&[])?;
            commands::cmd_identities(&resolved)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are not usage errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE as u8);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code.clamp(0, 125) as u8),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
