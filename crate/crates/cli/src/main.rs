use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Certificate sweeps and table reproduction for sharp restriction constants.
#[derive(Debug, Parser)]
#[command(name = "sharpcert", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: RunOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Rebuild the c0 / b_k table and the per-k coefficient table.
    SphereTables,
    /// Gap certificates (p-1) c_k < c_0 for every k >= 2.
    SphereVerify,
    /// Certify c_m < 1 and run the Lens-model second variation.
    SchrodVerify,
    /// Wave constants, per-mode ratios and the C(1) audit.
    WaveAudit,
    /// Penrose compactification residuals.
    PenroseCheck,
    /// Finite-difference checks of the deficit variations.
    DeficitDemo,
    /// Every command above, into one output directory.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunOptions {
    /// Smallest dimension of the sweep.
    #[arg(long, global = true)]
    pub d_min: Option<u32>,
    /// Largest dimension of the sweep.
    #[arg(long, global = true)]
    pub d_max: Option<u32>,
    /// A single dimension; overrides --d-min and --d-max.
    #[arg(long, global = true)]
    pub d: Option<u32>,
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Truncation radius of the sphere integrals.
    #[arg(long, global = true, default_value_t = sharpcert::sphere::DEFAULT_R)]
    pub r_max: f64,
    /// Largest Laguerre index for the Schrödinger sweep.
    #[arg(long, global = true, default_value_t = 500)]
    pub m_max: u32,
    /// Horizon for the b_k monotonicity check.
    #[arg(long, global = true, default_value_t = sharpcert::sphere::DEFAULT_BK_HORIZON)]
    pub k_max: u32,
    /// Largest spherical-harmonic degree in the wave tables.
    #[arg(long, global = true, default_value_t = 200)]
    pub ell_max: u32,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output directory.
    #[arg(long, global = true, env = "SHARPCERT_OUT_DIR", default_value = "sharpcert-out")]
    pub output: PathBuf,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub parallelism: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // keep 2 free for inconclusive verdicts
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match commands::run(&cli) {
        Ok(v) => ExitCode::from(v.exit_code() as u8),
        Err(e) => {
            eprintln!("sharpcert: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
