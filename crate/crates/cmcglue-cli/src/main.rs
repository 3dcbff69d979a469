//! Batch front end: reads a JSON run configuration and writes reports,
//! tables and meshes into the output directory.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use cmcglue::error::Error;
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cmcglue", version, about = "Glued CMC sphere chains in axially symmetric warped products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration (defaults are used when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// No randomness is used anywhere; accepted for scripting symmetry.
    #[arg(long, global = true)]
    seedless: bool,
    /// Angular resolution of OBJ meshes (overrides the configuration).
    #[arg(long, global = true)]
    angular_res: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Scalar-curvature tables and regime checks of the profile.
    Curvature,
    /// Calibrate constants and solve the leading-order balancing system.
    Balance,
    /// Build the glued surface and write its configuration and meridian.
    Assemble,
    /// Weighted deviation norms and projections of the glued surface.
    Verify,
    /// Deviation norms over an r grid with slope fits.
    Sweep,
    /// OBJ mesh and CSV meridian of the glued surface.
    Export,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::InvalidInput(_) | Error::Parse(_) => 2,
        Error::Infeasible(_) => 3,
        Error::NonConvergence(_) => 4,
        _ => 1,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_json(&std::fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.angular_res {
        cfg.export.angular_res = n;
        cfg.validate()?;
    }
    let out = cli.out.as_path();
    match cli.command {
        Command::Curvature => commands::curvature(&cfg, out),
        Command::Balance => commands::balance(&cfg, out).map(|_| ()),
        Command::Assemble => commands::assemble_cmd(&cfg, out),
        Command::Verify => commands::verify(&cfg, out).map(|_| ()),
        Command::Sweep => commands::sweep(&cfg, out).map(|_| ()),
        Command::Export => commands::export(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
