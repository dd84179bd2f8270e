mod commands;
mod input;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(
    name = "coxric",
    version,
    about = "Bruhat graphs of finite Coxeter groups and their discrete Ricci curvature"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Lift the size guards.
    #[arg(long, global = true)]
    force: bool,
}

impl Common {
    fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Order, reflections and length distribution of a group.
    Group {
        /// Type spec such as `A3`, `I2(5)`, `A1xA2`, or a matrix JSON file.
        spec: String,
        #[command(flatten)]
        common: Common,
    },
    /// Local and global Ricci curvature.
    Ricci(commands::RicciArgs),
    /// Laplacian spectrum and spectral gap.
    Spectral(commands::SpectralArgs),
    /// Edge-boundary verification of the isoperimetric bounds.
    Iso(commands::IsoArgs),
    /// Equivalence classes of the second sphere around the identity.
    Classes {
        spec: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite on a group.
    Check(commands::CheckArgs),
    /// Export the matrix, roots, group or a graph.
    Export(commands::ExportArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Group { spec, common } => commands::group(&spec, &common),
        Command::Ricci(args) => commands::ricci(&args),
        Command::Spectral(args) => commands::spectral(&args),
        Command::Iso(args) => commands::iso(&args),
        Command::Classes { spec, common } => commands::classes(&spec, &common),
        Command::Check(args) => commands::check(&args),
        Command::Export(args) => commands::export(&args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
