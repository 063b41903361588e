mod commands;
mod parse;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{run, CliError, Command, Options};
use parse::ArrangementFile;

/// Layers, building sets, nested sets and chart atlases of the wonderful model
/// of a toric arrangement.
#[derive(Parser, Debug)]
#[command(name = "toric-wonderful", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Reject non-primitive characters instead of splitting them.
    #[arg(long, global = true)]
    no_normalize: bool,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for verification sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Samples per chart for verification.
    #[arg(long, global = true, default_value_t = 100)]
    samples: usize,
    /// Numeric tolerance for chart membership and verification.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args, Debug)]
struct FileArg {
    /// Arrangement file.
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// All layers with the covering relations of the poset.
    Layers(FileArg),
    /// Points of the arrangement in canonical order.
    Points(FileArg),
    /// The building set of irreducible layers, with per-layer flags.
    Irreducible(FileArg),
    /// Nested sets, optionally through a point and only maximal ones.
    Nested {
        #[command(flatten)]
        file: FileArg,
        /// Point layer id, e.g. L0.
        #[arg(long)]
        point: Option<String>,
        /// Only maximal nested sets.
        #[arg(long)]
        max: bool,
    },
    /// The chart atlas, optionally with the numeric verification sweeps.
    Charts {
        #[command(flatten)]
        file: FileArg,
        #[arg(long)]
        verify: bool,
    },
    /// Dimension of an intersection of boundary divisors.
    Divisor {
        #[command(flatten)]
        file: FileArg,
        /// Comma-separated layer ids of building-set members.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<String>,
    },
    /// Chart and limit coordinates of a curve germ through a point.
    Curve {
        #[command(flatten)]
        file: FileArg,
        /// Point layer id.
        #[arg(long)]
        point: String,
        /// Jet vectors `v1;v2;...`, entries comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        jets: String,
    },
}

fn split(cmd: Cmd) -> (PathBuf, Command) {
    match cmd {
        Cmd::Layers(f) => (f.file, Command::Layers),
        Cmd::Points(f) => (f.file, Command::Points),
        Cmd::Irreducible(f) => (f.file, Command::Irreducible),
        Cmd::Nested { file, point, max } => (file.file, Command::Nested { point, max }),
        Cmd::Charts { file, verify } => (file.file, Command::Charts { verify }),
        Cmd::Divisor { file, set } => (file.file, Command::Divisor { set }),
        Cmd::Curve { file, point, jets } => (file.file, Command::Curve { point, jets }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let opts = Options {
        no_normalize: cli.no_normalize,
        seed: cli.seed,
        samples: cli.samples,
        tolerance: cli.tolerance,
    };
    let (path, command) = split(cli.command);
    let result = ArrangementFile::read(&path)
        .map_err(CliError::from)
        .and_then(|file| run(&file, &command, &opts));
    match result {
        Ok(report) => {
            if cli.json {
                print!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            if report.verification_failed() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
