mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mereoml",
    version,
    about = "Rough mereology toolkit",
    arg_required_else_help = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summarize a decision table.
    Load(LoadArgs),
    /// Cross-validate the granular classifier over a grid of radii.
    Classify(ClassifyArgs),
    /// Write the granular reflection of a table as CSV.
    Granulate(GranulateArgs),
    /// Evaluate a formula on the granules of a table.
    Logic(LogicArgs),
    /// Propagate one input row per leaf agent through a network.
    Net(NetArgs),
    /// Drive a formation through a world.
    Sim(SimArgs),
    /// Tabulate the entities of a small labelled carrier.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// CSV with a header row.
    pub csv: PathBuf,
    /// Name of the decision column.
    #[arg(long)]
    pub decision: String,
    /// Equal-frequency discretization, `column:bins` pairs separated by commas.
    #[arg(long, value_delimiter = ',')]
    pub discretize: Vec<String>,
    /// Cell token treated as a missing value.
    #[arg(long)]
    pub na: Option<String>,
}

#[derive(Debug, Args)]
pub struct LoadArgs {
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InclusionKind {
    Lukasiewicz,
    Exp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Nu3,
    Nul,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long, value_enum, default_value_t = InclusionKind::Lukasiewicz)]
    pub inclusion: InclusionKind,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long)]
    pub seed: u64,
    /// Radii to try instead of the full grid.
    #[arg(long, value_delimiter = ',')]
    pub radii: Vec<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GranulateArgs {
    #[command(flatten)]
    pub table: TableArgs,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, value_enum, default_value_t = InclusionKind::Lukasiewicz)]
    pub inclusion: InclusionKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LogicArgs {
    #[command(flatten)]
    pub table: TableArgs,
    /// `radius,inclusion`, e.g. `0.5,lukasiewicz`.
    #[arg(long)]
    pub granules_from: String,
    #[arg(long = "eval")]
    pub formula: String,
    #[arg(long, value_enum, default_value_t = Mode::Nul)]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NetArgs {
    /// TOML network description.
    pub netfile: PathBuf,
    /// One comma-separated row per input agent, in layer order.
    #[arg(long, num_args = 1..)]
    pub input: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    pub world: PathBuf,
    pub formation: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    #[arg(long, default_value = "traj.csv")]
    pub out: PathBuf,
    #[arg(long, default_value = "traj.svg")]
    pub svg: PathBuf,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Atom labels, comma separated (at most 6).
    #[arg(long, value_delimiter = ',', required = true)]
    pub labels: Vec<String>,
    /// Atom masses; uniform when omitted.
    #[arg(long, value_delimiter = ',')]
    pub masses: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(commands::Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
