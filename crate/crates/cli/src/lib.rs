//! Command-line front end: argument parsing, dispatch and output files.

pub mod inputs;
pub mod manifest;
mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use inputs::{load_graph, load_state, save_graph};
pub use manifest::{RunManifest, Sink};

/// Exit code for a run that completed but whose check failed.
pub const EXIT_FAILED: i32 = 1;
/// Exit code for bad arguments or unreadable inputs.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(std::io::Error),
    Core(mbqc::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<mbqc::Error> for CliError {
    fn from(e: mbqc::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "mbqc", version, about = "Measurement-based quantum computation at desk scale")]
pub struct Cli {
    /// Directory for payload files and manifest.json.
    #[arg(long, global = true, default_value = "mbqc-out")]
    pub out_dir: PathBuf,
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "MBQC_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Compile a circuit to a measurement pattern and check it branch by branch.
    Verify(VerifyArgs),
    /// Heralded chain growth.
    #[command(subcommand)]
    Growth(GrowthCmd),
    /// Valence-bond resource states.
    #[command(subcommand)]
    Aklt(AkltCmd),
    /// Entanglement measures.
    #[command(subcommand)]
    Ent(EntCmd),
    /// GHZ correlations and the OR gate.
    #[command(subcommand)]
    Bell(BellCmd),
    /// Measurement pattern files.
    #[command(subcommand)]
    Pattern(PatternCmd),
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Circuit text file (`ROT q zeta eta xi`, `CNOT c t`, `H q`).
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
    pub circuit: Option<PathBuf>,
    /// Verify the built-in CNOT + rotation layout on a 2×7 cluster instead.
    #[arg(long)]
    pub grid: bool,
    /// Euler angles zeta,eta,xi of the rotation in the grid layout.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.3, -0.7, 1.1], allow_negative_numbers = true)]
    pub angles: Vec<f64>,
    /// Enumerate every branch (the default).
    #[arg(long, conflicts_with = "trials")]
    pub exhaustive: bool,
    /// Sample this many branches per input instead.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Random inputs per check.
    #[arg(long, default_value_t = 4)]
    pub inputs: usize,
    /// Seed for the random inputs and branch sampling.
    #[arg(long)]
    pub seed: u64,
    /// Fidelity tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum GrowthCmd {
    /// Drift and extinction over a grid of success probabilities; writes growth_scan.csv.
    Scan(GrowthScanArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GrowthScanArgs {
    #[arg(long, default_value_t = 0.6)]
    pub p_min: f64,
    #[arg(long, default_value_t = 0.75)]
    pub p_max: f64,
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, default_value_t = 10)]
    pub initial_length: usize,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum AkltCmd {
    /// Left-right spanning on brick-wall lattices under i.i.d. site axes; writes percolation.csv.
    Percolate(PercolateArgs),
    /// Dense POVM + graph-reduction consistency check on a small patch; writes patch.json.
    VerifyPatch(PatchArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PercolateArgs {
    /// Lattice sizes, comma separated.
    #[arg(long = "L", visible_alias = "size", value_delimiter = ',', required = true)]
    pub l: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Relative weights of the x, y, z axes.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [1.0, 1.0, 1.0])]
    pub weights: Vec<f64>,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Path,
    Cycle,
    Star,
    Complete,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryArg {
    Zero,
    Open,
}

#[derive(Debug, Args, Serialize)]
pub struct PatchArgs {
    #[arg(long)]
    pub sites: usize,
    #[arg(long, value_enum, default_value_t = Shape::Path)]
    pub shape: Shape,
    /// Edge-list file for the patch; overrides --sites/--shape.
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Zero)]
    pub boundary: BoundaryArg,
    /// Number of sampled outcome sets to check.
    #[arg(long, default_value_t = 8)]
    pub samples: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum EntCmd {
    /// Entropy, entanglement width and geometric entanglement of one state; writes ent_report.json.
    Report(EntArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Vn,
    Ewidth,
    Ge,
}

#[derive(Debug, Args, Serialize)]
pub struct EntArgs {
    /// ghz:N, cluster:N, ring:N, grid:RxC, plus:N, an amplitude .csv, or an edge-list file.
    #[arg(long)]
    pub state: String,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Measure::Vn, Measure::Ewidth, Measure::Ge])]
    pub measures: Vec<Measure>,
    /// Side A of the entropy cut; defaults to the even qubits.
    #[arg(long, value_delimiter = ',')]
    pub cut: Option<Vec<usize>>,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Required when ge is requested.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum BellCmd {
    /// The four GHZ stabilizer expectations.
    Ghz,
    /// Count hidden-variable assignments meeting the GHZ constraints.
    Hvm {
        /// Constraint indices 0-3; all four by default.
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1, 2, 3])]
        constraints: Vec<usize>,
    },
    /// The OR gate computed from one GHZ state.
    Or {
        #[arg(long)]
        a: u8,
        #[arg(long)]
        b: u8,
        /// List every possible branch instead of sampling one.
        #[arg(long)]
        all_branches: bool,
        #[arg(long, required_unless_present = "all_branches")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternKind {
    Rotation,
    ThreeLink,
    Cnot,
    Identity,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum PatternCmd {
    /// Write a built-in pattern as pattern.json.
    Export {
        #[arg(long, value_enum)]
        kind: PatternKind,
        /// Three angles for rotation or three-link patterns.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        angles: Option<Vec<f64>>,
        /// Width of an identity pattern.
        #[arg(long, default_value_t = 1)]
        width: usize,
    },
    /// Compile a circuit file into pattern.json.
    Compile {
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Print the measurement rounds of a pattern file.
    Rounds {
        #[arg(long)]
        pattern: PathBuf,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Growth(GrowthCmd::Scan(_)) => "growth scan",
            Command::Aklt(AkltCmd::Percolate(_)) => "aklt percolate",
            Command::Aklt(AkltCmd::VerifyPatch(_)) => "aklt verify-patch",
            Command::Ent(EntCmd::Report(_)) => "ent report",
            Command::Bell(BellCmd::Ghz) => "bell ghz",
            Command::Bell(BellCmd::Hvm { .. }) => "bell hvm",
            Command::Bell(BellCmd::Or { .. }) => "bell or",
            Command::Pattern(PatternCmd::Export { .. }) => "pattern export",
            Command::Pattern(PatternCmd::Compile { .. }) => "pattern compile",
            Command::Pattern(PatternCmd::Rounds { .. }) => "pattern rounds",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Verify(a) => Some(a.seed),
            Command::Growth(GrowthCmd::Scan(a)) => Some(a.seed),
            Command::Aklt(AkltCmd::Percolate(a)) => Some(a.seed),
            Command::Aklt(AkltCmd::VerifyPatch(a)) => Some(a.seed),
            Command::Ent(EntCmd::Report(a)) => a.seed,
            Command::Bell(BellCmd::Or { seed, .. }) => *seed,
            _ => None,
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn dispatch(cli: Cli) -> i32 {
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool; that is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let mut sink = match Sink::new(&cli.out_dir) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cli.out_dir.display());
            return EXIT_USAGE;
        }
    };
    let code = match run::run(&cli.command, &mut sink) {
        Ok(true) => 0,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_) | CliError::Core(_) => EXIT_USAGE,
                CliError::Io(_) => EXIT_FAILED,
            }
        }
    };
    let params = serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null);
    if let Err(e) = sink.finish(cli.command.name(), params, cli.command.seed(), code) {
        eprintln!("error: writing manifest: {e}");
        return EXIT_FAILED;
    }
    code
}
