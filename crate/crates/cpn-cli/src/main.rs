//! Command line front end: parameter sweeps, figure-reproduction recipes,
//! and CSV/JSON emission with provenance headers.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod output;
mod runs;

use output::Table;

const EXIT_CONFIG: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "cpn", version, about = "PPM demodulation model sweeps and Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Binary on-off keying: direct detection, Generalized Kennedy optimum
    /// and the Helstrom bound for one amplitude.
    Binary {
        /// Coherent amplitude of the "on" hypothesis.
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Helstrom (square-root measurement) limit for M-ary PPM.
    Helstrom {
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Mean photon number of the pulse.
        #[arg(long)]
        np: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep the pulse photon number: DD, exact-null CPN, optimal-null CPN
    /// and the Helstrom limit per grid point.
    SweepNp {
        #[arg(long, default_value_t = 0.05)]
        np_start: f64,
        #[arg(long, default_value_t = 6.0)]
        np_stop: f64,
        #[arg(long, default_value_t = 0.05)]
        np_step: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Sweep the nulling photon number at a fixed pulse photon number.
    SweepNull {
        #[arg(long)]
        np: f64,
        #[arg(long, default_value_t = 0.0)]
        null_start: f64,
        #[arg(long, default_value_t = 3.0)]
        null_stop: f64,
        #[arg(long, default_value_t = 0.02)]
        null_step: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo frame simulation of both receivers against the exact
    /// model rates.
    Montecarlo {
        #[arg(long)]
        np: f64,
        /// Nulling photon number for the CPN receiver (defaults to exact
        /// nulling).
        #[arg(long)]
        null: Option<f64>,
        /// Frames per transmitted word.
        #[arg(long, default_value_t = 832)]
        frames: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reed-Solomon errors-and-erasures outer-code planning.
    OuterCode {
        /// Channel statistics preset from the demonstration.
        #[arg(long, value_enum)]
        stats: Option<StatsPreset>,
        /// Wrong-decision probability per frame (overrides the preset).
        #[arg(long)]
        p_err: Option<f64>,
        /// Erasure probability per frame (overrides the preset).
        #[arg(long)]
        p_eras: Option<f64>,
        #[arg(long, default_value_t = 4)]
        order: usize,
        /// Code rate for the minimum-block-length search.
        #[arg(long)]
        rate: f64,
        /// Target block failure probability.
        #[arg(long, default_value_t = 1e-6)]
        target: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Emit the model curves behind the demonstration figures.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, default_value_t = 4)]
    order: usize,
    /// Detector quantum efficiency.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    /// Background-click coefficient on the signal photon number.
    #[arg(long, default_value_t = 0.0)]
    c_sig: f64,
    /// Background-click coefficient on the nulling photon number.
    #[arg(long, default_value_t = 0.0)]
    c_null: f64,
    /// Constant dark-click probability per slot.
    #[arg(long, default_value_t = 0.0)]
    c_dark: f64,
    /// Mode-mismatch fraction.
    #[arg(long, alias = "delta", default_value_t = 0.0)]
    delta_m: f64,
    /// Phase offset between signal and nulling fields, radians.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Whether photon-number inputs and outputs are quoted at the detector
    /// plane (eta folded in) or at the source.
    #[arg(long, value_enum, default_value_t = NpAxis::Detector)]
    np_axis: NpAxis,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file; stdout when omitted. The file appears atomically.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for Monte Carlo fan-out; output is identical for any
    /// count.
    #[arg(long)]
    workers: Option<usize>,
    /// Print the column dictionary for this subcommand and exit.
    #[arg(long)]
    schema: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum NpAxis {
    /// Photon numbers include the detector efficiency (the demonstration's
    /// convention).
    Detector,
    /// Photon numbers are source-plane; eta is applied by the detector
    /// model.
    Source,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Figure {
    Fig1c,
    Fig3a,
    Fig3b,
    Fig4,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StatsPreset {
    /// Ideal direct detection at N_p = 1.25: erasures only.
    IdealDd,
    /// Ideal CPN at N_p = 1.25 with the reported optimum nulling.
    IdealCpn,
    /// Measured direct-detection statistics.
    ExptDd,
    /// Measured CPN statistics.
    ExptCpn,
}

impl StatsPreset {
    fn rates(self) -> (f64, f64) {
        match self {
            StatsPreset::IdealDd => (0.0, 0.289),
            StatsPreset::IdealCpn => (0.082, 0.011),
            StatsPreset::ExptDd => (0.004, 0.287),
            StatsPreset::ExptCpn => (0.092, 0.052),
        }
    }

    fn name(self) -> &'static str {
        match self {
            StatsPreset::IdealDd => "ideal-dd",
            StatsPreset::IdealCpn => "ideal-cpn",
            StatsPreset::ExptDd => "expt-dd",
            StatsPreset::ExptCpn => "expt-cpn",
        }
    }
}

/// Errors that map onto the documented exit codes.
#[derive(Debug)]
enum RunError {
    Config(String),
    Infeasible(String),
    Numerical(String),
}

impl RunError {
    fn code(&self) -> u8 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Infeasible(_) => EXIT_INFEASIBLE,
            RunError::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            RunError::Config(m) | RunError::Infeasible(m) | RunError::Numerical(m) => m,
        }
    }
}

impl From<cpn::Error> for RunError {
    fn from(e: cpn::Error) -> Self {
        RunError::Config(e.to_string())
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Numerical(format!("io error: {e}"))
    }
}

/// Merge `--config FILE` (flat `key = value` lines mirroring the long flag
/// names) into the argument list. File values apply only where the command
/// line does not already carry the flag, so CLI flags win.
fn merge_config_args(mut argv: Vec<String>) -> Result<Vec<String>, RunError> {
    let pos = argv.iter().position(|a| a == "--config");
    let Some(pos) = pos else { return Ok(argv) };
    if pos + 1 >= argv.len() {
        return Err(RunError::Config("--config requires a file path".into()));
    }
    let path = argv[pos + 1].clone();
    argv.drain(pos..=pos + 1);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| RunError::Config(format!("cannot read config {path}: {e}")))?;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(RunError::Config(format!(
                "config {path}:{}: expected `key = value`, got `{line}`",
                lineno + 1
            )));
        };
        let flag = format!("--{}", key.trim());
        if !argv.iter().any(|a| a == &flag) {
            argv.push(flag);
            let value = value.trim();
            if !value.is_empty() {
                argv.push(value.to_string());
            }
        }
    }
    Ok(argv)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match merge_config_args(argv) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.code());
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_CONFIG),
            };
        }
    };
    match runs::run(cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

/// Provenance lines: tool version and the full merged argument echo, minus
/// plumbing flags that do not affect the numbers (`--out`, `--workers`,
/// `--format`), so reruns across machines and thread counts stay
/// byte-identical.
fn provenance(argv: &[String]) -> Vec<String> {
    let mut echo = String::new();
    let mut skip = false;
    for (i, a) in argv.iter().enumerate() {
        if skip {
            skip = false;
            continue;
        }
        if a == "--out" || a == "--workers" || a == "--format" {
            skip = true;
            continue;
        }
        if i > 0 {
            echo.push(' ');
        }
        let _ = write!(echo, "{}", if i == 0 { "cpn" } else { a });
    }
    vec![
        format!("tool: cpn {}", env!("CARGO_PKG_VERSION")),
        format!("invocation: {echo}"),
    ]
}

fn emit(table: Table, out: &OutputArgs) -> Result<(), RunError> {
    table.check_finite()?;
    let rendered = match out.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &out.out {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => output::write_atomic(path, &rendered),
    }
}
