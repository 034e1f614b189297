//! `qfl`: runs dissipative-qubit feedback scenarios and writes the results as
//! CSV or JSON tables.

pub mod config;
pub mod error;
pub mod runner;
pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use config::{parse_angle, ScenarioConfig};
use error::CliError;
use runner::{run_scenario, ScanOptions, Subcommand};
use table::Format;

#[derive(Debug, Parser)]
#[command(name = "qfl", version, about = "Feedback-qubit dynamics and quantum Fisher information runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Scenario file; the built-in default scenario is used without it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Worker threads for grid evaluation (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Print the effective scenario as INI and exit.
    #[arg(long, global = true)]
    pub dump_config: bool,

    #[arg(long, global = true, value_parser = angle, default_value = "0")]
    pub a_min: f64,
    #[arg(long, global = true, value_parser = angle, default_value = "pi")]
    pub a_max: f64,
    #[arg(long, global = true, default_value_t = 37)]
    pub a_steps: usize,
    #[arg(long, global = true, default_value_t = 0.0)]
    pub omega_min: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub omega_max: f64,
    #[arg(long, global = true, default_value_t = 101)]
    pub omega_steps: usize,
    /// Coupling strengths (comma separated).
    #[arg(long, global = true, value_delimiter = ',', default_value = "1")]
    pub g: Vec<f64>,
    /// Cavity decay rates (comma separated).
    #[arg(long, global = true, value_delimiter = ',', default_value = "50")]
    pub kappa: Vec<f64>,
    /// Fock truncations (comma separated).
    #[arg(long = "nmax", global = true, value_delimiter = ',', default_value = "2")]
    pub n_max: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Density matrix, eigenvalues and purity over time.
    Evolve,
    /// Numeric QFI over time, with the closed form where one applies.
    Qfi,
    /// Maximum QFI over time as a function of the feedback angle A.
    FmScan,
    /// Steady-state QFI as a function of the drive strength.
    SteadyScan,
    /// QFI matrix over (g, kappa) for the steady state.
    Qfim,
    /// Excited-population decay of the full qubit+cavity model.
    Adiabatic,
    /// Closed forms against the numeric pipeline.
    Verify,
    /// Closed-form values on the scenario time grid.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

fn angle(s: &str) -> Result<f64, String> {
    parse_angle(s).ok_or_else(|| format!("not an angle: {s:?}"))
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::Evolve => Self::Evolve,
            Command::Qfi => Self::Qfi,
            Command::FmScan => Self::FmScan,
            Command::SteadyScan => Self::SteadyScan,
            Command::Qfim => Self::Qfim,
            Command::Adiabatic => Self::Adiabatic,
            Command::Verify => Self::Verify,
            Command::Oracle => Self::Oracle,
        }
    }
}

impl Cli {
    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            a_min: self.a_min,
            a_max: self.a_max,
            a_steps: self.a_steps,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
            omega_steps: self.omega_steps,
            g: self.g.clone(),
            kappa: self.kappa.clone(),
            n_max: self.n_max.clone(),
        }
    }
}

fn emit(cli: &Cli, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let fail = |source| CliError::Output { path: path.clone(), source };
            let mut w = BufWriter::new(File::create(path).map_err(fail)?);
            write(&mut w).and_then(|_| w.flush()).map_err(fail)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|source| CliError::Output { path: "<stdout>".into(), source })
        }
    }
}

/// Runs a parsed command line and reports the process exit status.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if cli.dump_config {
        let text = cfg.dump();
        return emit(cli, |w| w.write_all(text.as_bytes()));
    }
    let Some(command) = cli.command else {
        return Err(CliError::config("<command>", "no subcommand given (try --help)"));
    };
    let outcome = run_scenario(command.into(), &cfg, &cli.scan_options(), cli.jobs)?;
    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    emit(cli, |w| outcome.table.write(format, w))?;
    if outcome.success {
        Ok(())
    } else {
        Err(CliError::Verify("an oracle comparison did not come out as expected".into()))
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfl: {e}");
            (&e).into()
        }
    }
}
