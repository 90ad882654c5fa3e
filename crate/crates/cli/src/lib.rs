//! Command-line front end: reads system files, runs the library and renders
//! reports as JSON (default) or aligned tables.

pub mod report;
pub mod system_file;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ftpid_core::{
    decompose, ft_profile, solve_ift, verify_axioms, EngineOptions, JointSystem, Lattice, Measure,
    SolverOptions, SourceAntichain, DEFAULT_LATTICE_CAP,
};
use serde::Serialize;
use thiserror::Error;

use report::{DecompositionReport, LatticeReport, ProfileReport, RedundancyReport, Unit, VerifyReport};
pub use system_file::{parse_system, write_system, PmfEntry, SystemFile};

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or invalid input.
    #[error("{0}")]
    Input(String),
    /// The solver ran out of iterations before certifying a value.
    #[error("{0}")]
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Convergence(_) => 3,
        }
    }
}

impl From<ftpid_core::Error> for CliError {
    fn from(e: ftpid_core::Error) -> Self {
        match e {
            ftpid_core::Error::ConvergenceFailure { .. } => CliError::Convergence(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ftpid", version, about = "Fault-tolerance redundancy and partial information decomposition")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Redundancy at every antichain and the Möbius atoms.
    Decompose {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = MeasureArg::Ft)]
        measure: MeasureArg,
        /// Largest number of sources to decompose.
        #[arg(long, default_value_t = DEFAULT_LATTICE_CAP)]
        lattice_cap: usize,
        /// Include the crash-tolerance profile.
        #[arg(long)]
        profile: bool,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// `I_ft` of a single antichain, e.g. "{1}{2,3}".
    Redundancy {
        path: PathBuf,
        antichain: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Guaranteed information when up to ℓ sources may crash, ℓ = 0..n.
    Profile {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Antichains of the redundancy lattice with their lower covers.
    Lattice {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Checks symmetry, self-redundancy and monotonicity (n <= 3).
    Verify {
        path: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Ft,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Duality gap, in bits, that certifies a solve.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        let mut o = SolverOptions::default();
        if let Some(t) = self.tol {
            o.tolerance = t;
        }
        if let Some(m) = self.max_iter {
            o.max_iterations = m;
        }
        if let Some(r) = self.restarts {
            o.restarts = r;
        }
        o
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report values in nats instead of bits.
    #[arg(long)]
    pub nats: bool,
}

impl OutputArgs {
    fn unit(&self) -> Unit {
        if self.nats {
            Unit::Nats
        } else {
            Unit::Bits
        }
    }
}

pub fn read_system(path: &Path) -> Result<JointSystem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_system(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn render<T: Serialize>(doc: &T, format: Format, table: impl FnOnce(&T) -> String) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(doc).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Table => table(doc),
    }
}

/// Runs one command and returns its standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Decompose {
            path,
            measure,
            lattice_cap,
            profile,
            solver,
            output,
        } => {
            let system = read_system(path)?;
            let opts = EngineOptions {
                solver: solver.options(),
                lattice_cap: *lattice_cap,
            };
            let measure = match measure {
                MeasureArg::Ft => Measure::Ft,
                MeasureArg::Min => Measure::Min,
            };
            let pid = decompose(&system, measure, &opts)?;
            let prof = if *profile {
                Some(ft_profile(&system, &opts.solver)?)
            } else {
                None
            };
            let doc = DecompositionReport::new(&pid, prof.as_ref(), output.unit());
            Ok(render(&doc, output.format, DecompositionReport::table))
        }
        Command::Redundancy {
            path,
            antichain,
            solver,
            output,
        } => {
            let system = read_system(path)?;
            let alpha = SourceAntichain::parse(antichain, system.n())?;
            let cert = solve_ift(&system, &alpha, &solver.options())?;
            let doc = RedundancyReport::new(&alpha, &cert, output.unit());
            Ok(render(&doc, output.format, RedundancyReport::table))
        }
        Command::Profile { path, solver, output } => {
            let system = read_system(path)?;
            let prof = ft_profile(&system, &solver.options())?;
            let doc = ProfileReport::new(&prof, output.unit());
            Ok(render(&doc, output.format, ProfileReport::table))
        }
        Command::Lattice { n, format } => {
            let lattice = Lattice::new(*n, DEFAULT_LATTICE_CAP)?;
            Ok(render(&LatticeReport::new(&lattice), *format, LatticeReport::table))
        }
        Command::Verify { path, solver, format } => {
            let system = read_system(path)?;
            let report = verify_axioms(&system, &solver.options())?;
            Ok(render(&VerifyReport::new(&report), *format, VerifyReport::table))
        }
    }
}
