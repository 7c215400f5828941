//! Command-line front end: derive forces from gauges, check nullity, list and
//! verify the catalog, simulate, and check action boundary terms.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use gaugeforge::expr::ExprError;
use thiserror::Error;

mod commands;
pub mod config;

use config::CommonArgs;

/// Exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const VERIFICATION: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const NUMERIC: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    #[error("{0}")]
    Numeric(String),
    /// A parse or evaluation error tied to one flag's value.
    #[error("{flag}: {source}\n  {input}\n  {caret}")]
    Input {
        flag: &'static str,
        input: String,
        caret: String,
        source: ExprError,
    },
    #[error(transparent)]
    Core(#[from] gaugeforge::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use gaugeforge::Error as E;
        match self {
            CliError::Usage(_) | CliError::Input { .. } => exit::USAGE,
            CliError::Verification(_) => exit::VERIFICATION,
            CliError::Numeric(_) => exit::NUMERIC,
            CliError::Core(e) => match e {
                E::Expr(ExprError::DivisionByZero { .. } | ExprError::Domain { .. }) => {
                    exit::NUMERIC
                }
                E::Expr(_) => exit::USAGE,
                E::NotNull(_) => exit::VERIFICATION,
                E::Integration { .. } | E::Quadrature(_) => exit::NUMERIC,
                _ => exit::USAGE,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gaugeforge",
    version,
    about = "Null Lagrangians, gauge functions and the forces they induce"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the null Lagrangian, energy term and force generated by a gauge.
    Derive {
        /// Gauge function of x and t.
        #[arg(long, allow_hyphen_values = true)]
        gauge: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Print the Euler-Lagrange expression of a Lagrangian and whether it is null.
    Verify {
        /// Lagrangian in xdot, x and t.
        #[arg(long, allow_hyphen_values = true)]
        lagrangian: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// List the catalog of forces and nonlinearities.
    Catalog {
        /// Check every entry; exit 1 if any fails.
        #[arg(long)]
        verify: bool,
        /// Print one structured record per entry.
        #[arg(long, conflicts_with = "verify")]
        export: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build and check a gauge family from its terms.
    Family {
        /// Family tag (g1, g2, g3).
        #[arg(long, required_unless_present = "list")]
        tag: Option<String>,
        /// `;`-separated terms in the family's format.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "list")]
        terms: Option<String>,
        /// List the registered families.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Integrate the system driven by a gauge and write a CSV trajectory.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// CSV destination; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compare the action of dPhi/dt with Phi's boundary values along a
    /// simulated trajectory (every catalog gauge if --gauge is omitted).
    ActionCheck {
        /// Gauge to check.
        #[arg(long, allow_hyphen_values = true)]
        gauge: Option<String>,
        /// Catalog system supplying the dynamics (default duffing).
        #[arg(long)]
        system: Option<String>,
        /// Standard Lagrangian (default 1/2*xdot^2 - 1/2*x^2).
        #[arg(long = "ls", alias = "lagrangian", allow_hyphen_values = true)]
        lagrangian: Option<String>,
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Re-derive every catalog force and compare with its printed form.
    Roundtrip {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, clap::Args)]
struct RunArgs {
    /// Catalog entry supplying the gauge.
    #[arg(long)]
    system: Option<String>,
    /// Inline gauge function.
    #[arg(long, allow_hyphen_values = true)]
    gauge: Option<String>,
    /// Standard Lagrangian (default 1/2*xdot^2 - 1/2*x^2).
    #[arg(long = "ls", alias = "lagrangian", allow_hyphen_values = true)]
    lagrangian: Option<String>,
    /// Integrator name.
    #[arg(long, default_value = "rk4")]
    method: String,
    #[command(flatten)]
    window: WindowArgs,
}

/// Initial data and time window. Defaults: x0 = 1, v0 = 0, t0 = 0, t1 = 10,
/// dt = 0.001.
#[derive(Debug, Clone, clap::Args)]
struct WindowArgs {
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    v0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
}

/// Run with `args` (including the program name) and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
