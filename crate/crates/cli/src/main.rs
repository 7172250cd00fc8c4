//! `qmx`: command-line access to the quasi-modular forms engine.
//!
//! Exit codes: 0 success, 1 a check failed, 2 precision ran out, 3 usage
//! error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{code, Format};

#[derive(Parser, Debug)]
#[command(name = "qmx", version, about = "Exact computations with quasi-modular forms of level one")]
pub struct Cli {
    /// Emit the full result as JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit the result table as CSV.
    #[arg(long, global = true)]
    csv: bool,
    /// Default q-precision for commands that take one.
    #[arg(long, global = true, env = "QMX_PREC")]
    prec: Option<usize>,
    /// TOML configuration file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run grid cells on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// q-expansion of a polynomial in E2, E4, E6 and Delta.
    Expand {
        /// For example "(E2*E4 - E6)/720".
        form: String,
    },
    /// Dimensions delta_l(w), d((l+1)w) and the defects kappa.
    Dims(GridArgs),
    /// The extremal form f_{l,w} and its vanishing order.
    Extremal {
        #[arg(long)]
        l: u32,
        #[arg(long)]
        w: i64,
        /// q-coefficients to print (default: nu + 10).
        #[arg(long)]
        terms: Option<usize>,
    },
    /// nu_max(l, w) against the dimension bounds over a grid.
    ScanExtremal(GridArgs),
    /// D-Wronskian of a form, or the multiplicity certificate of f_{l,w}.
    Wronskian {
        /// Form to use; omit to take the extremal form of (--l, --w).
        #[arg(long)]
        form: Option<String>,
        /// Depth; defaults to the depth of the form.
        #[arg(long)]
        l: Option<u32>,
        #[arg(long, required_unless_present = "form")]
        w: Option<i64>,
    },
    /// Depth-one recursion checks.
    Depth1(Depth1Args),
    /// Leech theta series shells and f_{1,14}.
    Leech {
        #[arg(long, default_value_t = 400)]
        a_max: usize,
    },
    /// Integrality and positivity of extremal forms over a grid.
    ScanIntegrality {
        #[command(flatten)]
        grid: GridArgs,
        /// Check the depth <= 4 denominator/positivity statements (l <= 4).
        #[arg(long)]
        conjecture1: bool,
    },
    /// Run the bundled check suite.
    Verify {
        /// `full` or `quick`.
        #[arg(long)]
        profile: Option<String>,
        /// Restrict to these check ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Perturb mu(k) by a factor 1001/1000 in the contiguity checks.
        #[arg(long)]
        tamper_mu: bool,
        /// Also write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// List check ids and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Single depth (overrides --l-min/--l-max).
    #[arg(long)]
    l: Option<u32>,
    /// Single weight (overrides --w-max).
    #[arg(long)]
    w: Option<i64>,
    #[arg(long)]
    l_min: Option<u32>,
    #[arg(long)]
    l_max: Option<u32>,
    #[arg(long)]
    w_max: Option<i64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Depth1Check {
    Ode,
    KkOde,
    Contiguity,
    Lax1,
    Lax2,
    Eigen,
    Kernel,
    Conjugation,
    Denoms,
}

#[derive(Args, Debug, Clone)]
pub struct Depth1Args {
    #[arg(long, value_enum)]
    check: Depth1Check,
    /// Rational values of k (default: the configured or seeded samples).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Vec<String>,
    /// Largest integer k for `ode` and `denoms`, largest i for `contiguity`,
    /// largest w for `kk-ode`.
    #[arg(long)]
    max: Option<i64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 5)]
    samples: usize,
    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,
    /// Use the uncorrected operator forms (F with 12 E2 D, lax2 reversed).
    #[arg(long)]
    printed: bool,
    /// Perturb mu(k) by a factor 1001/1000.
    #[arg(long)]
    tamper_mu: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { code::USAGE as u8 } else { code::OK as u8 });
        }
    };
    let fmt = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        Format::Text
    };
    let report = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::error_code(&e) as u8);
        }
    };
    let mut out = std::io::stdout().lock();
    if let Err(e) = report.render(fmt, &mut out) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {e}");
            return ExitCode::from(code::CHECK_FAILED as u8);
        }
    }
    ExitCode::from(report.code as u8)
}
