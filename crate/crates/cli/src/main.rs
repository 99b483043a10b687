//! `ffratios`: ensemble statistics of quadratic L-functions over `F_q[x]`
//! against their predicted main terms.

mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{BoundsArgs, Suite};
use crate::config::GlobalArgs;
use crate::verify::Check;

const EXIT_PRECONDITION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_THRESHOLD: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Precondition(ffratios::Error),
    Io(std::io::Error),
}

impl From<ffratios::Error> for CliError {
    fn from(e: ffratios::Error) -> Self {
        CliError::Precondition(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Debug, Parser)]
#[command(name = "ffratios", version, about = "Ratios, moments and zero statistics of quadratic L-functions over F_q[x]")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Number of monic irreducibles of each degree.
    Primes {
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// L-polynomial of one D: coefficients, zeros, functional equation.
    Lpoly {
        /// Square-free monic D of odd degree, e.g. `x^5+2*x+1` or `1,2,0,0,0,1`.
        #[arg(long = "D")]
        d: String,
    },
    /// Exact identity suites.
    Verify {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "fe,rh,explicit,gauss,l1,l3,l5")]
        checks: Vec<Check>,
    },
    /// Average of prod L(1/2+alpha) / prod L(1/2+beta) against the ratios main term.
    Ratios {
        /// Comma-separated complex shifts.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
    },
    /// Average of prod L(1/2+alpha) chi_D(h) against its main term.
    Twisted {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        h: String,
    },
    /// One-level density for a test function given by samples of its transform.
    Density {
        /// CSV of `n,value` rows holding Phihat(n/(2g)).
        #[arg(long)]
        phihat: PathBuf,
        /// Support bound: Phihat vanishes beyond N/(2g).
        #[arg(long = "N")]
        n: usize,
    },
    /// Negative moments of |L(1/2+beta+it)| against the upper-bound shape.
    Negmom {
        #[arg(long, value_delimiter = ',')]
        beta: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// One height per factor.
        #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
        t: Vec<f64>,
    },
    /// Numerical checks of the bounds behind the negative moments.
    Boundslab {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, value_delimiter = ',')]
        beta: Option<Vec<f64>>,
        /// Majorant truncations for the lower-bound suite.
        #[arg(long = "n-trunc", value_delimiter = ',')]
        n_trunc: Option<Vec<usize>>,
        /// Genera for the scan suite.
        #[arg(long, value_delimiter = ',')]
        genera: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
        t: Vec<f64>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let cfg = cli.global.resolve()?;
    match cli.command {
        Command::Primes { max_degree } => commands::primes(&cfg, max_degree),
        Command::Lpoly { d } => commands::lpoly(&cfg, &d),
        Command::Verify { checks } => commands::verify(&cfg, &checks),
        Command::Ratios { alpha, beta } => commands::ratios(&cfg, &alpha, &beta),
        Command::Twisted { alpha, h } => commands::twisted(&cfg, &alpha, &h),
        Command::Density { phihat, n } => commands::density(&cfg, &phihat, n),
        Command::Negmom { beta, m, t } => commands::negmom(&cfg, &beta, m, &t),
        Command::Boundslab {
            suite,
            beta,
            n_trunc,
            genera,
            m,
            t,
        } => commands::boundslab(
            &cfg,
            suite,
            BoundsArgs {
                betas: beta.as_deref(),
                n_trunc: n_trunc.as_deref(),
                genera: genera.as_deref(),
                m,
                ts: &t,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("threshold breached");
            ExitCode::from(EXIT_THRESHOLD)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Precondition(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PRECONDITION)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_PRECONDITION)
        }
    }
}
