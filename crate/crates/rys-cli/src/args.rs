//! Command-line surface: subcommands, flags, and shared option groups.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "rys",
    version,
    about = "Tables and verification for generalized Gauss-Rys orthogonal polynomials",
    long_about = "Constructs moments, recurrence coefficients, Gauss quadrature rules, zeros \
and z-deformation flows for the weight (1-x^2)^(lambda-1/2)*exp(-z*x^2) on (-1,1), \
and checks them against independent residual identities."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Parameters every command needs.
#[derive(Args, Debug, Clone, Copy)]
pub struct CommonOpts {
    /// Gegenbauer exponent parameter lambda > -1/2 of the weight
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub lambda: f64,

    /// Working precision in decimal digits (>= 30)
    #[arg(long, env = "RYS_DIGITS", default_value_t = rys_core::DEFAULT_DIGITS)]
    pub digits: u32,
}

/// Output destination and format.
#[derive(Args, Debug, Clone)]
pub struct OutputOpts {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output path; writes to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Even moments s_m with the moment-recurrence residual per row
    Moments {
        #[command(flatten)]
        common: CommonOpts,
        /// Gaussian rate parameter z >= 0
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        z: f64,
        /// Table order N; emits rows for even m <= 2N
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Recurrence coefficients gamma_n and norms h_n with nonlinear-identity residuals
    Recurrence {
        #[command(flatten)]
        common: CommonOpts,
        /// Gaussian rate parameter z >= 0
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        z: f64,
        /// Largest coefficient index N
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Gauss quadrature nodes and weights with an exactness report
    Quadrature {
        #[command(flatten)]
        common: CommonOpts,
        /// Gaussian rate parameter z >= 0
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        z: f64,
        /// Number of quadrature nodes N >= 1
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Zeros of P_N with velocities, the auxiliary charge beta_N, and the
    /// electrostatic gradient residual
    Zeros {
        #[command(flatten)]
        common: CommonOpts,
        /// Gaussian rate parameter z >= 0 (velocities and beta need z > 0)
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        z: f64,
        /// Polynomial degree N >= 1
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Trajectory of gamma_n(z) over [z0, z1] with a fresh-pipeline deviation column
    Flow {
        #[command(flatten)]
        common: CommonOpts,
        /// Start of the z range (>= 0)
        #[arg(long, allow_negative_numbers = true)]
        z0: f64,
        /// End of the z range (>= 0)
        #[arg(long, allow_negative_numbers = true)]
        z1: f64,
        /// Number of checkpoints after the first (z-range of length 0 emits one)
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Number of lattice coefficients to track
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Also emit the zeros of P_n at every checkpoint
        #[arg(long, default_value_t = false)]
        with_zeros: bool,
        #[command(flatten)]
        output: OutputOpts,
    },

    /// Run the residual verification suite; exit 0 on pass, 1 on failure
    Verify {
        /// Working precision in decimal digits (>= 30)
        #[arg(long, env = "RYS_DIGITS", default_value_t = rys_core::DEFAULT_DIGITS)]
        digits: u32,
        /// Check a single z instead of the standard grid {0, 1}
        #[arg(long, allow_negative_numbers = true)]
        z: Option<f64>,
        /// Check a single lambda instead of the standard grid {0, 0.5, 1, 2.5}
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        /// Coefficient/order budget for the suite
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Fault-injection hook: shift gamma_INDEX by 1e-6 before verifying,
        /// to confirm the residual suite detects a corrupted coefficient
        #[arg(long, hide = true)]
        perturb_gamma: Option<usize>,
    },
}
