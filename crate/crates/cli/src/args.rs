use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use glsx::{Exponent, ExponentInterval};

/// Grand Lebesgue space norms, operator bounds and extrapolation checks.
///
/// Exit codes: 0 when every asserted inequality holds, 1 on a violation (the
/// witness is written to the report), 2 on malformed input.
#[derive(Debug, Parser)]
#[command(name = "glsx", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Points in each log-spaced exponent grid.
    #[arg(long, global = true, default_value_t = 256)]
    pub grid_points: usize,
    /// Random test vectors per check.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    /// Relative tolerance for oracle comparisons and formula matching.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tolerance: f64,
    /// Report path; standard output when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// GLS norm sup_p ||f||_p / psi(p) of a grid function.
    GlsNorm {
        /// Grid function: inline JSON or a path.
        #[arg(long)]
        function: String,
        /// Generating function spec: inline JSON or a path.
        #[arg(long)]
        psi: String,
    },
    /// Fundamental function sup_p delta^{1/p} / psi(p).
    Fundamental {
        #[arg(long)]
        psi: String,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
    },
    /// Young-Fenchel tail bound T_f(t) <= exp(-h*(ln t)) for a function of unit GLS norm.
    FenchelTail {
        #[arg(long)]
        function: String,
        #[arg(long)]
        psi: String,
        /// Levels t >= e.
        #[arg(long, value_delimiter = ',', default_value = "2.718281828459045,4,10,100")]
        t: Vec<f64>,
        /// Divide the function by its GLS norm first.
        #[arg(long)]
        normalize: bool,
    },
    /// Lower bound of ||A||_{q->p} by duality-map ascent, optionally checked by the oracle.
    Opnorm {
        /// Matrix: inline JSON or a path.
        #[arg(long)]
        matrix: String,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        /// Also run the exhaustive oracle and require agreement within --tolerance.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 720)]
        resolution: usize,
    },
    /// Minimal constant max sigma^{1/p-1/q} ||A||_{q->p} over the exponent grids.
    MinimalConstant {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 12)]
        constant_grid_points: usize,
        #[arg(long, value_parser = parse_interval)]
        p_interval: ExponentInterval,
        #[arg(long, value_parser = parse_interval)]
        q_interval: ExponentInterval,
    },
    /// Checks the GLS extrapolation inequality on sampled arguments.
    VerifyTheorem1 {
        #[command(flatten)]
        operator: OperatorArgs,
        /// Target generating function.
        #[arg(long)]
        psi: String,
        /// Source generating function.
        #[arg(long)]
        nu: String,
    },
    /// Checks the moment rearrangement invariant extrapolation inequality.
    VerifyTheorem2 {
        #[command(flatten)]
        operator: OperatorArgs,
        /// Target norm spec: inline JSON or a path.
        #[arg(long)]
        w: String,
        /// Source norm spec: inline JSON or a path.
        #[arg(long)]
        r: String,
    },
    /// Builds, validates or measures magic squares.
    Magic {
        /// Order of the square to build (odd, or divisible by 4).
        #[arg(long, required_unless_present = "validate", conflicts_with = "validate")]
        order: Option<usize>,
        /// Square to validate: inline JSON or a path.
        #[arg(long)]
        validate: Option<String>,
        /// Exponent pairs q:p whose norms are compared with the formula.
        #[arg(long, value_delimiter = ',', value_parser = parse_pair, requires = "order")]
        check_norms: Vec<(Exponent, Exponent)>,
        #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
        convention: ConventionArg,
        #[arg(long, default_value_t = 720)]
        resolution: usize,
    },
    /// Operator norms of a magic square against alpha * n^{|1/q-1/p|} under every convention.
    CheckSuperExact {
        #[arg(long)]
        order: usize,
        #[arg(long, value_delimiter = ',', value_parser = parse_pair, default_value = "1:inf,2:4,1:2")]
        pairs: Vec<(Exponent, Exponent)>,
        #[arg(long, default_value_t = 720)]
        resolution: usize,
    },
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    /// Matrix: inline JSON or a path.
    #[arg(long)]
    pub matrix: String,
    #[arg(long)]
    pub sigma: f64,
    /// Claimed constant C; when omitted the minimal constant is used.
    #[arg(long)]
    pub constant: Option<f64>,
    /// Exponents per interval when estimating the minimal constant.
    #[arg(long, default_value_t = 12)]
    pub constant_grid_points: usize,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::GlsNorm { .. } => "gls-norm",
            Command::Fundamental { .. } => "fundamental",
            Command::FenchelTail { .. } => "fenchel-tail",
            Command::Opnorm { .. } => "opnorm",
            Command::MinimalConstant { .. } => "minimal-constant",
            Command::VerifyTheorem1 { .. } => "verify-theorem1",
            Command::VerifyTheorem2 { .. } => "verify-theorem2",
            Command::Magic { .. } => "magic",
            Command::CheckSuperExact { .. } => "check-super-exact",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Counting,
    Normalized,
    Both,
}

pub fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.trim().parse::<Exponent>().map_err(|e| e.to_string())
}

pub fn parse_pair(s: &str) -> Result<(Exponent, Exponent), String> {
    let (q, p) = s.split_once(':').ok_or_else(|| format!("expected q:p, got {s:?}"))?;
    Ok((parse_exponent(q)?, parse_exponent(p)?))
}

pub fn parse_interval(s: &str) -> Result<ExponentInterval, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad lower endpoint {a:?}"))?;
    ExponentInterval::new(a, parse_exponent(b)?).map_err(|e| e.to_string())
}
