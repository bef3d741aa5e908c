//! Command-line argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mixkt",
    version,
    about = "K_t-functionals and rectangle norms for mixed-norm couples"
)]
pub struct Cli {
    /// Seed for every randomized step; echoed in each report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Lift the size guards on the exponential enumerations.
    #[arg(long, global = true)]
    pub guard_override: bool,

    /// Significant digits in printed numbers.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub digits: u8,

    #[command(subcommand)]
    pub command: Command,
}

/// Instance source: a JSON file, or standard input when omitted or `-`.
#[derive(Debug, Args)]
pub struct InputArgs {
    #[arg(long, short)]
    pub input: Option<PathBuf>,
}

/// The couple `(p, q)` and the parameter `t`.
#[derive(Debug, Args)]
pub struct CoupleArgs {
    /// Outer exponent, `inf` allowed.
    #[arg(long, default_value = "inf", value_parser = parse_exponent)]
    pub p: f64,
    /// Inner exponent, `1 <= q < p`.
    #[arg(long, default_value_t = 1.0, value_parser = parse_exponent)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    /// `L^q` over the product measure (`--q`).
    Lq,
    /// `l^inf(l^1)` of the rows (with `--transpose`, of the columns).
    Mixed,
    /// Weak `L^{p,inf}` over the product measure (`--p`).
    Weak,
    /// Lorentz `L^{p,q}` over the product measure (`--p`, `--q`).
    Lorentz,
    /// `l^{p,inf}(l^q)` of the rows (`--p`, `--q`, `--transpose`).
    MixedWeak,
    /// `l^{p,r}(l^q)` of the rows (`--p`, `--r`, `--q`, `--transpose`).
    MixedLorentz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RectKind {
    /// The rectangle norm `|||a|||_{p,q,t}`.
    Triple,
    /// The constrained rectangle norm.
    Quad,
    /// The `p = 1` degenerate form, closed form and direct search.
    P1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    /// Rectangle lower bound and split upper bound.
    Bracket,
    /// Bracket tightened by the mask search and, for `(inf, 1)`, the LP.
    Refined,
    /// Exact value by linear programming; `(inf, 1)` only.
    Lp,
    /// Best 0/1 mask decomposition.
    Mask,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpKind {
    /// `|||u|||_t` of a kernel operator (`--t`).
    OpTriple,
    /// `[u]_p` with `p = 1/theta` (`--theta`).
    Bracket,
    /// `sup_t t^{-theta} |||u|||_t` (`--theta`).
    ThetaInf,
    /// Enclosure of the `(theta, q)` interpolation norm (`--theta`, `--interp-q`).
    ThetaQ,
    /// The weak-type quantity and its relation to `[u]_p` (`--theta`).
    WeakType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Bracket,
    Lp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Masses {
    Unit,
    Wide,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a norm of the instance matrix.
    Norm {
        #[arg(value_enum)]
        kind: NormKind,
        #[arg(long, value_parser = parse_exponent)]
        p: Option<f64>,
        #[arg(long, value_parser = parse_exponent)]
        q: Option<f64>,
        #[arg(long, value_parser = parse_exponent)]
        r: Option<f64>,
        /// Use the transposed matrix (roles of rows and columns swapped).
        #[arg(long)]
        transpose: bool,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Rectangle norms with their witness rectangle.
    Rectnorm {
        #[arg(value_enum, default_value = "triple")]
        kind: RectKind,
        #[command(flatten)]
        couple: CoupleArgs,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Certified split of the cells into `A` and `B`.
    Split {
        #[command(flatten)]
        couple: CoupleArgs,
        /// Print each peeling stage.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Bounds or exact values for `K_t(a)`.
    Kt {
        #[arg(long, value_enum, default_value = "bracket")]
        oracle: Oracle,
        #[command(flatten)]
        couple: CoupleArgs,
        /// Print the decomposition `a = b + c`.
        #[arg(long)]
        decomposition: bool,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Operator and interpolation norms; the instance matrix is the kernel.
    Interp {
        #[arg(value_enum)]
        kind: InterpKind,
        #[arg(long, value_parser = parse_positive)]
        t: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, default_value = "inf", value_parser = parse_exponent)]
        interp_q: f64,
        /// Couple for `theta-q`.
        #[arg(long, default_value = "inf", value_parser = parse_exponent)]
        p: f64,
        #[arg(long, default_value_t = 1.0, value_parser = parse_exponent)]
        q: f64,
        #[arg(long, value_enum, default_value = "bracket")]
        source: Source,
        #[arg(long, default_value_t = 1.1)]
        ratio: f64,
        #[arg(long, default_value_t = 1e4)]
        span: f64,
        #[arg(long)]
        center: Option<f64>,
        #[command(flatten)]
        input: InputArgs,
    },
    /// Randomized cross-checks of the library on small instances.
    Verify {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..=8))]
        max_size: u64,
        /// Comma-separated `p:q` couples.
        #[arg(long, default_value = "inf:1,2:1,3:1,4:2,inf:2")]
        couples: String,
        /// Comma-separated values of `t`.
        #[arg(long, default_value = "0.1,1,7")]
        ts: String,
        #[arg(long, hide = true)]
        corrupt_split: bool,
    },
    /// Rerun a worked example with its checks.
    Repro {
        /// One of single-row, lorentz-row, uniform-square, unit-mass.
        case: String,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        #[arg(long, value_parser = parse_exponent)]
        p: Option<f64>,
        #[arg(long, value_parser = parse_exponent)]
        q: Option<f64>,
        #[arg(long, value_parser = parse_positive)]
        t: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Write a random instance as JSON.
    Generate {
        #[arg(long, default_value_t = 3)]
        rows: usize,
        #[arg(long, default_value_t = 3)]
        cols: usize,
        #[arg(long, value_enum, default_value = "unit")]
        masses: Masses,
        /// Probability that an entry is zero.
        #[arg(long, default_value_t = 0.0)]
        zero_prob: f64,
    },
}

pub fn parse_exponent(s: &str) -> Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "Inf" | "INF" => Ok(f64::INFINITY),
        other => {
            let x: f64 = other.parse().map_err(|_| format!("'{s}' is not a number or 'inf'"))?;
            if x >= 1.0 {
                Ok(x)
            } else {
                Err(format!("exponent must be >= 1, got {s}"))
            }
        }
    }
}

pub fn parse_positive(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be positive and finite, got {s}"))
    }
}
