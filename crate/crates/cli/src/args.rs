//! Command-line flags.
//!
//! | flag            | meaning                                        | default |
//! |-----------------|------------------------------------------------|---------|
//! | `--r`           | unilateral-defection profit, `0 < r < 1`       | 0.2     |
//! | `--b`, `--c`    | donation game benefit and cost (`r = c/b`)     |         |
//! | `--k`           | linear interaction strength `f(x) = k x`       |         |
//! | `--p`           | constant interaction strength `f(x) = p`       |         |
//! | `--seed`        | ChaCha8 seed for initial states                | 42      |
//! | `--members`     | ensemble size                                  | 50      |
//! | `--method`      | `euler` or `rk4`                               | euler   |
//! | `--step`        | integration step                               | 1 (euler), 0.01 (rk4) |
//! | `--max-steps`   | step cap per trajectory                        | 100000  |
//! | `--out`         | CSV output path                                |         |
//! | `--json`        | print the output record as JSON                |         |

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use replicator_core::{DonationGame, InteractionStrength, Method, ReducedGame};

use crate::error::{CliError, Result};

pub const DEFAULT_R: f64 = 0.2;

#[derive(Debug, Parser)]
#[command(
    name = "replicator",
    version,
    about = "Prisoner's Dilemma replicator dynamics with frequency-dependent interaction strength"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical interaction strengths k1 = 1/(1+r) and k2 = (1+r)/(4r).
    Thresholds(ThresholdsArgs),
    /// Fixed points, their stability and the regime for one parameter set.
    Analyze(AnalyzeArgs),
    /// Regime and fixed points across a grid of strengths.
    Sweep(SweepArgs),
    /// Integrate a seeded ensemble of trajectories.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("donation").args(["b", "c"]).multiple(true).conflicts_with("r")))]
pub struct GameArgs {
    /// Profit of unilateral defection, 0 < r < 1.
    #[arg(long, value_parser = open_unit)]
    pub r: Option<f64>,
    /// Donation game benefit (requires --c).
    #[arg(long, value_parser = positive, requires = "c")]
    pub b: Option<f64>,
    /// Donation game cost (requires --b).
    #[arg(long, value_parser = positive, requires = "b")]
    pub c: Option<f64>,
}

impl GameArgs {
    pub fn donation(&self) -> Result<Option<DonationGame>> {
        match (self.b, self.c) {
            (Some(b), Some(c)) => DonationGame::new(b, c)
                .map(Some)
                .map_err(|e| CliError::Usage(e.to_string())),
            _ => Ok(None),
        }
    }

    pub fn reduced(&self, default: Option<f64>) -> Result<ReducedGame> {
        if let Some(d) = self.donation()? {
            return Ok(d.into());
        }
        let r = self
            .r
            .or(default)
            .ok_or_else(|| CliError::Usage("one of --r or --b/--c is required".to_string()))?;
        ReducedGame::new(r).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("strength").args(["k", "p"]).required(true)))]
pub struct StrengthArgs {
    /// Linear interaction strength f(x) = k x, k > 0.
    #[arg(long, value_parser = positive)]
    pub k: Option<f64>,
    /// Constant interaction strength f(x) = p, 0 <= p <= 1.
    #[arg(long, value_parser = closed_unit)]
    pub p: Option<f64>,
}

impl StrengthArgs {
    pub fn strength(&self) -> InteractionStrength {
        match (self.k, self.p) {
            (Some(k), _) => InteractionStrength::LinearInFrequency(k),
            (None, Some(p)) => InteractionStrength::Constant(p),
            (None, None) => unreachable!("clap enforces the strength group"),
        }
    }
}

#[derive(Debug, Args)]
pub struct ThresholdsArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub strength: StrengthArgs,
    /// Write one CSV row per fixed point.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("variant").args(["linear", "constant"]).required(true)))]
pub struct SweepArgs {
    /// Sweep k in f(x) = k x.
    #[arg(long)]
    pub linear: bool,
    /// Sweep p in f(x) = p.
    #[arg(long)]
    pub constant: bool,
    #[command(flatten)]
    pub game: GameArgs,
    /// First grid value (default 0.1 for --linear, 0 for --constant).
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    /// Last grid value (default 2 for --linear, 1 for --constant).
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 100, value_parser = at_least_one)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Euler,
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Euler => Method::PaperEuler,
            MethodArg::Rk4 => Method::RungeKutta4,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[command(flatten)]
    pub strength: StrengthArgs,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 50, value_parser = at_least_one)]
    pub members: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Euler)]
    pub method: MethodArg,
    /// Integration step (default 1 for euler, 0.01 for rk4).
    #[arg(long, value_parser = positive)]
    pub step: Option<f64>,
    #[arg(long, default_value_t = 100_000, value_parser = at_least_one)]
    pub max_steps: usize,
    /// Stop once |dx| < tolerance * step.
    #[arg(long, default_value_t = 1e-8, value_parser = non_negative)]
    pub tolerance: f64,
    /// Record every n-th step in the trajectory file.
    #[arg(long, default_value_t = 1, value_parser = at_least_one)]
    pub stride: usize,
    /// Terminal states within this distance of a fixed point join its basin.
    #[arg(long, default_value_t = 1e-3, value_parser = positive)]
    pub bin_radius: f64,
    /// Long-format trajectory CSV (member,t,x).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-member summary CSV (default: next to --out with a .summary.csv suffix).
    #[arg(long)]
    pub summary: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

fn number(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn open_unit(s: &str) -> std::result::Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside the open interval (0, 1)"))
    }
}

fn closed_unit(s: &str) -> std::result::Result<f64, String> {
    let v = number(s)?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn non_negative(s: &str) -> std::result::Result<f64, String> {
    let v = number(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be non-negative"))
    }
}

fn at_least_one(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("'{s}' must be an integer >= 1")),
    }
}
