use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Reference table of E(l,p,1), P(l,1), P(l,2).
    Table1,
    /// S, E, P and moment bounds for one (l, p, m).
    Constants,
    /// Stationary laws, spectral gap and alpha exponent.
    Stationary,
    /// Monte Carlo rank walk over random twists.
    Simulate,
    /// Frobenius classes of places.
    Classify,
    /// Exhaustive class census against the effective density bound.
    Chebotarev,
    /// Exact counts of polynomials by number of distinct factors.
    OmegaDist,
    /// Point-count and tail claims in exact arithmetic.
    Claims,
    /// Checks of the two-dimensional S3 representation mod l.
    S3Check,
    /// Printed transition rows against the two-step law.
    DtableDiff,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Table1 => "table1",
            Command::Constants => "constants",
            Command::Stationary => "stationary",
            Command::Simulate => "simulate",
            Command::Classify => "classify",
            Command::Chebotarev => "chebotarev",
            Command::OmegaDist => "omega-dist",
            Command::Claims => "claims",
            Command::S3Check => "s3-check",
            Command::DtableDiff => "dtable-diff",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Selmer-rank statistics and point-count bounds for twist families.
///
/// Exit codes: 0 success, 1 claim failure or replay mismatch, 2 configuration error.
#[derive(Clone, Debug, Default, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "twistsel", version)]
pub struct Cli {
    /// Subcommand; may be omitted with --replay.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Prime l >= 5.
    #[arg(long)]
    pub ell: Option<u64>,
    /// Field size (a prime power).
    #[arg(long)]
    pub q: Option<u64>,
    /// Characteristic, or the prime p of the constants.
    #[arg(long)]
    pub p: Option<u64>,
    /// Curve description (TOML or JSON).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Polynomial degree n, or the largest place degree.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Number of sampled twisting polynomials
    #[arg(long)]
    pub samples: Option<u64>,
    /// Required by simulate.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    pub workers: Option<usize>,
    /// tabulated|displayed, two-step|d-table, literal|consistent or positive|literal.
    #[arg(long)]
    pub mode: Option<String>,
    /// Output file; the manifest goes to <out>.manifest.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Re-run a manifest and compare the output digest.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Largest k of the tail claims.
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Moment order m.
    #[arg(long)]
    pub m: Option<u32>,
    /// Truncation point R.
    #[arg(long = "r-max")]
    pub r_max: Option<usize>,
    /// Initial rank law, comma-separated probabilities.
    #[arg(long = "mu-star")]
    pub mu_star: Option<String>,
    /// Odd mass of the parity-weighted law.
    #[arg(long)]
    pub rho0: Option<f64>,
    /// Holding probability of M_T.
    #[arg(long)]
    pub delta0: Option<f64>,
    /// Largest enumeration size.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Single place as comma-separated coefficients, low to high.
    #[arg(long)]
    pub place: Option<String>,
    /// Exact rational output where available.
    #[arg(long)]
    #[serde(default)]
    pub exact: bool,
    /// Visit factors in random order.
    #[arg(long)]
    #[serde(default)]
    pub shuffle: bool,
    /// Keep only samples with a large P0 factor.
    #[arg(long)]
    #[serde(default)]
    pub strict: bool,
    /// Abort a simulation after this many seconds.
    #[arg(long = "time-limit")]
    pub time_limit: Option<f64>,
}
