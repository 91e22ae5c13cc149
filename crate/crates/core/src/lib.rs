//! Arithmetic statistics of twisted superelliptic curves `y^ell = F(x)` over
//! `F_q(t)`: place classification, residue symbols, rank-state Markov
//! operators, Monte Carlo twist families and explicit point-count constants.

pub mod constants;
pub mod error;
pub mod ff;
pub mod markov;
pub mod place;
pub mod residue;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

use num_rational::BigRational;

pub type RankDistF64 = markov::RankDist<f64>;
pub type RankDistF32 = markov::RankDist<f32>;
pub type ExactRankDist = markov::RankDist<BigRational>;
pub type MarkovOpF64 = markov::MarkovOp<f64>;
pub type MarkovOpF32 = markov::MarkovOp<f32>;
pub type ExactMarkovOp = markov::MarkovOp<BigRational>;
