use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::thresholds::frak_n;
use crate::error::{Error, Result};
use crate::ff::{factor, Place, Poly};
use crate::markov::{dtable, RankDist};
use crate::place::{certify_s3, classify_place, CurveConfig, CurveSpec, FrobClass, PlaceClass};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionMode {
    /// One two-step move of `M_ell` per `P2` factor.
    #[default]
    TwoStep,
    /// One draw from the printed `P2` table row per `P2` factor.
    DTable,
}

fn default_mu_star() -> Vec<f64> {
    vec![1.0]
}

fn default_block_size() -> u64 {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub curve: CurveSpec,
    /// Twist degree.
    pub n: usize,
    pub samples: u64,
    /// Initial rank law as probabilities on `0, 1, ...`; default point mass 0.
    #[serde(default = "default_mu_star")]
    pub mu_star: Vec<f64>,
    #[serde(default)]
    pub transition_mode: TransitionMode,
    pub seed: u64,
    /// Visit factors in random order instead of ascending degree.
    #[serde(default)]
    pub shuffle: bool,
    /// Keep only samples with a large `P0` factor.
    #[serde(default)]
    pub strict_fhat: bool,
    /// Samples per random substream.
    #[serde(default = "default_block_size")]
    pub block_size: u64,
}

/// Execution settings that do not affect results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub workers: usize,
    pub time_limit_secs: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1, time_limit_secs: None }
    }
}

impl SimConfig {
    pub fn new(curve: CurveSpec, n: usize, samples: u64, seed: u64) -> Self {
        SimConfig {
            curve,
            n,
            samples,
            mu_star: default_mu_star(),
            transition_mode: TransitionMode::TwoStep,
            seed,
            shuffle: false,
            strict_fhat: false,
            block_size: default_block_size(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FhatStats {
    /// Distinct irreducible factors.
    pub w: usize,
    /// Distinct irreducible factors of degree above the large-factor cutoff.
    pub w_prime: usize,
    /// Total degree of the factors with multiplicity.
    pub big_n: usize,
    pub has_large_p0: bool,
}

/// Validated simulation context shared by all walks.
#[derive(Clone, Debug)]
pub struct Walker {
    curve: CurveConfig,
    mu_star: RankDist<f64>,
    mu_cdf: Vec<f64>,
    mode: TransitionMode,
    shuffle: bool,
    frak_n: f64,
}

impl Walker {
    pub fn new(config: &SimConfig) -> Result<Self> {
        if config.n < 1 || config.samples < 1 || config.block_size < 1 {
            return Err(Error::Config("n, samples and block_size must be positive".into()));
        }
        let curve = CurveConfig::new(config.curve.clone())?;
        let cert = certify_s3(&curve)?;
        if !cert.is_certified() {
            return Err(Error::NotCertified(format!("{cert:?}")));
        }
        let mu_star = RankDist::new(config.mu_star.clone(), 0.0)?;
        let mut acc = 0.0;
        let mu_cdf = mu_star
            .probs()
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let frak_n = frak_n(config.n.max(2) as f64, curve.field().q() as f64);
        Ok(Walker { curve, mu_star, mu_cdf, mode: config.transition_mode, shuffle: config.shuffle, frak_n })
    }

    pub fn curve(&self) -> &CurveConfig {
        &self.curve
    }

    pub fn mu_star(&self) -> &RankDist<f64> {
        &self.mu_star
    }

    pub fn frak_n(&self) -> f64 {
        self.frak_n
    }

    pub fn mode(&self) -> TransitionMode {
        self.mode
    }

    fn draw_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        self.mu_cdf.iter().position(|&c| u < c).unwrap_or(self.mu_cdf.len() - 1)
    }

    /// One `P2` transition from `r`.
    pub fn p2_step<R: Rng + ?Sized>(&self, r: usize, rng: &mut R) -> usize {
        let ell = self.curve.ell();
        match self.mode {
            TransitionMode::TwoStep => {
                let mut s = r;
                for _ in 0..2 {
                    s = if s == 0 {
                        1
                    } else if rng.gen::<f64>() < 1.0 - (ell as f64).powi(-(s as i32)) {
                        s - 1
                    } else {
                        s + 1
                    };
                }
                s
            }
            TransitionMode::DTable => {
                let row = dtable::<f64>(ell, r as u32, PlaceClass::P2).expect("P2 row");
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (j, p) in &row {
                    acc += p;
                    if u < acc {
                        return (r as i64 + *j as i64) as usize;
                    }
                }
                (r as i64 + row.last().expect("nonempty").0 as i64) as usize
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub initial: usize,
    pub final_rank: usize,
    pub p2_steps: usize,
    /// Distinct factors per [`FrobClass::index`].
    pub class_counts: [u32; 4],
    pub fhat: FhatStats,
}

/// Factor-count statistics of `f` with the classes of its distinct factors.
pub fn fhat_census<R: Rng + ?Sized>(f: &Poly, curve: &CurveConfig, rng: &mut R) -> Result<FhatStats> {
    let cut = frak_n(f.deg().max(2) as f64, curve.field().q() as f64);
    Ok(census_of(f, curve, cut, rng)?.0)
}

fn census_of<R: Rng + ?Sized>(
    f: &Poly,
    curve: &CurveConfig,
    cut: f64,
    rng: &mut R,
) -> Result<(FhatStats, Vec<(Place, FrobClass, PlaceClass)>)> {
    let fac = factor(curve.field(), f, rng)?;
    let big_n = fac.factors.iter().map(|(g, m)| g.deg() * *m as usize).sum();
    let classified: Vec<(Place, FrobClass, PlaceClass)> = fac
        .factors
        .into_iter()
        .map(|(g, _)| {
            let v = Place::new_unchecked(g);
            let (frob, class) = classify_place(curve, &v);
            (v, frob, class)
        })
        .collect();
    let large = |v: &Place| v.degree() as f64 > cut;
    let stats = FhatStats {
        w: classified.len(),
        w_prime: classified.iter().filter(|(v, _, _)| large(v)).count(),
        big_n,
        has_large_p0: classified.iter().any(|(v, _, c)| large(v) && *c == PlaceClass::P0),
    };
    Ok((stats, classified))
}

/// Draws an initial rank from `mu_star` and moves it along the distinct
/// irreducible factors of `f` in ascending degree (or shuffled): `P2`
/// factors apply one transition, all others leave the rank unchanged.
pub fn rank_walk<R: Rng + ?Sized>(f: &Poly, walker: &Walker, rng: &mut R) -> Result<WalkRecord> {
    let initial = walker.draw_initial(rng);
    let (fhat, mut classified) = census_of(f, &walker.curve, walker.frak_n, rng)?;
    if walker.shuffle {
        classified.shuffle(rng);
    }
    let mut rank = initial;
    let mut class_counts = [0u32; 4];
    let mut p2_steps = 0;
    for (_, frob, class) in &classified {
        class_counts[frob.index()] += 1;
        if *class == PlaceClass::P2 {
            rank = walker.p2_step(rank, rng);
            p2_steps += 1;
        }
    }
    Ok(WalkRecord { initial, final_rank: rank, p2_steps, class_counts, fhat })
}
