use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::walk::{rank_walk, RunOptions, SimConfig, TransitionMode, Walker};
use crate::error::{Error, Result};
use crate::ff::sample_monic;
use crate::markov::{dtable, parity, parity_weighted_pr, MarkovOp, RankDist};
use crate::place::{FrobClass, PlaceClass};

/// Minimum truncation point of reported distributions.
pub const REPORT_R_MAX: usize = 60;

#[derive(Clone, Debug, Default)]
struct Tally {
    ranks: Vec<u64>,
    p2_steps: Vec<u64>,
    classes: [u64; 4],
    w: Vec<u64>,
    w_prime: Vec<u64>,
    large_p0: u64,
    ramified: u64,
    excluded: u64,
    parity_violations: u64,
    kept: u64,
}

fn bump(v: &mut Vec<u64>, i: usize, by: u64) {
    if v.len() <= i {
        v.resize(i + 1, 0);
    }
    v[i] += by;
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        for (dst, src) in [
            (&mut self.ranks, &o.ranks),
            (&mut self.p2_steps, &o.p2_steps),
            (&mut self.w, &o.w),
            (&mut self.w_prime, &o.w_prime),
        ] {
            for (i, &c) in src.iter().enumerate() {
                bump(dst, i, c);
            }
        }
        for i in 0..4 {
            self.classes[i] += o.classes[i];
        }
        self.large_p0 += o.large_p0;
        self.ramified += o.ramified;
        self.excluded += o.excluded;
        self.parity_violations += o.parity_violations;
        self.kept += o.kept;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub identity: u64,
    pub transposition: u64,
    pub three_cycle: u64,
    pub ramified: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FhatSummary {
    /// Large-factor degree cutoff.
    pub cutoff: f64,
    pub w_counts: Vec<u64>,
    pub w_prime_counts: Vec<u64>,
    pub large_p0_samples: u64,
    pub large_p0_share: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimReport {
    pub config: SimConfig,
    /// Samples entering the histogram.
    pub samples: u64,
    pub excluded_samples: u64,
    /// Samples with at least one ramified factor.
    pub ramified_samples: u64,
    pub rank_counts: Vec<u64>,
    pub empirical: RankDist<f64>,
    pub empirical_parity: f64,
    /// Parity of the initial law.
    pub rho0: f64,
    pub target: RankDist<f64>,
    pub tv_to_target: f64,
    /// Mixture over the observed number of `P2` steps of the initial law
    /// pushed through that many transitions.
    pub prediction: RankDist<f64>,
    pub tv_to_prediction: f64,
    pub p2_step_counts: Vec<u64>,
    pub class_counts: ClassCounts,
    pub fhat: FhatSummary,
    /// Two-step walks whose final parity differs from the initial parity.
    pub parity_violations: u64,
}

fn run_block(walker: &Walker, config: &SimConfig, block: u64, deadline: Option<Instant>) -> Result<Tally> {
    if deadline.is_some_and(|d| Instant::now() > d) {
        return Err(Error::Domain("simulation time limit exceeded".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(block);
    let start = block * config.block_size;
    let count = config.block_size.min(config.samples - start);
    let field = walker.curve().field();
    let mut t = Tally::default();
    for _ in 0..count {
        let f = sample_monic(field, config.n, &mut rng);
        let rec = rank_walk(&f, walker, &mut rng)?;
        for i in 0..4 {
            t.classes[i] += rec.class_counts[i] as u64;
        }
        bump(&mut t.w, rec.fhat.w, 1);
        bump(&mut t.w_prime, rec.fhat.w_prime, 1);
        t.large_p0 += rec.fhat.has_large_p0 as u64;
        t.ramified += (rec.class_counts[FrobClass::Ramified.index()] > 0) as u64;
        if walker.mode() == TransitionMode::TwoStep && (rec.final_rank ^ rec.initial) & 1 == 1 {
            t.parity_violations += 1;
        }
        if config.strict_fhat && !rec.fhat.has_large_p0 {
            t.excluded += 1;
            continue;
        }
        t.kept += 1;
        bump(&mut t.ranks, rec.final_rank, 1);
        bump(&mut t.p2_steps, rec.p2_steps, 1);
    }
    Ok(t)
}

/// One `P2` transition applied to a distribution on `0..=r_max`, with
/// overflow mapped to the top state of the same parity.
pub fn p2_kernel_step(mode: TransitionMode, ell: u64, v: &[f64]) -> Result<Vec<f64>> {
    let r_max = v.len() - 1;
    match mode {
        TransitionMode::TwoStep => Ok(MarkovOp::<f64>::m_ell2(ell, r_max)?.step_vec(v)),
        TransitionMode::DTable => {
            let mut out = vec![0.0; v.len()];
            for (r, &p) in v.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (j, w) in dtable::<f64>(ell, r as u32, PlaceClass::P2)? {
                    if w == 0.0 {
                        continue;
                    }
                    let mut t = usize::try_from(r as i64 + j as i64)
                        .map_err(|_| Error::Domain(format!("negative target from state {r}")))?;
                    while t > r_max {
                        t -= 2;
                    }
                    out[t] += p * w;
                }
            }
            Ok(out)
        }
    }
}

/// `sum_k h(k)/N mu K^k` for the step histogram `h`.
pub fn rao_blackwell_prediction(
    mode: TransitionMode,
    ell: u64,
    mu_star: &RankDist<f64>,
    step_counts: &[u64],
    r_max: usize,
) -> Result<RankDist<f64>> {
    let total: u64 = step_counts.iter().sum();
    if total == 0 {
        return Err(Error::Domain("no samples for the prediction".into()));
    }
    let mut v = mu_star.resize(r_max).probs().to_vec();
    let mut acc = vec![0.0; r_max + 1];
    for (k, &h) in step_counts.iter().enumerate() {
        if h > 0 {
            let w = h as f64 / total as f64;
            for (a, x) in acc.iter_mut().zip(&v) {
                *a += w * x;
            }
        }
        if k + 1 < step_counts.len() {
            v = p2_kernel_step(mode, ell, &v)?;
        }
    }
    let s: f64 = acc.iter().sum();
    RankDist::new(acc, (1.0 - s).max(0.0))
}

/// Samples `config.samples` monic polynomials of degree `n`, walks each
/// through its factors, and compares the rank histogram with the
/// parity-weighted target and the step-count prediction.
///
/// Blocks of `block_size` samples use independent substreams of `seed`
/// and merge in block order, so results do not depend on `workers`.
pub fn run_experiment(config: &SimConfig, options: &RunOptions) -> Result<SimReport> {
    if options.workers < 1 {
        return Err(Error::Config("workers must be positive".into()));
    }
    let started = Instant::now();
    let walker = Walker::new(config)?;
    let deadline = options.time_limit_secs.map(|s| started + std::time::Duration::from_secs_f64(s));
    let blocks = config.samples.div_ceil(config.block_size);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let tallies: Vec<Tally> = pool.install(|| {
        (0..blocks).into_par_iter().map(|b| run_block(&walker, config, b, deadline)).collect::<Result<_>>()
    })?;
    let t = tallies.into_iter().fold(Tally::default(), Tally::merge);
    if t.kept == 0 {
        return Err(Error::Domain("every sample was excluded".into()));
    }

    let ell = walker.curve().ell();
    let r_max = REPORT_R_MAX.max(t.ranks.len() - 1).max(walker.mu_star().r_max());
    let mut counts = t.ranks.clone();
    counts.resize(r_max + 1, 0);
    let empirical = RankDist::new(counts.iter().map(|&c| c as f64 / t.kept as f64).collect(), 0.0)?;
    let rho0 = parity(walker.mu_star());
    let target = parity_weighted_pr(ell, rho0, r_max)?;
    let prediction = rao_blackwell_prediction(config.transition_mode, ell, walker.mu_star(), &t.p2_steps, r_max)?;
    let total = config.samples as f64;
    Ok(SimReport {
        config: config.clone(),
        samples: t.kept,
        excluded_samples: t.excluded,
        ramified_samples: t.ramified,
        rank_counts: t.ranks,
        empirical_parity: parity(&empirical),
        rho0,
        tv_to_target: empirical.tv_distance(&target),
        tv_to_prediction: empirical.tv_distance(&prediction),
        empirical,
        target,
        prediction,
        p2_step_counts: t.p2_steps,
        class_counts: ClassCounts {
            identity: t.classes[FrobClass::Identity.index()],
            transposition: t.classes[FrobClass::Transposition.index()],
            three_cycle: t.classes[FrobClass::ThreeCycle.index()],
            ramified: t.classes[FrobClass::Ramified.index()],
        },
        fhat: FhatSummary {
            cutoff: walker.frak_n(),
            w_counts: t.w,
            w_prime_counts: t.w_prime,
            large_p0_samples: t.large_p0,
            large_p0_share: t.large_p0 as f64 / total,
        },
        parity_violations: t.parity_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::place::CurveSpec;

    fn cfg(samples: u64, seed: u64) -> SimConfig {
        let mut c = SimConfig::new(CurveSpec::example(), 8, samples, seed);
        c.block_size = 64;
        c
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let a = cfg(500, 7);
        let one = RunOptions { workers: 1, time_limit_secs: None };
        let four = RunOptions { workers: 4, time_limit_secs: None };
        let (ra, rb) = (run_experiment(&a, &one).unwrap(), run_experiment(&a, &four).unwrap());
        assert_eq!(serde_json::to_string(&ra).unwrap(), serde_json::to_string(&rb).unwrap());
        let rc = run_experiment(&cfg(500, 8), &one).unwrap();
        assert_ne!(ra.rank_counts, rc.rank_counts);
    }

    #[test]
    fn two_step_walk_keeps_parity() {
        let mut c = cfg(400, 1);
        c.mu_star = vec![0.5, 0.5];
        let r = run_experiment(&c, &RunOptions::default()).unwrap();
        assert_eq!(r.parity_violations, 0);
        assert_eq!(r.samples, 400);
        assert_eq!(r.rho0, 0.5);
    }

    #[test]
    fn prediction_with_no_steps_is_initial_law() {
        let mu = RankDist::new(vec![0.25, 0.75], 0.0).unwrap();
        let p = rao_blackwell_prediction(TransitionMode::TwoStep, 5, &mu, &[10], 10).unwrap();
        assert_eq!(p.prob(0), 0.25);
        assert_eq!(p.prob(1), 0.75);
        // one step from 0: 0 w.p. 4/5, 2 w.p. 1/5
        let mu = RankDist::point_mass(0, 10).unwrap();
        let p = rao_blackwell_prediction(TransitionMode::TwoStep, 5, &mu, &[1, 1], 10).unwrap();
        assert!((p.prob(0) - 0.9).abs() < 1e-15);
        assert!((p.prob(2) - 0.1).abs() < 1e-15);
        let p = rao_blackwell_prediction(TransitionMode::DTable, 5, &mu, &[0, 1], 10).unwrap();
        assert_eq!(p.prob(2), 1.0);
    }

    #[test]
    fn time_limit_aborts() {
        let opts = RunOptions { workers: 1, time_limit_secs: Some(0.0) };
        assert!(run_experiment(&cfg(10_000, 1), &opts).is_err());
    }
}
