use super::dist::RankDist;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest tail beyond `R` accepted for the stationary laws.
pub const PR_TAIL_TOLERANCE: f64 = 1e-12;

/// Number of factors after which `prod (1 + ell^(-j))` is within
/// relative error `1e-30`.
pub fn product_cutoff(ell: u64) -> u32 {
    (30.0 / (ell as f64).log10()).ceil() as u32 + 1
}

/// `prod_{j=1}^{J} (1 + ell^(-j))`.
pub fn partial_product<S: Scalar>(ell: u64, j_max: u32) -> S {
    (1..=j_max).fold(S::one(), |acc, j| acc * (S::one() + S::recip_pow(ell, j)))
}

/// `prod_{j>=1} (1 + ell^(-j))^(-1)`, truncated at [`product_cutoff`]. The
/// omitted factors lie in `[1, 1 + 2 ell^(-J) / (ell - 1)]`.
pub fn normalization<S: Scalar>(ell: u64) -> S {
    S::one() / partial_product::<S>(ell, product_cutoff(ell))
}

/// `prod_{j=1}^{r} ell / (ell^j - 1)` for `r = 0..=R`.
pub fn pr_ratios<S: Scalar>(ell: u64, r_max: usize) -> Vec<S> {
    let l = S::from_u64(ell).expect("small ell");
    let mut out = Vec::with_capacity(r_max + 1);
    let mut acc = S::one();
    let mut power = S::one();
    out.push(acc.clone());
    for _ in 1..=r_max {
        power = power * l.clone();
        acc = acc * l.clone() / (power.clone() - S::one());
        out.push(acc.clone());
    }
    out
}

/// `pi_1(r) = N prod_{j=1}^{r} ell/(ell^j - 1)`; `pi_1(0) = N`. Each parity
/// class sums to 1, so the whole sequence sums to 2.
pub fn pr_weights<S: Scalar>(ell: u64, r_max: usize) -> Vec<S> {
    let n = normalization::<S>(ell);
    pr_ratios::<S>(ell, r_max).into_iter().map(|x| x * n.clone()).collect()
}

fn with_tail<S: Scalar>(probs: Vec<S>) -> Result<RankDist<S>> {
    let mass = crate::scalar::sum(&probs);
    let tail = S::one() - mass;
    let t = tail.to_f64_lossy();
    if t > PR_TAIL_TOLERANCE {
        return Err(Error::TailExceeded { tail: t, tolerance: PR_TAIL_TOLERANCE });
    }
    // a negative tail is truncation error of the infinite product, < 1e-30
    let tail = if tail < S::zero() { S::zero() } else { tail };
    Ok(RankDist::from_parts(probs, tail))
}

/// Stationary law of `M_ell`: `pi_1 / 2`, total mass 1.
pub fn pr_distribution<S: Scalar>(ell: u64, r_max: usize) -> Result<RankDist<S>> {
    let half = S::from_ratio(1, 2);
    with_tail(pr_weights::<S>(ell, r_max).into_iter().map(|x| x * half.clone()).collect())
}

/// `r -> (1/2 + (-1)^r (1/2 - rho0)) pi_1(r)`: the stationary law of
/// `M_T` (with `delta1 = 0`) whose odd mass is `rho0`.
pub fn parity_weighted_pr<S: Scalar>(ell: u64, rho0: S, r_max: usize) -> Result<RankDist<S>> {
    if rho0 < S::zero() || rho0 > S::one() {
        return Err(Error::InvalidDistribution("rho0 must lie in [0, 1]".into()));
    }
    let even = S::one() - rho0.clone();
    let probs = pr_weights::<S>(ell, r_max)
        .into_iter()
        .enumerate()
        .map(|(r, w)| if r % 2 == 0 { w * even.clone() } else { w * rho0.clone() })
        .collect();
    with_tail(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::parity;

    #[test]
    fn pr_examples() {
        let w: Vec<f64> = pr_weights(5, 40);
        assert!((w[0] - 0.79334).abs() < 5e-5, "{}", w[0]);
        let d = pr_distribution::<f64>(5, 40).unwrap();
        assert!((d.total() - 1.0).abs() < 1e-12);
        assert!((d.prob(1) / d.prob(0) - 1.25).abs() < 1e-12);
        let even: f64 = w.iter().step_by(2).sum();
        let odd: f64 = w.iter().skip(1).step_by(2).sum();
        assert!((even - 1.0).abs() < 1e-12 && (odd - 1.0).abs() < 1e-12);
        let rho = parity(&d);
        assert!(rho > 0.0 && rho < 1.0);
        assert!((rho - 0.5).abs() < 1e-12);
        assert!(pr_distribution::<f64>(5, 3).is_err());
    }

    #[test]
    fn parity_weighted_examples() {
        let d = pr_distribution::<f64>(5, 40).unwrap();
        let back = parity_weighted_pr(5, parity(&d), 40).unwrap();
        assert!(back.tv_distance(&d) < 1e-14);
        let zero = parity_weighted_pr(5, 0.0, 40).unwrap();
        assert!(zero.probs().iter().skip(1).step_by(2).all(|&p| p == 0.0));
        let one = parity_weighted_pr(5, 1.0, 40).unwrap();
        let w: Vec<f64> = pr_weights(5, 40);
        let odd: f64 = w.iter().skip(1).step_by(2).sum();
        for r in (1..40).step_by(2) {
            assert!((one.prob(r) - w[r] / odd).abs() < 1e-14);
        }
        assert!((one.total() - 1.0).abs() < 1e-12);
        assert!(parity_weighted_pr(5, 1.5, 40).is_err());
    }

    #[test]
    fn exact_and_float_agree() {
        use num_rational::BigRational;
        let exact: Vec<BigRational> = pr_weights(7, 10);
        let float: Vec<f64> = pr_weights(7, 10);
        for (a, b) in exact.iter().zip(&float) {
            assert!((a.to_f64_lossy() - b).abs() < 1e-15);
        }
    }
}
