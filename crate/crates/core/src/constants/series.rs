use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::is_prime;
use crate::markov::{normalization, pr_ratios};
use crate::scalar::Scalar;

/// Relative size of the first omitted series term.
pub const SERIES_CUTOFF: f64 = 1e-15;
const MAX_TERMS: usize = 100_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExponentMode {
    /// `X = p^m`, the value behind every tabulated entry.
    #[default]
    Tabulated,
    /// `X = p^((ell - 1) m)`, as the defining formula is written.
    Displayed,
}

impl ExponentMode {
    /// `log X`.
    fn log_x(self, ell: u64, p: u64, m: u32) -> f64 {
        let e = match self {
            ExponentMode::Tabulated => m as f64,
            ExponentMode::Displayed => ((ell - 1) * m as u64) as f64,
        };
        e * (p as f64).ln()
    }

    fn x_exact(self, ell: u64, p: u64, m: u32) -> BigUint {
        let e = match self {
            ExponentMode::Tabulated => m,
            ExponentMode::Displayed => (ell as u32 - 1) * m,
        };
        BigUint::from(p).pow(e)
    }
}

/// Validated `(ell, p)` with `ell >= 5` prime and `p` prime outside `{2, 3, ell}`.
pub fn check_ell_p(ell: u64, p: u64) -> Result<()> {
    check_ell(ell)?;
    if !is_prime(p) || p == 2 || p == 3 || p == ell {
        return Err(Error::InvalidPrime(p, format!("must be a prime outside {{2, 3, {ell}}}")));
    }
    Ok(())
}

pub fn check_ell(ell: u64) -> Result<()> {
    if ell < 5 || !is_prime(ell) {
        return Err(Error::InvalidEll(ell));
    }
    Ok(())
}

/// `S(ell, p) = 3^(ell-1) p^(3 ell - 3) (8 ell - 10) (ell - 1)!`.
pub fn s_constant(ell: u64, p: u64) -> Result<BigUint> {
    check_ell_p(ell, p)?;
    let fact: BigUint = (1..ell).map(BigUint::from).product();
    Ok(BigUint::from(3u32).pow(ell as u32 - 1)
        * BigUint::from(p).pow(3 * ell as u32 - 3)
        * BigUint::from(8 * ell - 10)
        * fact)
}

/// `p^((ell-1) r) S(ell, p)`.
pub fn point_bound(r: u32, ell: u64, p: u64) -> Result<BigUint> {
    Ok(BigUint::from(p).pow((ell as u32 - 1) * r) * s_constant(ell, p)?)
}

/// Partial sums of `prod_{j<=k} ell X / (ell^j - 1)` over even and odd `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParitySums<S> {
    pub even: S,
    pub odd: S,
    /// Terms summed, `k = 0..terms`.
    pub terms: usize,
}

/// Even and odd sums of `prod_{j<=k} ell/(ell^j - 1)` for `k <= k_max`.
pub fn bounded_sums<S: Scalar>(ell: u64, k_max: usize) -> ParitySums<S> {
    let mut sums = ParitySums { even: S::zero(), odd: S::zero(), terms: k_max + 1 };
    for (k, w) in pr_ratios::<S>(ell, k_max).into_iter().enumerate() {
        if k % 2 == 0 {
            sums.even = sums.even + w;
        } else {
            sums.odd = sums.odd + w;
        }
    }
    sums
}

/// `P(ell, m) = N min(even, odd)` over `k <= m`.
pub fn p_constant<S: Scalar>(ell: u64, m: u32) -> Result<S> {
    check_ell(ell)?;
    if m < 1 {
        return Err(Error::Config("m must be positive".into()));
    }
    let s = bounded_sums::<S>(ell, m as usize);
    let min = if s.even < s.odd { s.even } else { s.odd };
    Ok(normalization::<S>(ell) * min)
}

/// `N ((1 - rho) even + rho odd)` over `k <= m`; `P` is the minimum over `rho`.
pub fn p_rho<S: Scalar>(ell: u64, m: u32, rho: S) -> Result<S> {
    check_ell(ell)?;
    check_rho(&rho)?;
    let s = bounded_sums::<S>(ell, m as usize);
    Ok(normalization::<S>(ell) * ((S::one() - rho.clone()) * s.even + rho * s.odd))
}

fn check_rho<S: Scalar>(rho: &S) -> Result<()> {
    if *rho < S::zero() || *rho > S::one() {
        return Err(Error::Config("rho must lie in [0, 1]".into()));
    }
    Ok(())
}

/// Logs of the series terms `prod_{j<=k} ell X/(ell^j - 1)`, stopping once
/// terms shrink by at least half per step and fall below
/// [`SERIES_CUTOFF`] times the largest term.
fn log_terms(ell: u64, log_x: f64) -> Result<Vec<f64>> {
    let ll = (ell as f64).ln();
    let mut logs = vec![0.0];
    let mut acc = 0.0f64;
    let mut peak = 0.0f64;
    for j in 1..MAX_TERMS {
        let log_den = j as f64 * ll + (-(ell as f64).powi(-(j.min(1000) as i32))).ln_1p();
        let step = ll + log_x - log_den;
        acc += step;
        logs.push(acc);
        peak = peak.max(acc);
        if step < -std::f64::consts::LN_2 && acc < peak + SERIES_CUTOFF.ln() - 1.0 {
            return Ok(logs);
        }
    }
    Err(Error::Domain("series did not converge".into()))
}

fn log_sum_exp(logs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = logs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + logs.map(|l| (l - max).exp()).sum::<f64>().ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EValue {
    pub ell: u64,
    pub p: u64,
    pub m: u32,
    pub mode: ExponentMode,
    /// `None` when the value exceeds the `f64` range.
    pub value: Option<f64>,
    pub log10: f64,
    pub even_dominates: bool,
    pub terms: usize,
}

/// `E(ell, p, m) = N max(even, odd)` for the full series in `X`, summed in
/// the log domain.
pub fn e_constant(ell: u64, p: u64, m: u32, mode: ExponentMode) -> Result<EValue> {
    e_rho_inner(ell, p, m, mode, None)
}

/// `N ((1 - rho) even + rho odd)`; `E` is the maximum over `rho`.
pub fn e_rho(ell: u64, p: u64, m: u32, mode: ExponentMode, rho: f64) -> Result<EValue> {
    check_rho(&rho)?;
    e_rho_inner(ell, p, m, mode, Some(rho))
}

fn e_rho_inner(ell: u64, p: u64, m: u32, mode: ExponentMode, rho: Option<f64>) -> Result<EValue> {
    check_ell_p(ell, p)?;
    if m < 1 {
        return Err(Error::Config("m must be positive".into()));
    }
    let logs = log_terms(ell, mode.log_x(ell, p, m))?;
    let even = log_sum_exp(logs.iter().copied().step_by(2));
    let odd = log_sum_exp(logs.iter().copied().skip(1).step_by(2));
    let chosen = match rho {
        None => even.max(odd),
        Some(r) => log_sum_exp([(1.0 - r).ln() + even, r.ln() + odd].into_iter()),
    };
    let ln = normalization::<f64>(ell).ln() + chosen;
    let value = ln.exp();
    Ok(EValue {
        ell,
        p,
        m,
        mode,
        value: value.is_finite().then_some(value),
        log10: ln / std::f64::consts::LN_10,
        even_dominates: even >= odd,
        terms: logs.len(),
    })
}

/// Rigorous rational enclosure of `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct EEnclosure {
    pub lower: BigRational,
    pub upper: BigRational,
    pub terms: usize,
}

impl EEnclosure {
    /// Endpoints rounded outward to `f64`.
    pub fn to_f64(&self) -> (f64, f64) {
        (round_down(&self.lower), round_up(&self.upper))
    }
}

pub fn round_down(x: &BigRational) -> f64 {
    x.to_f64().map_or(f64::NAN, f64::next_down)
}

pub fn round_up(x: &BigRational) -> f64 {
    x.to_f64().map_or(f64::NAN, f64::next_up)
}

/// Bounds on `N = prod_{j>=1} (1 + ell^(-j))^(-1)`: the partial product
/// over `j <= J` overestimates `N`, and the omitted factors are at most
/// `1 + 2 ell^(-J) / (ell - 1)`.
pub fn normalization_bounds(ell: u64, j_max: u32) -> (BigRational, BigRational) {
    let upper = BigRational::one() / crate::markov::partial_product::<BigRational>(ell, j_max);
    let slack = BigRational::from_ratio(2, 1) * BigRational::recip_pow(ell, j_max) / BigRational::from_integer((ell - 1).into());
    let lower = upper.clone() / (BigRational::one() + slack);
    (lower, upper)
}

/// Exact partial sums with a geometric bound on the remainder, giving a
/// rigorous enclosure of `E` for moderate `X`.
pub fn e_enclosure(ell: u64, p: u64, m: u32, mode: ExponentMode) -> Result<EEnclosure> {
    check_ell_p(ell, p)?;
    let x = BigRational::from_integer(BigInt::from(mode.x_exact(ell, p, m)));
    let l = BigRational::from_integer(BigInt::from(ell));
    let half = BigRational::new(1.into(), 2.into());
    // stop once the remainder is below 1e-20 of the sum
    let scale = BigRational::from_integer(BigInt::from(10u32).pow(20));
    let mut sums = [BigRational::zero(), BigRational::zero()];
    let mut term = BigRational::one();
    let mut lpow = BigRational::one();
    let mut k = 0usize;
    loop {
        sums[k % 2] += &term;
        lpow *= &l;
        let ratio = &l * &x / (&lpow - BigRational::one());
        let next = &term * &ratio;
        k += 1;
        // later ratios are smaller, so the remainder is below 2 * next
        if ratio <= half && &next * &scale <= sums[0].clone().max(sums[1].clone()) {
            let rem = BigRational::from_integer(2.into()) * &next;
            let (n_lo, n_hi) = normalization_bounds(ell, crate::markov::product_cutoff(ell));
            let lo = sums[0].clone().max(sums[1].clone());
            let hi = (&sums[0] + &rem).max(&sums[1] + &rem);
            return Ok(EEnclosure { lower: n_lo * lo, upper: n_hi * hi, terms: k });
        }
        if k > MAX_TERMS {
            return Err(Error::Domain("series did not converge".into()));
        }
        term = next;
    }
}

/// Natural logarithm of a positive big integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}
