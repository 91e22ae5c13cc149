use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::series::{check_ell_p, ln_biguint, normalization_bounds, point_bound, round_down, round_up};
use crate::error::{Error, Result};
use crate::markov::{pr_ratios, product_cutoff};
use crate::scalar::ratio_string;

/// Threshold for the share of polynomials in the 99% claim.
pub const SHARE_THRESHOLD: (i64, i64) = (99, 100);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimMapping {
    /// Tail claim `k` compares `p^((k+2)(ell-1)) S` with the threshold and
    /// bounds the mass of ranks above `k + 2`.
    #[default]
    Literal,
    /// Tail claim `k` uses rank `k`, matching the pairing of claim (a),
    /// where rank 2 meets the threshold `(3p)^(5 ell) ell!`.
    Consistent,
}

impl ClaimMapping {
    fn rank(self, k: u32) -> u32 {
        match self {
            ClaimMapping::Literal => k + 2,
            ClaimMapping::Consistent => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub inputs: String,
    /// Exact integer, or a decimal rounded toward failure.
    pub left: String,
    pub right: String,
    pub relation: String,
    pub left_log10: f64,
    pub right_log10: f64,
    pub rounding: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub ell: u64,
    pub p: u64,
    pub k_max: u32,
    pub mapping: ClaimMapping,
    pub claims: Vec<Claim>,
    pub pass: bool,
}

impl ClaimReport {
    pub fn failures(&self) -> impl Iterator<Item = &Claim> {
        self.claims.iter().filter(|c| !c.pass)
    }
}

/// `(3p)^e ell!`.
pub fn threshold(ell: u64, p: u64, e: u32) -> BigUint {
    let fact: BigUint = (1..=ell).map(BigUint::from).product();
    BigUint::from(3 * p).pow(e) * fact
}

fn ln10() -> f64 {
    std::f64::consts::LN_10
}

fn rational_log10(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let n = x.numer().to_biguint().expect("nonnegative");
    let d = x.denom().to_biguint().expect("positive");
    (ln_biguint(&n) - ln_biguint(&d)) / ln10()
}

fn integer_claim(id: String, inputs: String, left: BigUint, right: BigUint) -> Claim {
    Claim {
        id,
        inputs,
        left_log10: ln_biguint(&left) / ln10(),
        right_log10: ln_biguint(&right) / ln10(),
        pass: left <= right,
        left: left.to_string(),
        right: right.to_string(),
        relation: "<=".into(),
        rounding: "exact integers".into(),
    }
}

/// Rigorous upper bound on the largest mass that a parity-weighted
/// stationary law puts on ranks above `k`, over both parities.
///
/// Sums `N prod_{j<=r} ell/(ell^j - 1)` exactly over one parity class with
/// `N` overestimated; the remainder after the last term is at most twice
/// that term because consecutive ratios are below 1/2.
pub fn worst_case_tail_upper(ell: u64, k: u32) -> BigRational {
    const EXTRA: usize = 24;
    let k = k as usize;
    let w = pr_ratios::<BigRational>(ell, k + EXTRA + 2);
    let (_, n_hi) = normalization_bounds(ell, product_cutoff(ell));
    let two = BigRational::from_integer(2.into());
    (0..2)
        .map(|parity| {
            let mut s = BigRational::zero();
            for r in (k + 1..=k + EXTRA).filter(|r| r % 2 == parity) {
                s += &w[r];
            }
            let last = (k + EXTRA + 1..=k + EXTRA + 2).find(|r| r % 2 == parity).expect("one of two");
            (s + &two * &w[last]) * &n_hi
        })
        .max()
        .expect("two classes")
}

/// Rigorous lower bound on `P(ell, m)`.
pub fn p_lower(ell: u64, m: u32) -> BigRational {
    let s = super::series::bounded_sums::<BigRational>(ell, m as usize);
    let (n_lo, _) = normalization_bounds(ell, product_cutoff(ell));
    n_lo * s.even.min(s.odd)
}

/// Checks (a) the point threshold of the 99% claim, (b) `P(ell, 2) > 0.99`
/// and (c) for `k = 1..=k_max` the point threshold and tail bound
/// `2 ell^(-k(k+1)/2)`. Every comparison is exact or rounded toward failure.
pub fn verify_claims(ell: u64, p: u64, k_max: u32, mapping: ClaimMapping) -> Result<ClaimReport> {
    check_ell_p(ell, p)?;
    if k_max < 1 {
        return Err(Error::Config("k_max must be positive".into()));
    }
    let mut claims = Vec::new();
    let l = ell as u32;
    claims.push(integer_claim(
        "a".into(),
        format!("p^(2(l-1)) S(l,p) vs (3p)^(5l) l!, l={ell}, p={p}"),
        point_bound(2, ell, p)?,
        threshold(ell, p, 5 * l),
    ));

    let p2 = p_lower(ell, 2);
    let share = BigRational::new(SHARE_THRESHOLD.0.into(), SHARE_THRESHOLD.1.into());
    claims.push(Claim {
        id: "b".into(),
        inputs: format!("P(l,2) vs 99/100, l={ell}"),
        left: format!("{:.17}", round_down(&p2)),
        right: ratio_string(&share),
        relation: ">".into(),
        left_log10: rational_log10(&p2),
        right_log10: rational_log10(&share),
        rounding: "P rounded down".into(),
        pass: p2 > share,
    });

    for k in 1..=k_max {
        let r = mapping.rank(k);
        claims.push(integer_claim(
            format!("c.point[k={k}]"),
            format!("p^({r}(l-1)) S(l,p) vs (3p)^({}l) l!, l={ell}, p={p}", 3 + k),
            point_bound(r, ell, p)?,
            threshold(ell, p, (3 + k) * l),
        ));
        let tail = worst_case_tail_upper(ell, r);
        let e = k * (k + 1) / 2;
        let bound = BigRational::from_integer(2.into()) / BigRational::from_integer(BigInt::from(ell).pow(e));
        claims.push(Claim {
            id: format!("c.tail[k={k}]"),
            inputs: format!("mass of ranks > {r}, worst parity, vs 2 l^(-{e}), l={ell}"),
            left: format!("{:e}", round_up(&tail)),
            right: format!("{:e}", bound.to_f64().unwrap_or(0.0)),
            relation: "<".into(),
            left_log10: rational_log10(&tail),
            right_log10: rational_log10(&bound),
            rounding: "tail rounded up".into(),
            pass: tail < bound,
        });
    }
    let pass = claims.iter().all(|c| c.pass);
    Ok(ClaimReport { ell, p, k_max, mapping, claims, pass })
}

/// Claim reports for every `(ell, p)` pair of the reference grid.
pub fn verify_all_claims(k_max: u32, mapping: ClaimMapping) -> Result<Vec<ClaimReport>> {
    let mut out = Vec::new();
    for ell in super::table::TABLE_ELLS {
        for p in super::table::TABLE_PRIMES {
            if p != ell {
                out.push(verify_claims(ell, p, k_max, mapping)?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell5_p7_passes() {
        let r = verify_claims(5, 7, 6, ClaimMapping::Literal).unwrap();
        assert!(r.pass, "{:?}", r.failures().collect::<Vec<_>>());
        assert_eq!(r.claims.len(), 2 + 2 * 6);
        let b = &r.claims[1];
        assert!(b.left.starts_with("0.99166933757264"), "{}", b.left);
    }

    #[test]
    fn tail_bounds_match_exact_sums() {
        // exact rational sums with 40 factors in N
        let want = [0.206_664_529_941_882_09, 0.008_330_662_427_352_599, 6.675_128_091_386_967e-5];
        for (k, w) in (1..=3).zip(want) {
            let t = worst_case_tail_upper(5, k).to_f64().unwrap();
            assert!(t >= w && (t - w) / w < 1e-12, "{k} {t}");
        }
        let t = worst_case_tail_upper(5, 1).to_f64().unwrap();
        assert!(t < 0.4);
    }

    #[test]
    fn literal_point_threshold_fails_for_large_primes() {
        let failing = [(7, 17), (11, 13), (11, 17), (13, 11), (13, 17), (17, 11), (17, 13)];
        for r in verify_all_claims(6, ClaimMapping::Literal).unwrap() {
            let bad: Vec<&str> = r.failures().map(|c| c.id.as_str()).collect();
            if failing.contains(&(r.ell, r.p)) {
                assert_eq!(bad, ["c.point[k=1]"], "{} {}", r.ell, r.p);
            } else {
                assert!(bad.is_empty(), "{} {} {bad:?}", r.ell, r.p);
            }
        }
        for r in verify_all_claims(6, ClaimMapping::Consistent).unwrap() {
            assert!(r.pass, "{} {}", r.ell, r.p);
        }
    }

    #[test]
    fn p_lower_is_below_value() {
        for ell in [5, 7, 11, 13, 17] {
            let lo = p_lower(ell, 2).to_f64().unwrap();
            let v = super::super::series::p_constant::<f64>(ell, 2).unwrap();
            assert!((v - lo).abs() < 1e-14);
        }
    }
}
