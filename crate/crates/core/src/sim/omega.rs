use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ff::count_monic_irreducibles;

/// Largest degree accepted by [`omega_distribution`].
pub const OMEGA_MAX_DEGREE: usize = 64;

fn binomials(n: usize) -> Vec<Vec<BigUint>> {
    let mut c = vec![vec![BigUint::zero(); n + 1]; n + 1];
    for i in 0..=n {
        c[i][0] = BigUint::one();
        for j in 1..=i {
            c[i][j] = &c[i - 1][j - 1] + &c[i - 1][j];
        }
    }
    c
}

fn big_binomial(n: &BigUint, k: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        if *n < BigUint::from(i + 1) {
            return BigUint::zero();
        }
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// Number of monic degree-`n` polynomials over `F_q` with exactly `w`
/// distinct irreducible factors, indexed by `w = 0..=n`.
///
/// Expands `prod_d (1 + u x^d / (1 - x^d))^{N(d)}`: choosing `k` distinct
/// irreducibles of degree `d` with total multiplicity `j >= k` contributes
/// `C(N(d), k) C(j - 1, k - 1) u^k x^(dj)`.
pub fn omega_distribution(q: u64, n: usize) -> Result<Vec<BigUint>> {
    if n > OMEGA_MAX_DEGREE {
        return Err(Error::Domain(format!("n = {n} exceeds {OMEGA_MAX_DEGREE}")));
    }
    let c = binomials(n);
    // table[deg][w]
    let mut table = vec![vec![BigUint::zero(); n + 1]; n + 1];
    table[0][0] = BigUint::one();
    for d in 1..=n {
        let nd = count_monic_irreducibles(q, d as u32)?;
        let mut next = table.clone();
        for k in 1..=n / d {
            let choose = big_binomial(&nd, k);
            if choose.is_zero() {
                break;
            }
            for j in k..=n / d {
                let coeff = &choose * &c[j - 1][k - 1];
                for deg in 0..=n - d * j {
                    for w in 0..=n - k {
                        if !table[deg][w].is_zero() {
                            next[deg + d * j][w + k] += &table[deg][w] * &coeff;
                        }
                    }
                }
            }
        }
        table = next;
    }
    Ok(table.swap_remove(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{factor, monic_count, Field, MonicFilter, DEFAULT_BUDGET};
    use rand::SeedableRng;

    #[test]
    fn quadratics_over_f2() {
        let d = omega_distribution(2, 2).unwrap();
        assert_eq!(d, vec![BigUint::zero(), BigUint::from(3u32), BigUint::one()]);
    }

    #[test]
    fn sums_to_q_pow_n() {
        for q in [2u64, 3, 11] {
            for n in 1..=12 {
                let total: BigUint = omega_distribution(q, n).unwrap().into_iter().sum();
                assert_eq!(total, num_traits::pow(BigUint::from(q), n));
            }
        }
        assert!(omega_distribution(2, 65).is_err());
    }

    #[test]
    fn matches_enumeration() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for q in [2u64, 3] {
            let f = Field::prime(q).unwrap();
            for n in 1..=6 {
                let mut hist = vec![BigUint::zero(); n + 1];
                for g in crate::ff::enumerate_monic(&f, n, MonicFilter::All, DEFAULT_BUDGET).unwrap() {
                    hist[factor(&f, &g, &mut rng).unwrap().omega()] += 1u32;
                }
                assert_eq!(hist, omega_distribution(q, n).unwrap(), "q={q} n={n}");
                assert!(monic_count(q, n).is_some());
            }
        }
    }
}
