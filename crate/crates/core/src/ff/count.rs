use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use super::factor::is_irreducible;
use super::field::Field;
use super::poly::Poly;
use crate::error::{Error, Result};

/// Default enumeration budget: `q^d <= 2^24` polynomials.
pub const DEFAULT_BUDGET: u128 = 1 << 24;

fn mobius(n: u64) -> i32 {
    let mut n = n;
    let mut sign = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            sign = -sign;
        }
        d += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Number of monic irreducible polynomials of degree `d` over `F_q`:
/// `(1/d) * sum_{k | d} mu(k) q^(d/k)`.
pub fn count_monic_irreducibles(q: u64, d: u32) -> Result<BigUint> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let q = BigUint::from(q);
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for k in 1..=d {
        if d % k != 0 {
            continue;
        }
        let term = num_traits::pow(q.clone(), (d / k) as usize);
        match mobius(k as u64) {
            1 => pos += term,
            -1 => neg += term,
            _ => {}
        }
    }
    Ok((pos - neg) / BigUint::from(d))
}

/// `count_monic_irreducibles` as a `u64`, for budget-sized counts.
pub fn count_monic_irreducibles_u64(q: u64, d: u32) -> Result<u64> {
    count_monic_irreducibles(q, d)?
        .to_u64()
        .ok_or_else(|| Error::Domain("count exceeds u64".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonicFilter {
    All,
    Irreducible,
}

/// Monic polynomials of degree `d` in lexicographic order: the lower
/// coefficients `(c_{d-1}, ..., c_0)` read as a base-`q` counter.
#[derive(Clone, Debug)]
pub struct MonicIter {
    field: Field,
    d: usize,
    next: u128,
    end: u128,
    filter: MonicFilter,
}

impl MonicIter {
    fn build(&self, mut k: u128) -> Poly {
        let q = self.field.q() as u128;
        let mut coeffs = Vec::with_capacity(self.d + 1);
        for _ in 0..self.d {
            coeffs.push((k % q) as u64);
            k /= q;
        }
        coeffs.push(1);
        Poly::from_raw(coeffs)
    }
}

impl Iterator for MonicIter {
    type Item = Poly;

    fn next(&mut self) -> Option<Poly> {
        while self.next < self.end {
            let f = self.build(self.next);
            self.next += 1;
            match self.filter {
                MonicFilter::All => return Some(f),
                MonicFilter::Irreducible => {
                    if is_irreducible(&self.field, &f).expect("degree >= 1") {
                        return Some(f);
                    }
                }
            }
        }
        None
    }
}

/// Enumerates monic degree-`d` polynomials, failing when `q^d > budget`.
pub fn enumerate_monic(field: &Field, d: usize, filter: MonicFilter, budget: u128) -> Result<MonicIter> {
    enumerate_monic_range(field, d, filter, budget, 0, None)
}

/// Like [`enumerate_monic`] restricted to the counter range `[start, end)`,
/// so enumeration can be partitioned across workers.
pub fn enumerate_monic_range(
    field: &Field,
    d: usize,
    filter: MonicFilter,
    budget: u128,
    start: u128,
    end: Option<u128>,
) -> Result<MonicIter> {
    if d == 0 {
        return Err(Error::ZeroDegree);
    }
    let total = monic_count(field.q(), d).filter(|&n| n <= budget).ok_or(Error::BudgetExceeded {
        requested: monic_count(field.q(), d).unwrap_or(u128::MAX),
        budget,
    })?;
    let end = end.map_or(total, |e| e.min(total));
    Ok(MonicIter { field: field.clone(), d, next: start.min(end), end, filter })
}

/// Folds every monic degree-`d` polynomial passing `filter` in parallel.
///
/// The counter range is split into fixed chunks and partial results are
/// merged in chunk order, so the result does not depend on the pool size.
pub fn par_fold_monic<T, I, F, M>(
    field: &Field,
    d: usize,
    filter: MonicFilter,
    budget: u128,
    init: I,
    fold: F,
    merge: M,
) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(T, Poly) -> T + Sync,
    M: Fn(T, T) -> T,
{
    use rayon::prelude::*;
    let total = enumerate_monic(field, d, filter, budget)?.end;
    let chunks = total.min(256);
    let parts: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (start, end) = (total * c / chunks, total * (c + 1) / chunks);
            enumerate_monic_range(field, d, filter, budget, start, Some(end))
                .expect("budget already checked")
                .fold(init(), &fold)
        })
        .collect();
    Ok(parts.into_iter().fold(init(), merge))
}

/// `q^d`, or `None` on overflow.
pub fn monic_count(q: u64, d: usize) -> Option<u128> {
    (q as u128).checked_pow(d as u32)
}

/// Uniform monic polynomial of degree `n`.
pub fn sample_monic<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Poly {
    let q = field.q();
    let mut coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    coeffs.push(1);
    Poly::from_raw(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn count_examples() {
        assert_eq!(count_monic_irreducibles(2, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(count_monic_irreducibles(2, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(count_monic_irreducibles(11, 2).unwrap(), BigUint::from(55u32));
        assert_eq!(count_monic_irreducibles(11, 0), Err(Error::ZeroDegree));
    }

    #[test]
    fn brute_force_quadratics_over_f11() {
        let f = Field::prime(11).unwrap();
        let mut n = 0;
        for c0 in 0..11u64 {
            for c1 in 0..11u64 {
                // irreducible iff no root in F_11
                if (0..11u64).all(|x| (x * x + c1 * x + c0) % 11 != 0) {
                    n += 1;
                    assert!(is_irreducible(&f, &Poly::from_raw(vec![c0, c1, 1])).unwrap());
                }
            }
        }
        assert_eq!(n, 55);
    }

    #[test]
    fn enumeration_examples() {
        let f2 = Field::prime(2).unwrap();
        let all: Vec<Poly> = enumerate_monic(&f2, 1, MonicFilter::All, DEFAULT_BUDGET).unwrap().collect();
        assert_eq!(all, vec![Poly::t(), Poly::from_raw(vec![1, 1])]);
        let irr: Vec<Poly> =
            enumerate_monic(&f2, 2, MonicFilter::Irreducible, DEFAULT_BUDGET).unwrap().collect();
        assert_eq!(irr, vec![Poly::from_raw(vec![1, 1, 1])]);
        let f3 = Field::prime(3).unwrap();
        assert_eq!(enumerate_monic(&f3, 1, MonicFilter::All, DEFAULT_BUDGET).unwrap().count(), 3);
        let n = par_fold_monic(&f3, 5, MonicFilter::Irreducible, DEFAULT_BUDGET, || 0u64, |a, _| a + 1, |a, b| a + b)
            .unwrap();
        assert_eq!(n, 48);
        let f11 = Field::prime(11).unwrap();
        assert!(matches!(
            enumerate_monic(&f11, 8, MonicFilter::All, DEFAULT_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn counts_match_enumeration() {
        for q in [2u64, 3, 5, 11] {
            let f = Field::prime(q).unwrap();
            for d in 1..=4usize {
                let n = enumerate_monic(&f, d, MonicFilter::Irreducible, DEFAULT_BUDGET).unwrap().count();
                assert_eq!(BigUint::from(n), count_monic_irreducibles(q, d as u32).unwrap(), "q={q} d={d}");
            }
        }
    }

    #[test]
    fn necklace_identity() {
        for q in 2..=11u64 {
            for n in 1..=12u32 {
                let total: BigUint = (1..=n)
                    .filter(|d| n % d == 0)
                    .map(|d| count_monic_irreducibles(q, d).unwrap() * BigUint::from(d))
                    .sum();
                assert_eq!(total, num_traits::pow(BigUint::from(q), n as usize));
            }
        }
    }

    #[test]
    fn sampling_shapes_and_balance() {
        let f2 = Field::prime(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 20_000;
        let ones = (0..draws).filter(|_| sample_monic(&f2, 1, &mut rng).coeff(0) == 1).count();
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((ones as f64 - draws as f64 / 2.0).abs() < 3.0 * sigma);

        let f11 = Field::prime(11).unwrap();
        let f = sample_monic(&f11, 30, &mut rng);
        assert_eq!(f.degree(), Some(30));
        assert!(f.is_monic());
    }

    #[test]
    fn chi_square_uniformity() {
        let f3 = Field::prime(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 100_000;
        let mut hist = [0u64; 9];
        for _ in 0..draws {
            let f = sample_monic(&f3, 2, &mut rng);
            hist[(f.coeff(0) + 3 * f.coeff(1)) as usize] += 1;
        }
        let expected = draws as f64 / 9.0;
        let chi2: f64 = hist.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // chi-square with 8 dof: P(X > 26.12) = 0.001
        assert!(chi2 < 26.12, "chi2 = {chi2}");
    }
}
