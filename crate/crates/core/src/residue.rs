//! `ell`-th roots of unity in `F_q`, the `ell`-th power residue symbol on
//! `F_q[t]` and its multiplicative extension, and the equidistribution census.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{factor, is_prime, par_fold_monic, Field, FieldSpec, MonicFilter, Place, Poly};
use crate::place::{classify_place, CurveConfig, PlaceClass};

/// The group `mu_ell` of `ell`-th roots of unity in `F_q^*`.
#[derive(Clone, Debug, Serialize)]
pub struct MuEll {
    ell: u64,
    #[serde(skip)]
    field: Field,
    generator: u64,
    elements: Vec<u64>,
    #[serde(skip)]
    dlog: BTreeMap<u64, u32>,
}

/// Exponent of a symbol value with respect to the chosen generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SymbolValue(pub u32);

impl SymbolValue {
    pub fn exponent(self) -> u32 {
        self.0
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

/// Builds `mu_ell` with generator `g0^((q-1)/ell)`, `g0` the smallest
/// primitive root.
pub fn build_mu(spec: &FieldSpec, ell: u64) -> Result<MuEll> {
    MuEll::new(&Field::new(spec.clone())?, ell)
}

impl MuEll {
    pub fn new(field: &Field, ell: u64) -> Result<Self> {
        if ell < 5 || !is_prime(ell) {
            return Err(Error::InvalidEll(ell));
        }
        let q1 = field.q() - 1;
        if q1 % ell != 0 {
            return Err(Error::NoRootsOfUnity { ell, q_minus_one: q1 });
        }
        let generator = field.pow(field.primitive_root(), q1 / ell);
        let mut elements = Vec::with_capacity(ell as usize);
        let mut dlog = BTreeMap::new();
        let mut x = 1;
        for k in 0..ell as u32 {
            elements.push(x);
            dlog.insert(x, k);
            x = field.mul(x, generator);
        }
        debug_assert_eq!(x, 1);
        Ok(MuEll { ell, field: field.clone(), generator, elements, dlog })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// `generator^k` for `k = 0..ell`.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn dlog(&self, x: u64) -> Option<u32> {
        self.dlog.get(&x).copied()
    }
}

/// `(a / pi)_ell`: the dlog of `a^((q^deg pi - 1)/ell) mod pi`.
pub fn symbol(a: &Poly, pi: &Place, mu: &MuEll) -> Result<SymbolValue> {
    let field = mu.field();
    let r = a.rem(pi.poly(), field)?;
    if r.is_zero() {
        return Err(Error::NotCoprime);
    }
    let exp = (pi.norm(field.q()) - 1u32) / BigUint::from(mu.ell());
    let w = r.powmod(&exp, pi.poly(), field)?;
    let k = (w.deg() == 0).then(|| mu.dlog(w.coeff(0))).flatten();
    k.map(SymbolValue).ok_or_else(|| Error::Domain(format!("{w} is not an ell-th root of unity")))
}

/// `prod (a / pi)^m` over the factorization `g = u prod pi^m`.
pub fn jacobi_symbol<R: Rng + ?Sized>(a: &Poly, g: &Poly, mu: &MuEll, rng: &mut R) -> Result<SymbolValue> {
    let field = mu.field();
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !a.gcd(g, field).is_one() {
        return Err(Error::NotCoprime);
    }
    let mut total = 0u64;
    for (pi, m) in factor(field, g, rng)?.factors {
        let s = symbol(a, &Place::new_unchecked(pi), mu)?;
        total += s.0 as u64 * m as u64;
    }
    Ok(SymbolValue((total % mu.ell()) as u32))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusCell {
    /// One exponent per modulus `h_j`.
    pub exponents: Vec<u32>,
    pub count: u64,
    /// `count / total - ell^(-omega)`.
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistributionCensus {
    pub ell: u64,
    pub degree: usize,
    pub moduli: Vec<Place>,
    pub class_filter: Option<PlaceClass>,
    pub total: u64,
    /// Places of the requested degree equal to one of the moduli.
    pub skipped: u64,
    pub cells: Vec<CensusCell>,
    /// `max |count - total/ell^omega| / (total/ell^omega)`.
    pub max_relative_deviation: f64,
}

/// Joint symbol vectors `((v/h_1), ..., (v/h_omega))` over all places `v` of
/// degree `degree`, optionally restricted to one place class.
pub fn equidistribution_census(
    h: &[Place],
    degree: usize,
    class_filter: Option<(&CurveConfig, PlaceClass)>,
    mu: &MuEll,
    budget: u128,
) -> Result<EquidistributionCensus> {
    if h.iter().enumerate().any(|(i, a)| h[..i].contains(a)) {
        return Err(Error::Domain("moduli must be distinct".into()));
    }
    let ell = mu.ell();
    let omega = h.len() as u32;
    let cells_n = ell.pow(omega) as usize;
    let field = mu.field();
    let (counts, skipped) = par_fold_monic(
        field,
        degree,
        MonicFilter::Irreducible,
        budget,
        || (vec![0u64; cells_n], 0u64),
        |(mut counts, mut skipped), v| {
            if h.iter().any(|p| p.poly() == &v) {
                skipped += 1;
                return (counts, skipped);
            }
            let place = Place::new_unchecked(v);
            if let Some((curve, class)) = class_filter {
                if classify_place(curve, &place).1 != class {
                    return (counts, skipped);
                }
            }
            let mut idx = 0usize;
            for p in h.iter().rev() {
                let s = symbol(place.poly(), p, mu).expect("distinct places are coprime");
                idx = idx * ell as usize + s.0 as usize;
            }
            counts[idx] += 1;
            (counts, skipped)
        },
        |(mut a, sa), (b, sb)| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            (a, sa + sb)
        },
    )?;
    let total: u64 = counts.iter().sum();
    let uniform = 1.0 / cells_n as f64;
    let expected = total as f64 * uniform;
    let mut max_rel: f64 = 0.0;
    let cells = counts
        .iter()
        .enumerate()
        .map(|(idx, &count)| {
            let mut k = idx;
            let exponents = (0..omega)
                .map(|_| {
                    let e = (k % ell as usize) as u32;
                    k /= ell as usize;
                    e
                })
                .collect();
            if expected > 0.0 {
                max_rel = max_rel.max((count as f64 - expected).abs() / expected);
            }
            let share = if total > 0 { count as f64 / total as f64 } else { 0.0 };
            CensusCell { exponents, count, deviation: share - uniform }
        })
        .collect();
    Ok(EquidistributionCensus {
        ell,
        degree,
        moduli: h.to_vec(),
        class_filter: class_filter.map(|(_, c)| c),
        total,
        skipped,
        cells,
        max_relative_deviation: max_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{sample_monic, DEFAULT_BUDGET};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup() -> (Field, MuEll) {
        let f = Field::prime(11).unwrap();
        let mu = MuEll::new(&f, 5).unwrap();
        (f, mu)
    }

    #[test]
    fn mu_examples() {
        let (_, mu) = setup();
        assert_eq!(mu.generator(), 4);
        assert_eq!(mu.elements(), &[1, 4, 5, 9, 3]);
        let mut sorted = mu.elements().to_vec();
        sorted.sort();
        assert_eq!(sorted, vec![1, 3, 4, 5, 9]);
        let mu31 = build_mu(&FieldSpec::prime(31), 5).unwrap();
        let g = mu31.generator();
        assert_eq!(mu31.field().pow(g, 5), 1);
        assert_ne!(g, 1);
        assert!(matches!(build_mu(&FieldSpec::prime(11), 7), Err(Error::NoRootsOfUnity { .. })));
        assert!(matches!(build_mu(&FieldSpec::prime(11), 3), Err(Error::InvalidEll(3))));
    }

    #[test]
    fn symbol_examples() {
        let (f, mu) = setup();
        let t = Place::new(&f, &Poly::t()).unwrap();
        assert_eq!(symbol(&Poly::from_ints(&f, &[1, 1]), &t, &mu).unwrap(), SymbolValue(0));
        // residue 2, 2^2 = 4 = generator
        assert_eq!(symbol(&Poly::from_ints(&f, &[2, 1]), &t, &mu).unwrap(), SymbolValue(mu.dlog(4).unwrap()));
        assert_eq!(symbol(&Poly::t(), &t, &mu), Err(Error::NotCoprime));
        let u = Poly::from_ints(&f, &[7, 0, 1]);
        let a = Poly::from_ints(&f, &[3, 1]).pow(5, &f).mul(&u, &f);
        assert_eq!(symbol(&a, &t, &mu).unwrap(), symbol(&u, &t, &mu).unwrap());
    }

    #[test]
    fn jacobi_is_multiplicative_over_factors() {
        let (f, mu) = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 200 {
            let a = sample_monic(&f, rng.gen_range(0..4), &mut rng);
            let g = sample_monic(&f, rng.gen_range(1..4), &mut rng);
            if !a.gcd(&g, &f).is_one() {
                continue;
            }
            let j = jacobi_symbol(&a, &g, &mu, &mut rng).unwrap();
            // oracle: factor by trial division over all monic irreducibles of degree <= 3
            let mut rest = g.clone();
            let mut total = 0;
            for d in 1..=3 {
                for p in crate::ff::enumerate_monic(&f, d, MonicFilter::Irreducible, DEFAULT_BUDGET).unwrap() {
                    while rest.deg() > 0 && rest.rem(&p, &f).unwrap().is_zero() {
                        rest = rest.divrem(&p, &f).unwrap().0;
                        total += symbol(&a, &Place::new_unchecked(p.clone()), &mu).unwrap().0;
                    }
                }
            }
            assert_eq!(j.0, total % 5);
            checked += 1;
        }
        let pi = Poly::from_ints(&f, &[1, 0, 1]);
        let a = Poly::from_ints(&f, &[2, 3]);
        assert_eq!(
            jacobi_symbol(&a, &pi, &mu, &mut rng).unwrap(),
            symbol(&a, &Place::new(&f, &pi).unwrap(), &mu).unwrap()
        );
        assert_eq!(jacobi_symbol(&Poly::t(), &Poly::t(), &mu, &mut rng), Err(Error::NotCoprime));
    }

    #[test]
    fn census_examples() {
        let (f, mu) = setup();
        let empty = equidistribution_census(&[], 2, None, &mu, DEFAULT_BUDGET).unwrap();
        assert_eq!(empty.cells.len(), 1);
        assert_eq!(empty.cells[0].count, 55);
        let t = Place::new(&f, &Poly::t()).unwrap();
        let one = equidistribution_census(std::slice::from_ref(&t), 2, None, &mu, DEFAULT_BUDGET).unwrap();
        assert_eq!(one.cells.len(), 5);
        assert_eq!(one.total, 55);
        let t1 = Place::new(&f, &Poly::from_ints(&f, &[1, 1])).unwrap();
        let two = equidistribution_census(&[t, t1], 3, None, &mu, DEFAULT_BUDGET).unwrap();
        assert_eq!(two.cells.len(), 25);
        assert_eq!(two.total, 440);
        assert!(two.max_relative_deviation.is_finite());
    }
}
