use serde::{Deserialize, Serialize};

use super::curve::CurveConfig;
use crate::ff::{Place, Poly, ResidueField};

/// Conjugacy class of Frobenius in `S_3`, or ramified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FrobClass {
    Identity,
    Transposition,
    ThreeCycle,
    Ramified,
}

impl FrobClass {
    pub const UNRAMIFIED: [FrobClass; 3] = [FrobClass::Identity, FrobClass::Transposition, FrobClass::ThreeCycle];
    pub const ALL: [FrobClass; 4] =
        [FrobClass::Identity, FrobClass::Transposition, FrobClass::ThreeCycle, FrobClass::Ramified];

    /// Size of the conjugacy class in `S_3`; 0 for `Ramified`.
    pub fn class_size(self) -> u64 {
        match self {
            FrobClass::Identity => 1,
            FrobClass::Transposition => 3,
            FrobClass::ThreeCycle => 2,
            FrobClass::Ramified => 0,
        }
    }

    /// Order of the group element; 0 for `Ramified`.
    pub fn order(self) -> u64 {
        match self {
            FrobClass::Identity => 1,
            FrobClass::Transposition => 2,
            FrobClass::ThreeCycle => 3,
            FrobClass::Ramified => 0,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlaceClass {
    P0,
    P1,
    P2,
    Ramified,
}

impl PlaceClass {
    /// Order rule: trivial Frobenius gives `P2`, order `ell` gives `P1`, any
    /// other nontrivial order gives `P0`.
    pub fn from_frob(class: FrobClass, ell: u64) -> PlaceClass {
        match class.order() {
            0 => PlaceClass::Ramified,
            1 => PlaceClass::P2,
            o if o == ell => PlaceClass::P1,
            _ => PlaceClass::P0,
        }
    }
}

/// Frobenius class at `v` from the number of roots of `F mod v` in the
/// residue field: 3 roots is the identity, 1 a transposition, 0 a 3-cycle.
pub fn classify_place(curve: &CurveConfig, v: &Place) -> (FrobClass, PlaceClass) {
    let frob = frob_class(curve, v);
    (frob, PlaceClass::from_frob(frob, curve.ell()))
}

pub fn frob_class(curve: &CurveConfig, v: &Place) -> FrobClass {
    let field = curve.field();
    if curve.disc().rem(v.poly(), field).expect("nonzero").is_zero() {
        return FrobClass::Ramified;
    }
    match count_roots(curve, v) {
        3 => FrobClass::Identity,
        1 => FrobClass::Transposition,
        0 => FrobClass::ThreeCycle,
        n => unreachable!("separable cubic with {n} roots"),
    }
}

/// Arithmetic in `R[x] / (x^3 + c2 x^2 + c1 x + c0)` for a residue field `R`.
struct CubicAlgebra {
    r: ResidueField,
    c: [Poly; 3],
}

type Elem = [Poly; 3];

impl CubicAlgebra {
    fn reduce_top(&self, mut w: Vec<Poly>) -> Elem {
        let f = self.r.base();
        for k in (3..w.len()).rev() {
            let top = self.r.reduce(&w[k]);
            if top.is_zero() {
                continue;
            }
            for i in 0..3 {
                let t = top.mul(&self.c[i], f);
                w[k - 3 + i] = w[k - 3 + i].sub(&t, f);
            }
        }
        [self.r.reduce(&w[0]), self.r.reduce(&w[1]), self.r.reduce(&w[2])]
    }

    fn square(&self, a: &Elem) -> Elem {
        let f = self.r.base();
        let two = f.from_int(2);
        let mut w = vec![Poly::zero(); 5];
        for i in 0..3 {
            w[2 * i] = w[2 * i].add(&a[i].square(f), f);
            for j in i + 1..3 {
                w[i + j] = w[i + j].add(&a[i].mul(&a[j], f).scale(two, f), f);
            }
        }
        self.reduce_top(w)
    }

    fn times_x(&self, a: &Elem) -> Elem {
        self.reduce_top(vec![Poly::zero(), a[0].clone(), a[1].clone(), a[2].clone()])
    }
}

/// Number of distinct roots of `F mod v` in `R = F_q[t]/(v)`, via
/// `deg gcd(x^Q - x, F mod v)` with `Q = q^deg v`.
///
/// `x^Q` is reached by iterating `X -> X^q`: writing `X = sum c_j x^j`,
/// `X^q = sum sigma(c_j) (x^q)^j` where `sigma` is the `q`-power map on `R`,
/// linear over `F_q` with columns `t^(qk) mod v`.
pub fn count_roots(curve: &CurveConfig, v: &Place) -> usize {
    let r = ResidueField::new(curve.field(), v);
    let f = r.base().clone();
    let d = r.degree();
    let cubic = curve.cubic();
    let c = [r.reduce(cubic.coeff(0)), r.reduce(cubic.coeff(1)), r.reduce(cubic.coeff(2))];
    let alg = CubicAlgebra { r, c };
    let q = f.q();

    let mut x1: Elem = [Poly::one(), Poly::zero(), Poly::zero()];
    for i in (0..64 - q.leading_zeros()).rev() {
        x1 = alg.square(&x1);
        if q >> i & 1 == 1 {
            x1 = alg.times_x(&x1);
        }
    }
    let x2 = alg.square(&x1);

    let tq = alg.r.reduce(&Poly::t().powmod_u64(q, v.poly(), &f).expect("monic"));
    let mut cols = vec![Poly::one()];
    for k in 1..d {
        cols.push(alg.r.mul(&cols[k - 1], &tq));
    }
    let lazy = f.is_prime_field() && (q - 1).pow(2).checked_mul(d as u64 + 1).is_some();
    let sigma = |a: &Poly| {
        let mut out = vec![0u64; d];
        for (k, &ck) in a.coeffs().iter().enumerate() {
            if ck == 0 {
                continue;
            }
            if lazy {
                for (o, &m) in out.iter_mut().zip(cols[k].coeffs()) {
                    *o += ck * m;
                }
            } else {
                for (o, &m) in out.iter_mut().zip(cols[k].coeffs()) {
                    *o = f.add(*o, f.mul(ck, m));
                }
            }
        }
        if lazy {
            out.iter_mut().for_each(|o| *o %= q);
        }
        Poly::from_raw(out)
    };
    let scale = |s: &Poly, e: &Elem| -> Elem { [alg.r.mul(s, &e[0]), alg.r.mul(s, &e[1]), alg.r.mul(s, &e[2])] };

    let mut acc = x1.clone();
    for _ in 1..d {
        let s = [sigma(&acc[0]), sigma(&acc[1]), sigma(&acc[2])];
        let a = scale(&s[1], &x1);
        let b = scale(&s[2], &x2);
        acc = [s[0].add(&a[0], &f).add(&b[0], &f), a[1].add(&b[1], &f), a[2].add(&b[2], &f)];
    }
    acc[1] = acc[1].sub(&Poly::one(), &f);
    let mut big: Vec<Poly> = alg.c.to_vec();
    big.push(Poly::one());
    gcd_degree(&alg.r, big, acc.to_vec())
}

/// Reference root count by square-and-multiply to `x^Q`.
pub fn count_roots_direct(curve: &CurveConfig, v: &Place) -> usize {
    let r = ResidueField::new(curve.field(), v);
    let cubic = curve.cubic();
    let c = [r.reduce(cubic.coeff(0)), r.reduce(cubic.coeff(1)), r.reduce(cubic.coeff(2))];
    let alg = CubicAlgebra { r, c };
    let exp = alg.r.order();
    let mut acc: Elem = [Poly::one(), Poly::zero(), Poly::zero()];
    for i in (0..exp.bits()).rev() {
        acc = alg.square(&acc);
        if exp.bit(i) {
            acc = alg.times_x(&acc);
        }
    }
    let f = alg.r.base();
    acc[1] = acc[1].sub(&Poly::one(), f);
    let mut big: Vec<Poly> = alg.c.to_vec();
    big.push(Poly::one());
    gcd_degree(&alg.r, big, acc.to_vec())
}

fn trim(v: &mut Vec<Poly>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Degree of the gcd of two polynomials over a residue field.
fn gcd_degree(r: &ResidueField, mut a: Vec<Poly>, mut b: Vec<Poly>) -> usize {
    let f = r.base();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = r.inv(b.last().expect("nonempty")).expect("nonzero leading coefficient");
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let c = r.mul(a.last().expect("nonempty"), &inv);
            for (i, bi) in b.iter().enumerate() {
                a[shift + i] = r.reduce(&a[shift + i].sub(&c.mul(bi, f), f));
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{enumerate_monic, Field, MonicFilter, DEFAULT_BUDGET};
    use crate::place::CurveSpec;

    fn example() -> CurveConfig {
        CurveConfig::new(CurveSpec::example()).unwrap()
    }

    #[test]
    fn ramified_examples() {
        let c = example();
        let f = c.field().clone();
        assert_eq!(classify_place(&c, &Place::new(&f, &Poly::t()).unwrap()).0, FrobClass::Ramified);
        let v = Place::new(&f, &Poly::from_ints(&f, &[6, 7])).unwrap();
        assert_eq!(classify_place(&c, &v), (FrobClass::Ramified, PlaceClass::Ramified));
    }

    #[test]
    fn degree_one_places_match_brute_force() {
        let c = example();
        let f = c.field().clone();
        for t0 in 0..11u64 {
            let v = Place::new(&f, &Poly::from_raw(vec![f.neg(t0), 1])).unwrap();
            let [a0, a1, a2, _] = c.cubic().specialize(t0, &f);
            let roots = (0..11u64)
                .filter(|&x| f.add(f.add(f.pow(x, 3), f.mul(a2, f.mul(x, x))), f.add(f.mul(a1, x), a0)) == 0)
                .count();
            let (frob, class) = classify_place(&c, &v);
            if frob == FrobClass::Ramified {
                assert!(c.disc().eval(&f, t0) == 0);
                continue;
            }
            let expected = match roots {
                3 => FrobClass::Identity,
                1 => FrobClass::Transposition,
                _ => FrobClass::ThreeCycle,
            };
            assert_eq!(frob, expected, "t0 = {t0}");
            assert_eq!(class == PlaceClass::P2, frob == FrobClass::Identity);
        }
        // v = t - 1: x^3 + x + 1 has the root x = 2
        let v = Place::new(&f, &Poly::from_ints(&f, &[-1, 1])).unwrap();
        assert_ne!(classify_place(&c, &v).0, FrobClass::ThreeCycle);
    }

    #[test]
    fn quadratic_places_match_factorization() {
        use rand::SeedableRng;
        let c = example();
        let f = c.field().clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for v in enumerate_monic(&f, 2, MonicFilter::Irreducible, DEFAULT_BUDGET).unwrap() {
            let place = Place::new_unchecked(v.clone());
            let frob = frob_class(&c, &place);
            if frob == FrobClass::Ramified {
                continue;
            }
            // the residue field F_121 as a standalone field; map F mod v into it
            let ext = Field::new(crate::ff::FieldSpec::extension(11, 2, Some(v.coeffs().to_vec()))).unwrap();
            let coeff = |p: &Poly| {
                let r = p.rem(&v, &f).unwrap();
                r.coeff(0) + 11 * r.coeff(1)
            };
            let cubic = Poly::from_raw(vec![coeff(c.cubic().coeff(0)), coeff(c.cubic().coeff(1)), coeff(c.cubic().coeff(2)), 1]);
            let degs: Vec<usize> = crate::ff::factor(&ext, &cubic, &mut rng)
                .unwrap()
                .factors
                .iter()
                .map(|(g, _)| g.deg())
                .collect();
            let expected = match degs.len() {
                3 => FrobClass::Identity,
                2 => FrobClass::Transposition,
                _ => FrobClass::ThreeCycle,
            };
            assert_eq!(frob, expected, "v = {v}");
        }
    }

    #[test]
    fn frobenius_iteration_matches_direct_power() {
        let c = example();
        let f = c.field().clone();
        for d in 1..=4 {
            for v in enumerate_monic(&f, d, MonicFilter::Irreducible, DEFAULT_BUDGET).unwrap().take(300) {
                let place = Place::new_unchecked(v);
                if c.disc().rem(place.poly(), &f).unwrap().is_zero() {
                    continue;
                }
                assert_eq!(count_roots(&c, &place), count_roots_direct(&c, &place), "{place}");
            }
        }
    }

    #[test]
    fn p1_is_unreachable_for_s3() {
        for ell in [5, 7, 11, 13] {
            for frob in FrobClass::ALL {
                assert_ne!(PlaceClass::from_frob(frob, ell), PlaceClass::P1);
            }
        }
        assert_eq!(PlaceClass::from_frob(FrobClass::Transposition, 5), PlaceClass::P0);
        assert_eq!(PlaceClass::from_frob(FrobClass::ThreeCycle, 5), PlaceClass::P0);
    }
}
