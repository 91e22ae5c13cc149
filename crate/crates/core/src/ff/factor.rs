use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::field::Field;
use super::poly::Poly;
use crate::error::{Error, Result};

/// `unit * prod(factor^multiplicity)`, factors monic irreducible and distinct,
/// sorted by degree then coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    /// Number of distinct irreducible factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn expand(&self, field: &Field) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit), |acc, (g, m)| acc.mul(&g.pow(*m as u64, field), field))
    }

    /// Product of the distinct irreducible factors.
    pub fn squarefree_kernel(&self, field: &Field) -> Poly {
        self.factors.iter().fold(Poly::one(), |acc, (g, _)| acc.mul(g, field))
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

/// `t^q mod f` iterated: raises `h` to the `q`-th power modulo `f`.
fn frobenius(h: &Poly, f: &Poly, field: &Field) -> Poly {
    h.powmod_u64(field.q(), f, field).expect("monic modulus")
}

/// Deterministic irreducibility test (Ben-Or): no factor of degree `<= n/2`.
pub fn is_irreducible(field: &Field, f: &Poly) -> Result<bool> {
    let n = match f.degree() {
        None => return Err(Error::ZeroPolynomial),
        Some(0) => return Err(Error::ConstantPolynomial),
        Some(n) => n,
    };
    if n == 1 {
        return Ok(true);
    }
    let f = f.monic(field);
    if f.coeff(0) == 0 {
        return Ok(false);
    }
    let t = Poly::t();
    let mut h = t.clone();
    for _ in 1..=n / 2 {
        h = frobenius(&h, &f, field);
        if !h.sub(&t, field).gcd(&f, field).is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Squarefree decomposition of a monic polynomial: `(g, m)` with `g`
/// squarefree, pairwise coprime, `f = prod g^m`.
pub fn squarefree_decomposition(field: &Field, f: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    sqf_rec(field, f, 1, &mut out);
    out
}

fn sqf_rec(field: &Field, f: &Poly, scale: u32, out: &mut Vec<(Poly, u32)>) {
    if f.deg() == 0 {
        return;
    }
    let df = f.derivative(field);
    if df.is_zero() {
        sqf_rec(field, &f.pth_root(field), scale * field.p() as u32, out);
        return;
    }
    // Yun-style loop valid in characteristic p for multiplicities < p.
    let mut c = f.gcd(&df, field);
    let mut w = f.divrem(&c, field).expect("nonzero").0;
    let mut i = 1u32;
    while w.deg() > 0 {
        let y = w.gcd(&c, field);
        let z = w.divrem(&y, field).expect("nonzero").0;
        if z.deg() > 0 {
            out.push((z, i * scale));
        }
        w = y;
        c = c.divrem(&w, field).expect("nonzero").0;
        i += 1;
    }
    if c.deg() > 0 {
        // remaining part is a p-th power
        sqf_rec(field, &c.pth_root(field), scale * field.p() as u32, out);
    }
}

/// Splits a squarefree monic polynomial into `(product of all irreducible
/// factors of degree d, d)`.
pub fn distinct_degree_factorization(field: &Field, f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut g = f.clone();
    let t = Poly::t();
    let mut h = t.clone();
    let mut d = 0usize;
    while g.deg() >= 2 * (d + 1) {
        d += 1;
        h = frobenius(&h, &g, field);
        let c = h.sub(&t, field).gcd(&g, field);
        if c.deg() > 0 {
            g = g.divrem(&c, field).expect("nonzero").0;
            h = h.rem(&g, field).expect("nonzero");
            out.push((c, d));
        }
    }
    if g.deg() > 0 {
        let n = g.deg();
        out.push((g, n));
    }
    out
}

/// Splits a squarefree monic product of irreducibles all of degree `d`.
pub fn equal_degree_factorization<R: Rng + ?Sized>(
    field: &Field,
    f: &Poly,
    d: usize,
    rng: &mut R,
) -> Vec<Poly> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    let q = field.q();
    loop {
        let a = Poly::from_raw((0..n).map(|_| rng.gen_range(0..q)).collect());
        if a.deg() == 0 {
            continue;
        }
        let b = if field.p() == 2 {
            // absolute trace to F_2
            let mut s = a.clone();
            let mut acc = a.clone();
            for _ in 1..(field.e() as usize * d) {
                s = s.mulmod(&s, f, field).expect("monic");
                acc = acc.add(&s, field);
            }
            acc
        } else {
            // a^((q^d - 1)/2) = (a^(1 + q + ... + q^(d-1)))^((q-1)/2)
            let mut s = a.clone();
            let mut norm = a.clone();
            for _ in 1..d {
                s = frobenius(&s, f, field);
                norm = norm.mulmod(&s, f, field).expect("monic");
            }
            norm.powmod_u64((q - 1) / 2, f, field).expect("monic").sub(&Poly::one(), field)
        };
        let g = b.gcd(f, field);
        if g.deg() > 0 && g.deg() < n {
            let h = f.divrem(&g, field).expect("nonzero").0;
            let mut out = equal_degree_factorization(field, &g, d, rng);
            out.extend(equal_degree_factorization(field, &h, d, rng));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles; the result does not
/// depend on `rng`.
pub fn factor<R: Rng + ?Sized>(field: &Field, f: &Poly, rng: &mut R) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = f.leading();
    let monic = f.monic(field);
    let mut acc: BTreeMap<(usize, Poly), u32> = BTreeMap::new();
    for (g, m) in squarefree_decomposition(field, &monic) {
        for (c, d) in distinct_degree_factorization(field, &g) {
            for h in equal_degree_factorization(field, &c, d, rng) {
                *acc.entry((h.deg(), h)).or_insert(0) += m;
            }
        }
    }
    Ok(Factorization { unit, factors: acc.into_iter().map(|((_, h), m)| (h, m)).collect() })
}
