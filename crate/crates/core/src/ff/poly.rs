use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::field::Field;
use crate::error::{Error, Result};

/// A polynomial in `F_q[t]`, coefficients low to high, no trailing zeros.
///
/// The field is not stored; every operation takes it explicitly. Serialises
/// as a plain coefficient list, e.g. `[1,0,1]` for `t^2 + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<u64>,
}

const LAZY_LIMIT: u64 = 1 << 63;

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![1] }
    }

    pub fn constant(c: u64) -> Self {
        Self::from_raw(vec![c])
    }

    /// The monomial `t`.
    pub fn t() -> Self {
        Poly { coeffs: vec![0, 1] }
    }

    pub fn monomial(c: u64, k: usize) -> Self {
        let mut v = vec![0; k + 1];
        v[k] = c;
        Self::from_raw(v)
    }

    /// Builds a polynomial reducing each coefficient into `[0, q)`.
    pub fn from_coeffs(field: &Field, coeffs: Vec<u64>) -> Self {
        let q = field.q();
        Self::from_raw(coeffs.into_iter().map(|c| c % q).collect())
    }

    /// Builds from signed integers reduced mod `p` (prime fields and the prime
    /// subfield of extensions).
    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Self {
        Self::from_raw(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    /// Coefficients must already be canonical.
    pub fn from_raw(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0`; convenient where zero is excluded upstream.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn eval(&self, field: &Field, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn add(&self, other: &Poly, field: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_raw((0..n).map(|i| field.add(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Poly, field: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_raw((0..n).map(|i| field.sub(self.coeff(i), other.coeff(i))).collect())
    }

    pub fn neg(&self, field: &Field) -> Poly {
        Poly::from_raw(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn scale(&self, c: u64, field: &Field) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly::from_raw(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, field: &Field) -> Poly {
        Poly::from_raw(mul_slices(&self.coeffs, &other.coeffs, field))
    }

    pub fn square(&self, field: &Field) -> Poly {
        self.mul(self, field)
    }

    pub fn pow(&self, mut exp: u64, field: &Field) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.square(field);
            }
        }
        acc
    }

    /// Quotient and remainder.
    pub fn divrem(&self, divisor: &Poly, field: &Field) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        if self.coeffs.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv_lead = field.inv(divisor.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = field.mul(rem[i], inv_lead);
            quot[i - dd] = c;
            if c != 0 {
                for (j, &m) in divisor.coeffs.iter().enumerate() {
                    rem[i - dd + j] = field.sub(rem[i - dd + j], field.mul(c, m));
                }
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_raw(quot), Poly::from_raw(rem)))
    }

    pub fn rem(&self, modulus: &Poly, field: &Field) -> Result<Poly> {
        if modulus.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if modulus.is_monic() {
            let mut v = self.coeffs.clone();
            reduce_monic_in_place(&mut v, &modulus.coeffs, field);
            return Ok(Poly::from_raw(v));
        }
        Ok(self.divrem(modulus, field)?.1)
    }

    pub fn monic(&self, field: &Field) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        let inv = field.inv(self.leading()).expect("nonzero leading coefficient");
        self.scale(inv, field)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly, field: &Field) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let m = b.monic(field);
            let r = a.rem(&m, field).expect("nonzero divisor");
            a = m;
            b = r;
        }
        a.monic(field)
    }

    pub fn derivative(&self, field: &Field) -> Poly {
        Poly::from_raw(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| field.mul(c, field.from_int((i as u64 % field.p()) as i64)))
                .collect(),
        )
    }

    /// `self * other mod modulus`.
    pub fn mulmod(&self, other: &Poly, modulus: &Poly, field: &Field) -> Result<Poly> {
        self.mul(other, field).rem(modulus, field)
    }

    /// `self^exp mod modulus` by square-and-multiply.
    pub fn powmod(&self, exp: &BigUint, modulus: &Poly, field: &Field) -> Result<Poly> {
        if modulus.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = modulus.monic(field);
        let base = self.rem(&m, field)?;
        let mut acc = Poly::one().rem(&m, field)?;
        for i in (0..exp.bits()).rev() {
            acc = acc.mulmod(&acc, &m, field)?;
            if exp.bit(i) {
                acc = acc.mulmod(&base, &m, field)?;
            }
        }
        Ok(acc)
    }

    pub fn powmod_u64(&self, exp: u64, modulus: &Poly, field: &Field) -> Result<Poly> {
        self.powmod(&BigUint::from(exp), modulus, field)
    }

    /// Composition `self(g)`.
    pub fn compose(&self, g: &Poly, field: &Field) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, &c| acc.mul(g, field).add(&Poly::constant(c), field))
    }

    /// The `p`-th root of a polynomial whose derivative vanishes.
    pub(crate) fn pth_root(&self, field: &Field) -> Poly {
        let p = field.p() as usize;
        Poly::from_raw(self.coeffs.iter().step_by(p).map(|&c| field.pth_root(c)).collect())
    }

    pub fn display(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            terms.push(match (c, i) {
                (_, 0) => c.to_string(),
                (1, _) => mono,
                _ => format!("{c}*{mono}"),
            });
        }
        terms.join(" + ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display("t"))
    }
}

pub(crate) fn mul_slices(a: &[u64], b: &[u64], field: &Field) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    if field.is_prime_field() {
        let p = field.p();
        if no_overflow(p, a.len().min(b.len())) {
            for (i, &x) in a.iter().enumerate() {
                for (acc, &y) in out[i..i + b.len()].iter_mut().zip(b) {
                    *acc += x * y;
                }
            }
            for c in out.iter_mut() {
                *c %= p;
            }
            return out;
        }
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                let acc = &mut out[i + j];
                *acc += x * y;
                if *acc >= LAZY_LIMIT {
                    *acc %= p;
                }
            }
        }
        for c in out.iter_mut() {
            *c %= p;
        }
    } else {
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(x, y));
            }
        }
    }
    out
}

/// Whether `terms` products below `p^2` plus a canonical entry fit in a `u64`.
fn no_overflow(p: u64, terms: usize) -> bool {
    p.checked_mul(p).and_then(|sq| sq.checked_mul(terms as u64 + 1)).is_some_and(|b| b < LAZY_LIMIT)
}

/// Reduces `v` modulo a monic polynomial in place; `v` is truncated to
/// `deg(modulus)` canonical entries (trailing zeros possible).
pub(crate) fn reduce_monic_in_place(v: &mut Vec<u64>, modulus: &[u64], field: &Field) {
    let d = modulus.len() - 1;
    if v.len() <= d {
        return;
    }
    if field.is_prime_field() {
        let p = field.p();
        if no_overflow(p, v.len()) && v.iter().all(|&x| x < p) {
            for i in (d..v.len()).rev() {
                let neg = p - v[i] % p;
                for (acc, &m) in v[i - d..i].iter_mut().zip(&modulus[..d]) {
                    *acc += neg * m;
                }
            }
            v.truncate(d);
            for c in v.iter_mut() {
                *c %= p;
            }
            return;
        }
        for i in (d..v.len()).rev() {
            let c = v[i] % p;
            if c != 0 {
                let neg = p - c;
                for (j, &m) in modulus[..d].iter().enumerate() {
                    let acc = &mut v[i - d + j];
                    *acc += neg * m;
                    if *acc >= LAZY_LIMIT {
                        *acc %= p;
                    }
                }
            }
        }
        v.truncate(d);
        for c in v.iter_mut() {
            *c %= p;
        }
    } else {
        for i in (d..v.len()).rev() {
            let c = v[i];
            if c != 0 {
                for (j, &m) in modulus[..d].iter().enumerate() {
                    v[i - d + j] = field.sub(v[i - d + j], field.mul(c, m));
                }
            }
        }
        v.truncate(d);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp<'a> {
    Add,
    Mul,
    Mod,
    Gcd,
    /// `f^exponent mod g`.
    PowMod(&'a BigUint),
}

/// Ring arithmetic on `F_q[t]` dispatched by operation.
pub fn poly_arith(f: &Poly, g: &Poly, op: PolyOp<'_>, field: &Field) -> Result<Poly> {
    match op {
        PolyOp::Add => Ok(f.add(g, field)),
        PolyOp::Mul => Ok(f.mul(g, field)),
        PolyOp::Mod => f.rem(g, field),
        PolyOp::Gcd => Ok(f.gcd(g, field)),
        PolyOp::PowMod(e) => f.powmod(e, g, field),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn ring_examples() {
        let f2 = f(2);
        let a = Poly::from_ints(&f2, &[0, 1, 1]);
        assert_eq!(poly_arith(&a, &Poly::t(), PolyOp::Gcd, &f2).unwrap(), Poly::t());

        let f5 = f(5);
        let prod = Poly::from_ints(&f5, &[2, 1]).mul(&Poly::from_ints(&f5, &[3, 1]), &f5);
        assert_eq!(prod, Poly::from_ints(&f5, &[1, 0, 1]));

        let f11 = f(11);
        let g = Poly::from_ints(&f11, &[3, 7, 0, 5, 1]);
        assert!(poly_arith(&g, &g, PolyOp::Mod, &f11).unwrap().is_zero());
        assert_eq!(g.rem(&Poly::zero(), &f11), Err(Error::DivisionByZero));
    }

    #[test]
    fn divrem_reassembles() {
        let f7 = f(7);
        let a = Poly::from_ints(&f7, &[1, 2, 3, 4, 5, 6, 1]);
        let b = Poly::from_ints(&f7, &[3, 0, 2]);
        let (q, r) = a.divrem(&b, &f7).unwrap();
        assert!(r.degree().map_or(true, |d| d < 2));
        assert_eq!(q.mul(&b, &f7).add(&r, &f7), a);
        assert_eq!(a.rem(&b, &f7).unwrap(), r);
    }

    #[test]
    fn powmod_matches_repeated_multiplication() {
        let f11 = f(11);
        let m = Poly::from_ints(&f11, &[1, 0, 0, 1, 1]);
        let base = Poly::from_ints(&f11, &[2, 5, 1]);
        let mut acc = Poly::one();
        for k in 0..40u64 {
            assert_eq!(base.powmod_u64(k, &m, &f11).unwrap(), acc, "k = {k}");
            acc = acc.mulmod(&base, &m, &f11).unwrap();
        }
    }

    #[test]
    fn json_is_coefficient_list() {
        let p = Poly::from_ints(&f(11), &[1, 0, 1]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1,0,1]");
    }

    #[test]
    fn derivative_in_characteristic_p() {
        let f3 = f(3);
        // t^3 + t has derivative 1 over F_3
        let a = Poly::from_ints(&f3, &[0, 1, 0, 1]);
        assert_eq!(a.derivative(&f3), Poly::one());
    }
}
