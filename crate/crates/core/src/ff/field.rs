use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported characteristic; keeps `p^2` inside a `u64` with headroom
/// for lazy accumulation.
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;
/// Largest supported cardinality for extension fields (log tables are dense).
pub const MAX_EXTENSION_ORDER: u64 = 1 << 20;

/// Description of a finite field `F_q`, `q = p^e`.
///
/// Serialises as `{"p":11,"e":1}`; extension fields may carry an explicit
/// modulus (coefficients over `F_p`, low to high, monic of degree `e`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one_u32")]
    pub e: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

fn one_u32() -> u32 {
    1
}

impl FieldSpec {
    pub fn prime(p: u64) -> Self {
        FieldSpec { p, e: 1, modulus: None }
    }

    pub fn extension(p: u64, e: u32, modulus: Option<Vec<u64>>) -> Self {
        FieldSpec { p, e, modulus }
    }

    /// Cardinality `p^e`, or `None` on overflow.
    pub fn q(&self) -> Option<u64> {
        self.p.checked_pow(self.e)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{}", self.p, self.e)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

#[derive(Debug)]
struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

#[derive(Debug)]
struct FieldInner {
    spec: FieldSpec,
    p: u64,
    e: u32,
    q: u64,
    tables: Option<LogTables>,
}

/// A validated finite field; cheap to clone.
///
/// Elements are `u64` canonical representatives in `[0, q)`: the residue
/// itself for prime fields, the base-`p` encoding `a_0 + a_1 p + ...` of the
/// coefficient vector over `F_p` for extension fields.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Field {}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.spec.fmt(f)
    }
}

impl Field {
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(FieldSpec::prime(p))
    }

    pub fn new(spec: FieldSpec) -> Result<Self> {
        let p = spec.p;
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p >= MAX_CHARACTERISTIC {
            return Err(Error::InvalidField(format!("characteristic {p} too large")));
        }
        if spec.e == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        if spec.e == 1 {
            if spec.modulus.is_some() {
                return Err(Error::InvalidField("prime fields take no modulus".into()));
            }
            return Ok(Field(Arc::new(FieldInner { spec, p, e: 1, q: p, tables: None })));
        }
        let q = spec
            .q()
            .filter(|&q| q <= MAX_EXTENSION_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("{spec} is too large")))?;
        let base = Field::prime(p)?;
        let modulus = match &spec.modulus {
            Some(m) => {
                let poly = crate::ff::Poly::from_coeffs(&base, m.clone());
                if poly.degree() != Some(spec.e as usize) || !poly.is_monic() {
                    return Err(Error::InvalidField(format!(
                        "modulus must be monic of degree {}",
                        spec.e
                    )));
                }
                if !crate::ff::is_irreducible(&base, &poly)? {
                    return Err(Error::InvalidField("modulus is reducible".into()));
                }
                poly
            }
            None => crate::ff::enumerate_monic(&base, spec.e as usize, crate::ff::MonicFilter::Irreducible, 1 << 24)?
                .next()
                .expect("irreducibles exist in every degree"),
        };
        let spec = FieldSpec { p, e: spec.e, modulus: Some(modulus.coeffs().to_vec()) };
        let tables = build_log_tables(p, spec.e, q, modulus.coeffs());
        let e = spec.e;
        Ok(Field(Arc::new(FieldInner { spec, p, e, q, tables: Some(tables) })))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.0.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.0.e
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.0.q
    }

    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.0.e == 1
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.0.e == 1 {
            let s = a + b;
            if s >= self.0.p {
                s - self.0.p
            } else {
                s
            }
        } else {
            self.digitwise(a, b, |x, y, p| (x + y) % p)
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if self.0.e == 1 {
            if a >= b {
                a - b
            } else {
                a + self.0.p - b
            }
        } else {
            self.digitwise(a, b, |x, y, p| (x + p - y) % p)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        match &self.0.tables {
            None => (a * b) % self.0.p,
            Some(t) => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let n = self.0.q - 1;
                let idx = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % n;
                t.exp[idx as usize] as u64
            }
        }
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.0.q - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u64, exp: u64) -> u64 {
        match &self.0.tables {
            None => pow_mod_u64(a, exp, self.0.p),
            Some(t) => {
                if a == 0 {
                    return if exp == 0 { 1 } else { 0 };
                }
                let n = self.0.q - 1;
                let idx = ((t.log[a as usize] as u128 * exp as u128) % n as u128) as usize;
                t.exp[idx] as u64
            }
        }
    }

    /// Embeds an integer via reduction mod `p`.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.0.p as i64) as u64
    }

    pub fn is_square(&self, a: u64) -> bool {
        if a == 0 || self.0.p == 2 {
            return true;
        }
        self.pow(a, (self.0.q - 1) / 2) == 1
    }

    /// `a^(1/p)`, the inverse of the Frobenius automorphism.
    pub fn pth_root(&self, a: u64) -> u64 {
        if self.0.e == 1 {
            a
        } else {
            self.pow(a, self.0.q / self.0.p)
        }
    }

    /// Smallest canonical representative generating `F_q^*`.
    pub fn primitive_root(&self) -> u64 {
        let n = self.0.q - 1;
        if n == 1 {
            return 1;
        }
        let primes = prime_divisors(n);
        (1..self.0.q)
            .find(|&g| primes.iter().all(|&r| self.pow(g, n / r) != 1))
            .expect("F_q^* is cyclic")
    }

    pub fn multiplicative_order(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut order = self.0.q - 1;
        for r in prime_divisors(order) {
            while order % r == 0 && self.pow(a, order / r) == 1 {
                order /= r;
            }
        }
        Ok(order)
    }

    #[inline]
    pub(crate) fn digitwise(&self, a: u64, b: u64, f: impl Fn(u64, u64, u64) -> u64) -> u64 {
        let p = self.0.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.0.e {
            out += f(a % p, b % p, p) * scale;
            a /= p;
            b /= p;
            scale *= p;
        }
        out
    }

    pub fn elem(&self, value: u64) -> Result<FieldElem> {
        FieldElem::new(self, value)
    }
}

fn build_log_tables(p: u64, e: u32, q: u64, modulus: &[u64]) -> LogTables {
    let decode = |mut x: u64| -> Vec<u64> {
        (0..e)
            .map(|_| {
                let d = x % p;
                x /= p;
                d
            })
            .collect()
    };
    let encode = |v: &[u64]| -> u64 { v.iter().rev().fold(0, |acc, &d| acc * p + d) };
    let mul = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let e = e as usize;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for i in (e..prod.len()).rev() {
            let c = prod[i];
            if c != 0 {
                for (j, &m) in modulus.iter().enumerate().take(e) {
                    prod[i - e + j] = (prod[i - e + j] + c * (p - m)) % p;
                }
            }
            prod[i] = 0;
        }
        prod.truncate(e);
        prod
    };
    let n = (q - 1) as usize;
    for g in 2..q {
        let gv = decode(g);
        let mut exp = Vec::with_capacity(n);
        let mut cur = decode(1);
        let mut ok = true;
        for k in 0..n {
            let c = encode(&cur);
            if k > 0 && c == 1 {
                ok = false;
                break;
            }
            exp.push(c as u32);
            cur = mul(&cur, &gv);
        }
        if !ok || encode(&cur) != 1 {
            continue;
        }
        let mut log = vec![0u32; q as usize];
        for (k, &x) in exp.iter().enumerate() {
            log[x as usize] = k as u32;
        }
        return LogTables { exp, log };
    }
    unreachable!("no primitive element found")
}

/// An element of a finite field carrying its field, for checked arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElem {
    field: Field,
    rep: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElem {
    pub fn new(field: &Field, rep: u64) -> Result<Self> {
        if rep >= field.q() {
            return Err(Error::InvalidField(format!("{rep} is not a canonical element of {field}")));
        }
        Ok(FieldElem { field: field.clone(), rep })
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.rep == 0
    }

    pub fn apply(&self, op: FieldOp, other: &FieldElem) -> Result<FieldElem> {
        if self.field != other.field {
            return Err(Error::FieldMismatch {
                left: self.field.to_string(),
                right: other.field.to_string(),
            });
        }
        let f = &self.field;
        let rep = match op {
            FieldOp::Add => f.add(self.rep, other.rep),
            FieldOp::Sub => f.sub(self.rep, other.rep),
            FieldOp::Mul => f.mul(self.rep, other.rep),
            FieldOp::Div => f.div(self.rep, other.rep)?,
        };
        Ok(FieldElem { field: f.clone(), rep })
    }

    pub fn pow(&self, exp: u64) -> FieldElem {
        FieldElem { field: self.field.clone(), rep: self.field.pow(self.rep, exp) }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// Exact arithmetic on two elements of the same field.
pub fn field_arith(a: &FieldElem, b: &FieldElem, op: FieldOp) -> Result<FieldElem> {
    a.apply(op, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f = Field::prime(11).unwrap();
        let a = f.elem(7).unwrap();
        let b = f.elem(8).unwrap();
        assert_eq!(field_arith(&a, &b, FieldOp::Add).unwrap().rep(), 4);
        let four = f.elem(4).unwrap();
        assert_eq!(field_arith(&four, &four, FieldOp::Div).unwrap().rep(), 1);
        // brute-force power table of 3 mod 11
        let mut acc = 1u64;
        for _ in 0..5 {
            acc = acc * 3 % 11;
        }
        assert_eq!(acc, 1);
        assert_eq!(f.elem(3).unwrap().pow(5).rep(), 1);
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let f = Field::prime(11).unwrap();
        let g = Field::prime(13).unwrap();
        let a = f.elem(3).unwrap();
        assert_eq!(field_arith(&a, &f.elem(0).unwrap(), FieldOp::Div), Err(Error::DivisionByZero));
        assert!(matches!(
            field_arith(&a, &g.elem(3).unwrap(), FieldOp::Add),
            Err(Error::FieldMismatch { .. })
        ));
        assert!(f.elem(11).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(Field::prime(9).is_err());
        assert!(Field::new(FieldSpec::extension(5, 2, Some(vec![4, 0, 1]))).is_err()); // t^2 - 1
        assert!(Field::new(FieldSpec::extension(5, 2, Some(vec![2, 0, 1]))).is_ok()); // t^2 + 2
    }

    #[test]
    fn extension_field_is_a_field() {
        let f = Field::new(FieldSpec::extension(5, 2, None)).unwrap();
        assert_eq!(f.q(), 25);
        for a in 1..25 {
            let inv = f.inv(a).unwrap();
            assert_eq!(f.mul(a, inv), 1);
            for b in 0..25 {
                assert_eq!(f.add(f.sub(a, b), b), a);
                assert_eq!(f.mul(a, b), f.mul(b, a));
            }
        }
        let g = f.primitive_root();
        assert_eq!(f.multiplicative_order(g).unwrap(), 24);
        // Frobenius inverse
        for a in 0..25 {
            assert_eq!(f.pow(f.pth_root(a), 5), a);
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(Field::prime(11).unwrap().primitive_root(), 2);
        assert_eq!(Field::prime(31).unwrap().primitive_root(), 3);
        assert_eq!(Field::prime(2).unwrap().primitive_root(), 1);
    }

    #[test]
    fn spec_json_shape() {
        let json = serde_json::to_string(&FieldSpec::prime(11)).unwrap();
        assert_eq!(json, r#"{"p":11,"e":1}"#);
        let back: FieldSpec = serde_json::from_str(r#"{"p":11}"#).unwrap();
        assert_eq!(back, FieldSpec::prime(11));
    }
}
