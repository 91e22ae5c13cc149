use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::factor::is_irreducible;
use super::field::Field;
use super::poly::Poly;
use crate::error::{Error, Result};

/// A finite place of `F_q(t)`: a monic irreducible polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Place {
    poly: Poly,
}

impl Place {
    /// Normalises `poly` to be monic and checks irreducibility.
    pub fn new(field: &Field, poly: &Poly) -> Result<Self> {
        let poly = poly.monic(field);
        if !is_irreducible(field, &poly)? {
            return Err(Error::Domain(format!("{poly} is not irreducible")));
        }
        Ok(Place { poly })
    }

    /// Caller guarantees `poly` is monic irreducible.
    pub fn new_unchecked(poly: Poly) -> Self {
        Place { poly }
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.deg()
    }

    /// `q^deg`, the size of the residue field.
    pub fn norm(&self, q: u64) -> BigUint {
        num_traits::pow(BigUint::from(q), self.degree())
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

/// `F_q[t] / (v)` for a place `v`, elements stored as reduced polynomials.
#[derive(Clone, Debug)]
pub struct ResidueField {
    field: Field,
    modulus: Poly,
}

impl ResidueField {
    pub fn new(field: &Field, place: &Place) -> Self {
        ResidueField { field: field.clone(), modulus: place.poly.clone() }
    }

    pub fn base(&self) -> &Field {
        &self.field
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn order(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.field.q()), self.degree())
    }

    pub fn reduce(&self, a: &Poly) -> Poly {
        a.rem(&self.modulus, &self.field).expect("nonzero modulus")
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        a.add(b, &self.field)
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        a.sub(b, &self.field)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mulmod(b, &self.modulus, &self.field).expect("nonzero modulus")
    }

    pub fn pow(&self, a: &Poly, exp: &BigUint) -> Poly {
        a.powmod(exp, &self.modulus, &self.field).expect("nonzero modulus")
    }

    /// Inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: &Poly) -> Result<Poly> {
        let f = &self.field;
        let (mut r0, mut r1) = (self.modulus.clone(), self.reduce(a));
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qt, r) = r0.divrem(&r1, f)?;
            let s = s0.sub(&qt.mul(&s1, f), f);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        if r0.deg() > 0 || r0.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(&s0.scale(f.inv(r0.leading())?, f)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverses_in_f121() {
        let f = Field::prime(11).unwrap();
        let v = Place::new(&f, &Poly::from_ints(&f, &[1, 0, 1])).unwrap();
        let r = ResidueField::new(&f, &v);
        assert_eq!(r.order(), BigUint::from(121u32));
        for c0 in 0..11 {
            for c1 in 0..11 {
                let a = Poly::from_raw(vec![c0, c1]);
                if a.is_zero() {
                    assert!(r.inv(&a).is_err());
                    continue;
                }
                assert_eq!(r.mul(&a, &r.inv(&a).unwrap()), Poly::one());
            }
        }
    }

    #[test]
    fn place_rejects_reducible() {
        let f = Field::prime(5).unwrap();
        assert!(Place::new(&f, &Poly::from_ints(&f, &[1, 0, 1])).is_err());
        let v = Place::new(&f, &Poly::from_ints(&f, &[4, 0, 2])).unwrap();
        assert!(v.poly().is_monic());
        assert_eq!(v.degree(), 2);
    }
}
