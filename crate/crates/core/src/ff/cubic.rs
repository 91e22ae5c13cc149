use serde::{Deserialize, Serialize};

use super::field::Field;
use super::poly::Poly;
use crate::error::{Error, Result};

/// `F(x) = x^3 + a2 x^2 + a1 x + a0` with `a_i` in `F_q[t]`.
///
/// Serialises as the four `x`-coefficients low to high, each a coefficient
/// list in `t`: `[[0,1],[0,1],[],[1]]` is `x^3 + t x + t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Poly>", into = "Vec<Poly>")]
pub struct Cubic {
    coeffs: [Poly; 4],
}

impl TryFrom<Vec<Poly>> for Cubic {
    type Error = Error;

    fn try_from(v: Vec<Poly>) -> Result<Self> {
        Cubic::from_coeffs(v)
    }
}

impl From<Cubic> for Vec<Poly> {
    fn from(c: Cubic) -> Self {
        c.coeffs.to_vec()
    }
}

impl Cubic {
    pub fn monic(a0: Poly, a1: Poly, a2: Poly) -> Self {
        Cubic { coeffs: [a0, a1, a2, Poly::one()] }
    }

    /// Requires exactly four coefficients with `a3 = 1`.
    pub fn from_coeffs(v: Vec<Poly>) -> Result<Self> {
        let n = v.len();
        let arr: [Poly; 4] =
            v.try_into().map_err(|_| Error::NotCubic(format!("expected 4 coefficients, got {n}")))?;
        if !arr[3].is_one() {
            return Err(Error::NotCubic(format!(
                "leading coefficient must be 1, got {}",
                arr[3]
            )));
        }
        Ok(Cubic { coeffs: arr })
    }

    pub fn coeff(&self, i: usize) -> &Poly {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[Poly; 4] {
        &self.coeffs
    }

    /// `F(x)` for `x` in `F_q[t]`.
    pub fn eval(&self, x: &Poly, field: &Field) -> Poly {
        self.coeffs.iter().rev().fold(Poly::zero(), |acc, c| acc.mul(x, field).add(c, field))
    }

    /// Coefficients reduced at `t = t0`, giving a cubic over `F_q`.
    pub fn specialize(&self, t0: u64, field: &Field) -> [u64; 4] {
        [0, 1, 2, 3].map(|i| self.coeffs[i].eval(field, t0))
    }

    /// `a2^2 a1^2 - 4 a1^3 - 4 a2^3 a0 - 27 a0^2 + 18 a2 a1 a0`.
    pub fn discriminant(&self, field: &Field) -> Poly {
        let [a0, a1, a2, _] = &self.coeffs;
        let c = |n: i64| Poly::constant(field.from_int(n));
        let a2a1 = a2.mul(a1, field);
        let t1 = a2a1.square(field);
        let t2 = a1.pow(3, field).mul(&c(-4), field);
        let t3 = a2.pow(3, field).mul(a0, field).mul(&c(-4), field);
        let t4 = a0.square(field).mul(&c(-27), field);
        let t5 = a2a1.mul(a0, field).mul(&c(18), field);
        t1.add(&t2, field).add(&t3, field).add(&t4, field).add(&t5, field)
    }

    pub fn display(&self) -> String {
        let names = ["", "x", "x^2", "x^3"];
        let mut parts = Vec::new();
        for i in (0..4).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let coeff = if c.is_one() && i > 0 {
                String::new()
            } else if c.coeffs().iter().filter(|&&x| x != 0).count() > 1 && i > 0 {
                format!("({c})*")
            } else if i > 0 {
                format!("{c}*")
            } else {
                c.to_string()
            };
            parts.push(format!("{coeff}{}", names[i]));
        }
        parts.join(" + ")
    }
}

/// Discriminant of a monic cubic in `x` over `F_q[t]`.
pub fn discriminant_cubic(f: &Cubic, field: &Field) -> Poly {
    f.discriminant(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Resultant of a cubic and its derivative over `F_q` by the Euclidean
    /// algorithm, independent of the closed-form discriminant.
    fn resultant_oracle(field: &Field, c: [u64; 4]) -> u64 {
        let f = Poly::from_raw(c.to_vec());
        let df = f.derivative(field);
        resultant(field, &f, &df)
    }

    fn resultant(field: &Field, a: &Poly, b: &Poly) -> u64 {
        if b.is_zero() {
            return if a.deg() == 0 { 1 } else { 0 };
        }
        let (m, n) = (a.deg() as u64, b.deg() as u64);
        if n == 0 {
            return field.pow(b.leading(), m);
        }
        let r = a.rem(b, field).unwrap();
        if r.is_zero() {
            return 0;
        }
        let k = r.deg() as u64;
        // res(a,b) = (-1)^{mn} lc(b)^{m-k} res(b, r)
        let sign = if (m * n) % 2 == 1 { field.neg(1) } else { 1 };
        field.mul(sign, field.mul(field.pow(b.leading(), m - k), resultant(field, b, &r)))
    }

    #[test]
    fn discriminant_examples() {
        let f11 = Field::prime(11).unwrap();
        let zero = Cubic::monic(Poly::zero(), Poly::zero(), Poly::zero());
        assert!(zero.discriminant(&f11).is_zero());

        let c = Cubic::monic(Poly::t(), Poly::t(), Poly::zero());
        let expected = Poly::from_ints(&f11, &[0, 0, 6, 7]); // t^2 (7t + 6)
        assert_eq!(c.discriminant(&f11), expected);

        let c = Cubic::monic(Poly::zero(), Poly::from_ints(&f11, &[-1]), Poly::zero());
        assert_eq!(c.discriminant(&f11), Poly::constant(4));
    }

    #[test]
    fn discriminant_matches_resultant_pointwise() {
        let f11 = Field::prime(11).unwrap();
        let cubics = [
            Cubic::monic(Poly::t(), Poly::t(), Poly::zero()),
            Cubic::monic(Poly::from_ints(&f11, &[3, 1]), Poly::from_ints(&f11, &[0, 0, 2]), Poly::t()),
            Cubic::monic(Poly::from_ints(&f11, &[1, 4, 0, 9]), Poly::constant(5), Poly::from_ints(&f11, &[7, 7])),
        ];
        for cubic in &cubics {
            let disc = cubic.discriminant(&f11);
            for t0 in 0..11 {
                let spec = cubic.specialize(t0, &f11);
                // disc = -res(F, F') for a monic cubic
                let res = resultant_oracle(&f11, spec);
                assert_eq!(disc.eval(&f11, t0), f11.neg(res), "t0 = {t0}");
            }
        }
    }

    #[test]
    fn non_cubic_rejected() {
        assert!(Cubic::from_coeffs(vec![Poly::one(); 3]).is_err());
        assert!(Cubic::from_coeffs(vec![Poly::one(), Poly::one(), Poly::one(), Poly::constant(2)]).is_err());
        let json = "[[0,1],[0,1],[],[1]]";
        let c: Cubic = serde_json::from_str(json).unwrap();
        assert_eq!(c, Cubic::monic(Poly::t(), Poly::t(), Poly::zero()));
        assert_eq!(serde_json::to_string(&c).unwrap(), json);
    }
}
