//! Scalar abstraction shared by the rank-state Markov machinery and the
//! constant evaluations.
//!
//! Floating types give fast approximate answers, [`BigRational`] gives exact
//! ones; every generic routine is written once against [`Scalar`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

/// Serialised form of a scalar: a JSON number, or `"n/d"` for exact values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarRepr {
    Float(f64),
    Exact(String),
}

pub trait Scalar:
    Clone + Debug + PartialOrd + Num + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// True when arithmetic is exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// `base^(-exp)`.
    fn recip_pow(base: u64, exp: u32) -> Self;

    fn abs_val(&self) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn export(&self) -> ScalarRepr {
        ScalarRepr::Float(self.to_f64_lossy())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn recip_pow(base: u64, exp: u32) -> Self {
        (base as f64).powi(-(exp as i32))
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn recip_pow(base: u64, exp: u32) -> Self {
        (base as f64).powi(-(exp as i32)) as f32
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn recip_pow(base: u64, exp: u32) -> Self {
        BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(base), exp as usize))
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn export(&self) -> ScalarRepr {
        ScalarRepr::Exact(ratio_string(self))
    }
}

/// Sum of a slice of scalars.
pub fn sum<S: Scalar>(values: &[S]) -> S {
    values.iter().fold(S::zero(), |acc, v| acc + v.clone())
}

/// Decimal rendering of an exact rational as `numerator/denominator`.
pub fn ratio_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
