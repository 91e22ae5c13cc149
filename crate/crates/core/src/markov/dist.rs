use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarRepr};

/// Mass-balance tolerance for floating distributions.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A law on rank states `{0, ..., R}` plus the mass `tail` beyond `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankDist<S> {
    probs: Vec<S>,
    tail: S,
}

impl<S: Scalar> RankDist<S> {
    /// Checks nonnegativity and `sum + tail = 1` (exactly for exact scalars).
    pub fn new(probs: Vec<S>, tail: S) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no states".into()));
        }
        if probs.iter().chain(std::iter::once(&tail)).any(|p| *p < S::zero()) {
            return Err(Error::InvalidDistribution("negative mass".into()));
        }
        let total = crate::scalar::sum(&probs) + tail.clone();
        let defect = (total - S::one()).abs_val();
        let ok = if S::EXACT { defect.is_zero() } else { defect.to_f64_lossy() <= MASS_TOLERANCE };
        if !ok {
            return Err(Error::InvalidDistribution(format!("total mass off by {:e}", defect.to_f64_lossy())));
        }
        Ok(RankDist { probs, tail })
    }

    /// Skips validation; used internally after mass-preserving updates.
    pub(crate) fn from_parts(probs: Vec<S>, tail: S) -> Self {
        RankDist { probs, tail }
    }

    pub fn point_mass(r: usize, r_max: usize) -> Result<Self> {
        if r > r_max {
            return Err(Error::InvalidDistribution(format!("state {r} beyond R = {r_max}")));
        }
        let mut probs = vec![S::zero(); r_max + 1];
        probs[r] = S::one();
        Ok(RankDist { probs, tail: S::zero() })
    }

    /// Normalises nonnegative weights to total mass 1 with zero tail.
    pub fn from_weights(weights: Vec<S>) -> Result<Self> {
        let total = crate::scalar::sum(&weights);
        if total <= S::zero() {
            return Err(Error::InvalidDistribution("zero total weight".into()));
        }
        RankDist::new(weights.into_iter().map(|w| w / total.clone()).collect(), S::zero())
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn prob(&self, r: usize) -> S {
        self.probs.get(r).cloned().unwrap_or_else(S::zero)
    }

    pub fn tail(&self) -> &S {
        &self.tail
    }

    /// The truncation bound `R`.
    pub fn r_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn total(&self) -> S {
        crate::scalar::sum(&self.probs) + self.tail.clone()
    }

    /// Total variation distance `(1/2) sum |a - b|` over states, with the
    /// tails compared as one extra state.
    pub fn tv_distance(&self, other: &RankDist<S>) -> S {
        let n = self.probs.len().max(other.probs.len());
        let mut acc = (self.tail.clone() - other.tail.clone()).abs_val();
        for r in 0..n {
            acc = acc + (self.prob(r) - other.prob(r)).abs_val();
        }
        acc / S::from_ratio(2, 1)
    }

    /// Extends with zeros or folds states above `r_max` into the tail.
    pub fn resize(&self, r_max: usize) -> RankDist<S> {
        let mut probs = self.probs.clone();
        let mut tail = self.tail.clone();
        if probs.len() > r_max + 1 {
            for p in probs.drain(r_max + 1..) {
                tail = tail + p;
            }
        } else {
            probs.resize(r_max + 1, S::zero());
        }
        RankDist { probs, tail }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RankDist<T> {
        RankDist { probs: self.probs.iter().map(&f).collect(), tail: f(&self.tail) }
    }

    pub fn to_f64(&self) -> RankDist<f64> {
        self.map(|x| x.to_f64_lossy())
    }
}

impl<S: Scalar> Serialize for RankDist<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let probs: Vec<ScalarRepr> = self.probs.iter().map(Scalar::export).collect();
        let mut st = serializer.serialize_struct("RankDist", 3)?;
        st.serialize_field("r_max", &self.r_max())?;
        st.serialize_field("probs", &probs)?;
        st.serialize_field("tail", &self.tail.export())?;
        st.end()
    }
}

/// Mass on odd states; the tail is excluded and reported by
/// [`RankDist::tail`].
pub fn parity<S: Scalar>(dist: &RankDist<S>) -> S {
    dist.probs.iter().skip(1).step_by(2).fold(S::zero(), |acc, p| acc + p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn validation() {
        assert!(RankDist::new(vec![0.5, 0.5], 0.0).is_ok());
        assert!(RankDist::new(vec![0.5, 0.6], 0.0).is_err());
        assert!(RankDist::new(vec![1.5, -0.5], 0.0).is_err());
        let half = BigRational::from_ratio(1, 2);
        assert!(RankDist::new(vec![half.clone(), half.clone()], BigRational::from_ratio(0, 1)).is_ok());
        assert!(RankDist::new(vec![half.clone(), BigRational::from_ratio(1, 3)], BigRational::from_ratio(1, 5)).is_err());
    }

    #[test]
    fn parity_examples() {
        assert_eq!(parity(&RankDist::<f64>::point_mass(0, 5).unwrap()), 0.0);
        assert_eq!(parity(&RankDist::<f64>::point_mass(1, 5).unwrap()), 1.0);
        let d = RankDist::new(vec![0.25, 0.25, 0.25, 0.25], 0.0).unwrap();
        assert_eq!(parity(&d), 0.5);
    }

    #[test]
    fn json_shapes() {
        let d = RankDist::new(vec![0.5, 0.5], 0.0).unwrap();
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"r_max":1,"probs":[0.5,0.5],"tail":0.0}"#);
        let e = RankDist::<BigRational>::point_mass(1, 2).unwrap();
        assert_eq!(serde_json::to_string(&e).unwrap(), r#"{"r_max":2,"probs":["0","1","0"],"tail":"0"}"#);
    }
}
