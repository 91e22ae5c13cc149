use serde::{Deserialize, Serialize};

use super::dist::RankDist;
use crate::error::{Error, Result};
use crate::ff::is_prime;
use crate::scalar::Scalar;

/// Where mass that would leave `{0, ..., R}` goes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPolicy {
    /// Mass beyond `R` lands on the highest state `<= R` of the same parity,
    /// so parity and total mass are conserved exactly.
    ParitySticky,
    /// Mass beyond `R` moves to the tail; `apply` fails once the tail
    /// exceeds the tolerance.
    Absorb { tolerance_exp: i32 },
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy::ParitySticky
    }
}

/// `delta0 I + delta1 M_ell + delta2 M_ell^2` on states `{0, ..., R}`.
#[derive(Clone, Debug)]
pub struct MarkovOp<S> {
    ell: u64,
    weights: [S; 3],
    r_max: usize,
    policy: TailPolicy,
    /// Sparse rows, `(target, prob)` with targets beyond `R` kept as `R + k`
    /// before the tail policy is applied.
    rows: Vec<Vec<(usize, S)>>,
}

/// One step of `M_ell` from `r` without truncation.
pub fn m_ell_row<S: Scalar>(ell: u64, r: usize) -> Vec<(usize, S)> {
    if r == 0 {
        return vec![(1, S::one())];
    }
    let up = S::recip_pow(ell, r as u32);
    vec![(r - 1, S::one() - up.clone()), (r + 1, up)]
}

/// Two steps of `M_ell` from `r` without truncation.
pub fn m_ell2_row<S: Scalar>(ell: u64, r: usize) -> Vec<(usize, S)> {
    let mut out: Vec<(usize, S)> = Vec::new();
    for (s, p) in m_ell_row::<S>(ell, r) {
        for (t, p2) in m_ell_row::<S>(ell, s) {
            let w = p.clone() * p2;
            match out.iter_mut().find(|(k, _)| *k == t) {
                Some((_, acc)) => *acc = acc.clone() + w,
                None => out.push((t, w)),
            }
        }
    }
    out.sort_by_key(|(k, _)| *k);
    out
}

impl<S: Scalar> MarkovOp<S> {
    pub fn new(ell: u64, weights: [S; 3], r_max: usize, policy: TailPolicy) -> Result<Self> {
        if ell < 2 || !is_prime(ell) {
            return Err(Error::InvalidEll(ell));
        }
        if r_max < 2 {
            return Err(Error::Config("R must be at least 2".into()));
        }
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::Config("mixture weights must be nonnegative".into()));
        }
        let total = weights.iter().fold(S::zero(), |a, w| a + w.clone());
        let defect = (total - S::one()).abs_val();
        if if S::EXACT { !defect.is_zero() } else { defect.to_f64_lossy() > 1e-12 } {
            return Err(Error::Config("mixture weights must sum to 1".into()));
        }
        let rows = (0..=r_max)
            .map(|r| {
                let mut row: Vec<(usize, S)> = Vec::new();
                let mut push = |t: usize, w: S| match row.iter_mut().find(|(k, _)| *k == t) {
                    Some((_, acc)) => *acc = acc.clone() + w,
                    None => row.push((t, w)),
                };
                if !weights[0].is_zero() {
                    push(r, weights[0].clone());
                }
                if !weights[1].is_zero() {
                    for (t, p) in m_ell_row::<S>(ell, r) {
                        push(t, weights[1].clone() * p);
                    }
                }
                if !weights[2].is_zero() {
                    for (t, p) in m_ell2_row::<S>(ell, r) {
                        push(t, weights[2].clone() * p);
                    }
                }
                row.sort_by_key(|(k, _)| *k);
                row
            })
            .collect();
        Ok(MarkovOp { ell, weights, r_max, policy, rows })
    }

    /// `M_ell` alone.
    pub fn m_ell(ell: u64, r_max: usize) -> Result<Self> {
        Self::new(ell, [S::zero(), S::one(), S::zero()], r_max, TailPolicy::default())
    }

    /// `M_ell^2` alone.
    pub fn m_ell2(ell: u64, r_max: usize) -> Result<Self> {
        Self::new(ell, [S::zero(), S::zero(), S::one()], r_max, TailPolicy::default())
    }

    /// `delta0 I + (1 - delta0) M_ell^2`, the operator for `delta(P1) = 0`.
    pub fn m_t(ell: u64, delta0: S, r_max: usize) -> Result<Self> {
        let d2 = S::one() - delta0.clone();
        Self::new(ell, [delta0, S::zero(), d2], r_max, TailPolicy::default())
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn weights(&self) -> &[S; 3] {
        &self.weights
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn policy(&self) -> TailPolicy {
        self.policy
    }

    /// Untruncated transition row from `r`.
    pub fn raw_row(&self, r: usize) -> &[(usize, S)] {
        &self.rows[r]
    }

    /// Where a target state lands under the tail policy; `None` means tail.
    pub fn truncate_target(&self, t: usize) -> Option<usize> {
        if t <= self.r_max {
            return Some(t);
        }
        match self.policy {
            TailPolicy::ParitySticky => Some(if (t - self.r_max) % 2 == 0 { self.r_max } else { self.r_max - 1 }),
            TailPolicy::Absorb { .. } => None,
        }
    }

    /// Transition row from `r` after truncation, with the tail share.
    pub fn row(&self, r: usize) -> (Vec<(usize, S)>, S) {
        let mut out: Vec<(usize, S)> = Vec::new();
        let mut tail = S::zero();
        for (t, p) in &self.rows[r] {
            match self.truncate_target(*t) {
                Some(k) => match out.iter_mut().find(|(j, _)| *j == k) {
                    Some((_, acc)) => *acc = acc.clone() + p.clone(),
                    None => out.push((k, p.clone())),
                },
                None => tail = tail + p.clone(),
            }
        }
        out.sort_by_key(|(k, _)| *k);
        (out, tail)
    }

    /// One step `mu -> mu M`; the tail of `mu` is carried unchanged.
    pub fn step(&self, dist: &RankDist<S>) -> RankDist<S> {
        let mut next = vec![S::zero(); self.r_max + 1];
        let mut tail = dist.tail().clone();
        for (r, p) in dist.probs().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (t, w) in &self.rows[r] {
                let m = p.clone() * w.clone();
                match self.truncate_target(*t) {
                    Some(k) => next[k] = next[k].clone() + m,
                    None => tail = tail + m,
                }
            }
        }
        RankDist::from_parts(next, tail)
    }

    /// Applies the same linear map to a signed vector (no tail).
    pub fn step_vec(&self, v: &[S]) -> Vec<S> {
        let mut next = vec![S::zero(); self.r_max + 1];
        for (r, p) in v.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (t, w) in &self.rows[r] {
                if let Some(k) = self.truncate_target(*t) {
                    next[k] = next[k].clone() + p.clone() * w.clone();
                }
            }
        }
        next
    }
}

/// `n`-fold application of `op` to `dist`.
pub fn apply<S: Scalar>(op: &MarkovOp<S>, dist: &RankDist<S>, steps: usize) -> Result<RankDist<S>> {
    if dist.r_max() != op.r_max() {
        return Err(Error::Incompatible(format!("distribution R = {} vs operator R = {}", dist.r_max(), op.r_max())));
    }
    let mut cur = dist.clone();
    for _ in 0..steps {
        cur = op.step(&cur);
        if let TailPolicy::Absorb { tolerance_exp } = op.policy() {
            let tolerance = 10f64.powi(tolerance_exp);
            let tail = cur.tail().to_f64_lossy();
            if tail > tolerance {
                return Err(Error::TailExceeded { tail, tolerance });
            }
        }
    }
    Ok(cur)
}
