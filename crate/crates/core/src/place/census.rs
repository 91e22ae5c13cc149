use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::classify::{frob_class, FrobClass};
use super::curve::{CurveConfig, S3_ORDER};
use crate::error::Result;
use crate::ff::{count_monic_irreducibles, par_fold_monic, MonicFilter, Place};

/// Class counts indexed by [`FrobClass::index`].
pub type ClassCounts = [u64; 4];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeCensus {
    pub degree: usize,
    pub counts: ClassCounts,
    pub total: u64,
    /// Unramified class counts divided by `total`.
    pub densities: [f64; 3],
    pub cumulative_counts: ClassCounts,
    pub cumulative_densities: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCensus {
    pub q: u64,
    pub max_degree: usize,
    pub degrees: Vec<DegreeCensus>,
    /// `(1/6, 1/2, 1/3)` for (Identity, Transposition, ThreeCycle).
    pub frob_densities: [f64; 3],
    /// `(delta(P0), delta(P1), delta(P2)) = (5/6, 0, 1/6)`.
    pub place_class_densities: [f64; 3],
}

/// Classifies every monic irreducible of degree `d`.
pub fn classify_degree(curve: &CurveConfig, d: usize, budget: u128) -> Result<ClassCounts> {
    par_fold_monic(
        curve.field(),
        d,
        MonicFilter::Irreducible,
        budget,
        || [0u64; 4],
        |mut acc, v| {
            acc[frob_class(curve, &Place::new_unchecked(v)).index()] += 1;
            acc
        },
        |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
    )
}

/// Exhaustive classification of all places of degree `1..=max_degree`.
pub fn density_census(curve: &CurveConfig, max_degree: usize, budget: u128) -> Result<DensityCensus> {
    let mut degrees = Vec::new();
    let mut cumulative = [0u64; 4];
    for d in 1..=max_degree {
        let counts = classify_degree(curve, d, budget)?;
        let total: u64 = counts.iter().sum();
        debug_assert_eq!(BigUint::from(total), count_monic_irreducibles(curve.field().q(), d as u32)?);
        for i in 0..4 {
            cumulative[i] += counts[i];
        }
        degrees.push(DegreeCensus {
            degree: d,
            counts,
            total,
            densities: densities(&counts, total),
            cumulative_counts: cumulative,
            cumulative_densities: densities(&cumulative, cumulative.iter().sum()),
        });
    }
    Ok(DensityCensus {
        q: curve.field().q(),
        max_degree,
        degrees,
        frob_densities: FrobClass::UNRAMIFIED.map(|c| c.class_size() as f64 / S3_ORDER as f64),
        place_class_densities: [5.0 / 6.0, 0.0, 1.0 / 6.0],
    })
}

fn densities(counts: &ClassCounts, total: u64) -> [f64; 3] {
    let t = total.max(1) as f64;
    [counts[0] as f64 / t, counts[1] as f64 / t, counts[2] as f64 / t]
}

/// Rounds a nonnegative float up by a few ulps to absorb evaluation error.
pub fn round_up(x: f64) -> f64 {
    x * (1.0 + 8.0 * f64::EPSILON)
}

/// Effective Chebotarev bound for places of degree `n` in a class `C`:
/// `(2|C|)/(n|G|) [(|G| + g_L) q^(n/2) + |G|(2 g_K + 1) q^(n/4) + (|G| + g_L)]`,
/// rounded up.
pub fn chebotarev_bound(g_order: u64, c_size: u64, g_l: u64, g_k: u64, q: u64, n: u32) -> f64 {
    let (g, c, q, nf) = (g_order as f64, c_size as f64, q as f64, n as f64);
    let gl = g_l as f64;
    let main = (g + gl) * q.powf(nf / 2.0) + g * (2.0 * g_k as f64 + 1.0) * q.powf(nf / 4.0) + (g + gl);
    round_up(2.0 * c / (nf * g) * main)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioBound {
    /// `q^(n/2) - q^(n/4) > 2(|G| + g_L + 2 g_K)`.
    pub condition_met: bool,
    /// Bound on `|#S / #S' - |S| / |S'||`; infinite when the condition fails.
    pub bound: f64,
    /// `16 (|S|/|S'|)(|G| + g_L + 2 g_K) q^(-n/2)`.
    pub simplified_bound: f64,
    /// `n` from which the simplified form applies.
    pub simplified_threshold: f64,
    pub simplified_applies: bool,
}

/// Ratio deviation bound for two conjugation-stable sets `S, S'`.
pub fn chebotarev_ratio_bound(
    g_order: u64,
    s_size: u64,
    sprime_size: u64,
    g_l: u64,
    g_k: u64,
    q: u64,
    n: u32,
) -> RatioBound {
    let k = (g_order + g_l + 2 * g_k) as f64;
    let ratio = s_size as f64 / sprime_size as f64;
    let (qf, nf) = (q as f64, n as f64);
    let gap = qf.powf(nf / 2.0) - qf.powf(nf / 4.0) - 2.0 * k;
    let condition_met = gap > 0.0;
    let bound = if condition_met { round_up(4.0 * ratio * k / gap) } else { f64::INFINITY };
    let simplified_threshold = 2.0 * (8f64.ln() + k.ln()) / qf.ln();
    RatioBound {
        condition_met,
        bound,
        simplified_bound: round_up(16.0 * ratio * k * qf.powf(-nf / 2.0)),
        simplified_threshold,
        simplified_applies: nf >= simplified_threshold,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub degree: usize,
    pub class: FrobClass,
    pub observed: u64,
    pub expected: f64,
    pub deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub degree: usize,
    pub class: FrobClass,
    pub observed_ratio: f64,
    pub target: f64,
    pub ratio_bound: RatioBound,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebotarevAudit {
    pub g_l: u64,
    pub g_k: u64,
    pub rows: Vec<AuditRow>,
    /// Per-degree class ratios against all unramified places.
    pub density_rows: Vec<DensityRow>,
    pub census: DensityCensus,
    pub pass: bool,
}

/// Compares the census of degrees `1..=max_degree` with the effective
/// Chebotarev bounds using the curve's genus bound and `g_K = 0`.
pub fn chebotarev_audit(curve: &CurveConfig, max_degree: usize, budget: u128) -> Result<ChebotarevAudit> {
    let census = density_census(curve, max_degree, budget)?;
    let q = curve.field().q();
    let g_l = curve.genus_l_bound();
    let mut rows = Vec::new();
    let mut density_rows = Vec::new();
    for deg in &census.degrees {
        let n = deg.degree as u32;
        let main = BigUint::from(q).pow(n).to_f64().expect("finite") / n as f64;
        let unramified = deg.total - deg.counts[FrobClass::Ramified.index()];
        for class in FrobClass::UNRAMIFIED {
            let observed = deg.counts[class.index()];
            let expected = class.class_size() as f64 / S3_ORDER as f64 * main;
            let deviation = (observed as f64 - expected).abs();
            let bound = chebotarev_bound(S3_ORDER, class.class_size(), g_l, 0, q, n);
            rows.push(AuditRow { degree: deg.degree, class, observed, expected, deviation, bound, pass: deviation <= bound });
            let ratio_bound = chebotarev_ratio_bound(S3_ORDER, class.class_size(), S3_ORDER, g_l, 0, q, n);
            let target = class.class_size() as f64 / S3_ORDER as f64;
            let observed_ratio = observed as f64 / unramified.max(1) as f64;
            let pass = !ratio_bound.condition_met || (observed_ratio - target).abs() <= ratio_bound.bound;
            density_rows.push(DensityRow { degree: deg.degree, class, observed_ratio, target, ratio_bound, pass });
        }
    }
    let pass = rows.iter().all(|r| r.pass) && density_rows.iter().all(|r| r.pass);
    Ok(ChebotarevAudit { g_l, g_k: 0, rows, density_rows, census, pass })
}
