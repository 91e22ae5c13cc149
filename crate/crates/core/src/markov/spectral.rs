use serde::{Deserialize, Serialize};

use super::dist::RankDist;
use super::op::MarkovOp;
use crate::error::{Error, Result};

/// Agreement required between the two rate estimates.
pub const GAMMA_AGREEMENT: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma: f64,
    /// Norm ratio of projected power iteration.
    pub power_iteration: f64,
    /// `exp(slope)` of a least-squares fit to `log TV` decay.
    pub tv_fit: f64,
    pub iterations: usize,
    pub horizon: usize,
}

/// State classes left invariant by `op`: even and odd states when
/// `delta1 = 0`, otherwise all states.
fn classes(op: &MarkovOp<f64>) -> Vec<Vec<usize>> {
    let n = op.r_max() + 1;
    if op.weights()[1] == 0.0 {
        vec![(0..n).step_by(2).collect(), (1..n).step_by(2).collect()]
    } else {
        vec![(0..n).collect()]
    }
}

/// Stationary law of `op` supported on `class`, by iteration from its first
/// state.
pub fn stationary_on_class(op: &MarkovOp<f64>, class: &[usize]) -> Result<Vec<f64>> {
    let mut v = vec![0.0; op.r_max() + 1];
    v[class[0]] = 1.0;
    for _ in 0..1_000_000 {
        let next = op.step_vec(&v);
        let change: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        v = next;
        if change < 1e-16 {
            return Ok(v);
        }
    }
    Err(Error::Spectral("stationary iteration did not converge".into()))
}

fn project(v: &mut [f64], classes: &[Vec<usize>], stationary: &[Vec<f64>]) {
    for (class, pi) in classes.iter().zip(stationary) {
        let m: f64 = class.iter().map(|&r| v[r]).sum();
        for (x, p) in v.iter_mut().zip(pi) {
            *x -= m * p;
        }
    }
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Subdominant eigenvalue modulus of `op` on the complement of its
/// stationary laws, by projected power iteration, cross-checked against the
/// decay rate of total variation distance.
pub fn estimate_gamma(op: &MarkovOp<f64>) -> Result<GammaEstimate> {
    if op.r_max() < 20 {
        return Err(Error::Config("estimate_gamma needs R >= 20".into()));
    }
    if op.weights()[0] >= 1.0 {
        return Err(Error::Spectral("identity operator has no mixing".into()));
    }
    let classes = classes(op);
    let stationary: Vec<Vec<f64>> =
        classes.iter().map(|c| stationary_on_class(op, c)).collect::<Result<_>>()?;

    let start = |v: &mut Vec<f64>| {
        for (class, pi) in classes.iter().zip(&stationary) {
            v[class[0]] += 1.0;
            for (x, p) in v.iter_mut().zip(pi) {
                *x -= p;
            }
        }
    };

    // power iteration
    let mut v = vec![0.0; op.r_max() + 1];
    start(&mut v);
    let mut ratio = 0.0;
    let mut stable = 0;
    let mut iterations = 0;
    let norm0 = l1(&v);
    v.iter_mut().for_each(|x| *x /= norm0);
    while iterations < 500_000 {
        iterations += 1;
        v = op.step_vec(&v);
        project(&mut v, &classes, &stationary);
        let norm = l1(&v);
        if norm == 0.0 {
            return Err(Error::Spectral("iterate vanished".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
        stable = if (norm - ratio).abs() < 1e-15 { stable + 1 } else { 0 };
        ratio = norm;
        if stable >= 50 {
            break;
        }
    }
    if stable < 50 {
        return Err(Error::Spectral("power iteration did not converge".into()));
    }
    let power_iteration = ratio;

    // TV decay fit over the second half of a horizon long enough for the
    // subdominant mode to dominate
    let horizon = (iterations.max(200) * 2).min(200_000);
    let mut d = vec![0.0; op.r_max() + 1];
    start(&mut d);
    let mut log_scale = 0.0;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 1..=horizon {
        d = op.step_vec(&d);
        project(&mut d, &classes, &stationary);
        let norm = l1(&d);
        log_scale += norm.ln();
        d.iter_mut().for_each(|x| *x /= norm);
        if n > horizon / 2 {
            xs.push(n as f64);
            ys.push(log_scale);
        }
    }
    let tv_fit = fit_slope(&xs, &ys).exp();
    if (tv_fit - power_iteration).abs() > GAMMA_AGREEMENT {
        return Err(Error::Spectral(format!("power iteration {power_iteration} vs TV fit {tv_fit}")));
    }
    if !(power_iteration > 0.0 && power_iteration < 1.0) {
        return Err(Error::Spectral(format!("rate {power_iteration} outside (0, 1)")));
    }
    Ok(GammaEstimate { gamma: power_iteration, power_iteration, tv_fit, iterations, horizon })
}

/// `TV(dist M^n, target)` for `n = 0..=n_max`.
pub fn tv_decay(op: &MarkovOp<f64>, dist: &RankDist<f64>, target: &RankDist<f64>, n_max: usize) -> Vec<f64> {
    let mut cur = dist.clone();
    let mut out = vec![cur.tv_distance(target)];
    for _ in 0..n_max {
        cur = op.step(&cur);
        out.push(cur.tv_distance(target));
    }
    out
}

/// Rate `exp(slope)` of `log tv[n]` over the indices where `tv >= floor`.
pub fn fitted_rate(tv: &[f64], n_min: usize, floor: f64) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = tv
        .iter()
        .enumerate()
        .skip(n_min)
        .filter(|(_, &t)| t >= floor)
        .map(|(n, &t)| (n as f64, t.ln()))
        .unzip();
    (xs.len() >= 3).then(|| fit_slope(&xs, &ys).exp())
}

/// Sign convention for the middle term of the alpha objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSign {
    /// `rho log(1/gamma)`, positive for `gamma < 1`.
    #[default]
    Positive,
    /// `rho log gamma` as printed; the supremum is then 0.
    Literal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaResult {
    pub alpha: f64,
    pub rho_star: f64,
}

/// `min(rho log rho + 1 - rho, rho log(1/gamma), -rho log(1 - delta0))`.
pub fn alpha_objective(rho: f64, gamma: f64, delta0: f64, sign: GammaSign) -> f64 {
    let first = if rho > 0.0 { rho * rho.ln() + 1.0 - rho } else { 1.0 };
    let middle = match sign {
        GammaSign::Positive => -rho * gamma.ln(),
        GammaSign::Literal => rho * gamma.ln(),
    };
    let third = -rho * (1.0 - delta0).ln();
    first.min(middle).min(third)
}

/// `sup_{0<rho<1}` of [`alpha_objective`] by golden-section search. The
/// objective is the minimum of a decreasing and increasing terms, hence
/// unimodal; both endpoint limits are 0.
pub fn alpha_exponent(gamma: f64, delta0: f64, sign: GammaSign) -> Result<AlphaResult> {
    if !(gamma > 0.0 && gamma < 1.0) || !(delta0 > 0.0 && delta0 < 1.0) {
        return Err(Error::Domain("alpha needs 0 < gamma < 1 and 0 < delta0 < 1".into()));
    }
    let g = |r: f64| alpha_objective(r, gamma, delta0, sign);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-13 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    let rho = (a + b) / 2.0;
    let value = g(rho);
    Ok(if value > 0.0 { AlphaResult { alpha: value, rho_star: rho } } else { AlphaResult { alpha: 0.0, rho_star: 0.0 } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_for_m_t() {
        let op = MarkovOp::<f64>::m_t(5, 5.0 / 6.0, 60).unwrap();
        let g = estimate_gamma(&op).unwrap();
        assert!((g.gamma - (5.0 / 6.0 + 1.0 / 150.0)).abs() < 1e-6, "{g:?}");
        for r in [40, 80] {
            let other = estimate_gamma(&MarkovOp::<f64>::m_t(5, 5.0 / 6.0, r).unwrap()).unwrap();
            assert!((other.gamma - g.gamma).abs() < 1e-6);
        }
    }

    #[test]
    fn gamma_monotone_in_delta0() {
        let mut prev = 0.0;
        for k in 1..=9 {
            let d0 = k as f64 / 10.0;
            let g = estimate_gamma(&MarkovOp::<f64>::m_t(5, d0, 40).unwrap()).unwrap().gamma;
            assert!(g > prev, "delta0 = {d0}");
            prev = g;
        }
        assert!(estimate_gamma(&MarkovOp::<f64>::m_t(5, 1.0, 40).unwrap()).is_err());
        assert!(estimate_gamma(&MarkovOp::<f64>::m_t(5, 0.5, 10).unwrap()).is_err());
    }

    #[test]
    fn alpha_matches_grid() {
        for (gamma, d0) in [(0.5, 5.0 / 6.0), (0.84, 5.0 / 6.0), (0.9, 0.5), (0.2, 0.1)] {
            let a = alpha_exponent(gamma, d0, GammaSign::Positive).unwrap();
            let grid = (1..2_000_000)
                .map(|i| alpha_objective(i as f64 / 2e6, gamma, d0, GammaSign::Positive))
                .fold(f64::MIN, f64::max);
            assert!((a.alpha - grid).abs() < 1e-6, "{gamma} {d0}: {} vs {grid}", a.alpha);
            assert!(a.alpha > 0.0);
        }
        let near_one = alpha_exponent(1.0 - 1e-9, 5.0 / 6.0, GammaSign::Positive).unwrap();
        assert!(near_one.alpha < 1e-8);
        assert_eq!(alpha_exponent(0.5, 5.0 / 6.0, GammaSign::Literal).unwrap().alpha, 0.0);
        // third term is rho log 6 at delta0 = 5/6
        let t = alpha_objective(0.3, 0.01, 5.0 / 6.0, GammaSign::Positive);
        assert!((t - (0.3 * 0.3f64.ln() + 0.7).min(0.3 * 6f64.ln())).abs() < 1e-12);
        assert!(alpha_exponent(1.0, 0.5, GammaSign::Positive).is_err());
    }
}
