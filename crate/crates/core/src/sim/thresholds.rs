use serde::{Deserialize, Serialize};

/// `m_{n,q} = log n + log log q` (natural logarithms).
pub fn m_nq(n: f64, q: f64) -> f64 {
    n.ln() + q.ln().ln()
}

/// `4 m_{n,q}^2 / log q`, the degree above which a factor counts as large.
pub fn frak_n(n: f64, q: f64) -> f64 {
    4.0 * m_nq(n, q).powi(2) / q.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationBound {
    pub m: f64,
    pub epsilon: f64,
    /// `n^(-rho log rho - 1 + rho)`.
    pub moderate_term: f64,
    /// `3 m^2 (1 - delta0)^((1 - epsilon) rho m)`.
    pub p0_term: f64,
    /// `4 max(moderate_term, p0_term)`: the bound divided by `q^n`.
    pub ratio: f64,
    /// `m > max(e^(e^e), log 6 + log(ell^3 + g_T))`.
    pub threshold_met: bool,
}

/// Bound on the share of degree-`n` polynomials outside the factor-count
/// partition, as a ratio to `q^n`, with `epsilon = 1/log log m`.
pub fn deviation_bound(n: f64, q: f64, rho: f64, delta0: f64, ell: u64, g_t: u64) -> DeviationBound {
    let m = m_nq(n, q);
    let epsilon = 1.0 / m.ln().ln();
    let moderate_term = n.powf(-rho * rho.ln() - 1.0 + rho);
    let p0_term = 3.0 * m * m * (1.0 - delta0).powf((1.0 - epsilon) * rho * m);
    let e_e_e = std::f64::consts::E.powf(std::f64::consts::E.powf(std::f64::consts::E));
    let threshold = e_e_e.max(6f64.ln() + ((ell as f64).powi(3) + g_t as f64).ln());
    DeviationBound {
        m,
        epsilon,
        moderate_term,
        p0_term,
        ratio: 4.0 * moderate_term.max(p0_term),
        threshold_met: m > threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn threshold_values() {
        assert!((m_nq(E, E.powf(E)) - 2.0).abs() < 1e-12);
        assert!(m_nq(200.0, 11.0) > m_nq(100.0, 11.0));
        // log 100 + log log 11
        let m = 100f64.ln() + 11f64.ln().ln();
        assert!((m_nq(100.0, 11.0) - m).abs() < 1e-15);
        assert!((m - 5.479_761_568_911_78).abs() < 1e-12);
        assert!((frak_n(100.0, 11.0) - 4.0 * m * m / 11f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn deviation_shapes() {
        let b = deviation_bound(1e4, 11.0, 0.5, 5.0 / 6.0, 5, 0);
        assert!(!b.threshold_met);
        let m = 1e4f64.ln() + 11f64.ln().ln();
        let eps = 1.0 / m.ln().ln();
        let expect = 4.0 * (1e4f64).powf(-0.5 * 0.5f64.ln() - 0.5).max(3.0 * m * m * (1.0f64 / 6.0).powf((1.0 - eps) * 0.5 * m));
        assert!((b.ratio - expect).abs() < 1e-12 * expect);
        assert!((b.ratio - 7026.685_725_177_751).abs() < 1e-8);
        let far = deviation_bound(1e300, 11.0, 0.5, 5.0 / 6.0, 5, 0);
        let farther = deviation_bound(f64::MAX, 11.0, 0.5, 5.0 / 6.0, 5, 0);
        assert!(farther.moderate_term < far.moderate_term);
        assert!(far.moderate_term < b.moderate_term);
    }
}
