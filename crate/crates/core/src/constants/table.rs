use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::series::{check_ell_p, e_constant, e_enclosure, ln_biguint, p_constant, s_constant, ExponentMode};
use crate::error::Result;

pub const TABLE_ELLS: [u64; 5] = [5, 7, 11, 13, 17];
pub const TABLE_PRIMES: [u64; 5] = [5, 7, 11, 13, 17];
/// Largest accepted deviation from a reference cell.
pub const TABLE_TOLERANCE: f64 = 5e-5;

/// Published five-decimal values, rows `E(ell, p, 1)` for `p` in
/// [`TABLE_PRIMES`], then `P(ell, 1)` and `P(ell, 2)`; `None` where `ell = p`.
pub const REFERENCE_TABLE: [[Option<f64>; 5]; 7] = [
    [None, Some(5.35713), Some(5.09091), Some(5.05494), Some(5.02451)],
    [Some(11.07690), None, Some(7.25454), Some(7.15385), Some(7.06863)],
    [Some(26.76903), Some(18.57500), None, Some(11.60440), Some(11.26961)],
    [Some(37.61501), Some(25.67499), Some(16.40459), None, Some(13.44608)],
    [Some(66.07605), Some(43.59997), Some(27.42754), Some(23.29292), None],
    [Some(0.79334), Some(0.85459), Some(0.90840), Some(0.92265), Some(0.94098)],
    [Some(0.99167), Some(0.99702), Some(0.99924), Some(0.99954), Some(0.99980)],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TableRow {
    E { p: u64 },
    P { m: u32 },
}

impl TableRow {
    pub fn label(&self) -> String {
        match self {
            TableRow::E { p } => format!("E(l,{p},1)"),
            TableRow::P { m } => format!("P(l,{m})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub row: TableRow,
    pub ell: u64,
    /// `None` for omitted `ell = p` cells.
    pub value: Option<f64>,
    pub reference: Option<f64>,
    pub diff: Option<f64>,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub mode: ExponentMode,
    pub cells: Vec<TableCell>,
    pub max_abs_diff: f64,
    pub flagged: usize,
}

impl Table1 {
    pub fn rows(&self) -> Vec<TableRow> {
        let mut rows: Vec<TableRow> = TABLE_PRIMES.iter().map(|&p| TableRow::E { p }).collect();
        rows.extend([TableRow::P { m: 1 }, TableRow::P { m: 2 }]);
        rows
    }

    pub fn cell(&self, row: TableRow, ell: u64) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.row == row && c.ell == ell)
    }

    /// Fixed-width layout with rows by constant and columns by `ell`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{:<12}", "");
        for ell in TABLE_ELLS {
            out += &format!("{:>12}", format!("l = {ell}"));
        }
        out.push('\n');
        for row in self.rows() {
            out += &format!("{:<12}", row.label());
            for ell in TABLE_ELLS {
                let c = self.cell(row, ell).expect("full grid");
                let s = match c.value {
                    None => "x".to_string(),
                    Some(v) if c.flagged => format!("{v:.5}*"),
                    Some(v) => format!("{v:.5}"),
                };
                out += &format!("{s:>12}");
            }
            out.push('\n');
        }
        out
    }
}

/// Every cell of the reference grid: `E(ell, p, 1)` in `mode` and
/// `P(ell, 1)`, `P(ell, 2)`, each compared with the reference value.
pub fn table1_with_mode(mode: ExponentMode) -> Result<Table1> {
    let mut cells = Vec::new();
    let rows = TABLE_PRIMES.iter().map(|&p| TableRow::E { p }).chain([TableRow::P { m: 1 }, TableRow::P { m: 2 }]);
    for (i, row) in rows.enumerate() {
        for (j, &ell) in TABLE_ELLS.iter().enumerate() {
            let value = match row {
                TableRow::E { p } if p == ell => None,
                TableRow::E { p } => e_constant(ell, p, 1, mode)?.value,
                TableRow::P { m } => Some(p_constant::<f64>(ell, m)?),
            };
            let reference = REFERENCE_TABLE[i][j];
            let diff = value.zip(reference).map(|(v, r)| v - r);
            let flagged = diff.is_some_and(|d| !(d.abs() <= TABLE_TOLERANCE));
            cells.push(TableCell { row, ell, value, reference, diff, flagged });
        }
    }
    let max_abs_diff = cells.iter().filter_map(|c| c.diff).map(f64::abs).fold(0.0, f64::max);
    let flagged = cells.iter().filter(|c| c.flagged).count();
    Ok(Table1 { mode, cells, max_abs_diff, flagged })
}

pub fn table1() -> Result<Table1> {
    table1_with_mode(ExponentMode::Tabulated)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentBound {
    pub ell: u64,
    pub p: u64,
    pub m: u32,
    pub mode: ExponentMode,
    /// `log10(E S^m)` from the log-domain series.
    pub log10: f64,
    /// `None` on overflow.
    pub value: Option<f64>,
    pub overflow: bool,
    /// Outward-rounded `log10` enclosure from exact arithmetic, when computed.
    pub log10_enclosure: Option<(f64, f64)>,
}

/// Largest `m` for which the exact enclosure is computed.
pub const EXACT_MOMENT_MAX_M: u32 = 4;

fn ln_rational(x: &BigRational) -> f64 {
    let num = x.numer().to_biguint().expect("positive");
    let den = x.denom().to_biguint().expect("positive");
    ln_biguint(&num) - ln_biguint(&den)
}

/// `E(ell, p, m) S(ell, p)^m`.
pub fn moment_bound(ell: u64, p: u64, m: u32, mode: ExponentMode) -> Result<MomentBound> {
    check_ell_p(ell, p)?;
    let e = e_constant(ell, p, m, mode)?;
    let s = s_constant(ell, p)?;
    let ln10 = std::f64::consts::LN_10;
    let log10 = e.log10 + m as f64 * ln_biguint(&s) / ln10;
    let value = 10f64.powf(log10);
    let log10_enclosure = (m <= EXACT_MOMENT_MAX_M).then(|| -> Result<(f64, f64)> {
        let enc = e_enclosure(ell, p, m, mode)?;
        let sm = BigRational::from_integer(BigInt::from(s.pow(m)));
        let lo = ln_rational(&(enc.lower * &sm)) / ln10;
        let hi = ln_rational(&(enc.upper * &sm)) / ln10;
        // the f64 logarithm is accurate to a few ulps
        let pad = 1e-13 * lo.abs().max(1.0);
        Ok((lo - pad, hi + pad))
    });
    Ok(MomentBound {
        ell,
        p,
        m,
        mode,
        log10,
        value: value.is_finite().then_some(value),
        overflow: !value.is_finite(),
        log10_enclosure: log10_enclosure.transpose()?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsRow {
    pub ell: u64,
    pub e: f64,
    /// `(E(ell, p, 1) - p) ell`.
    pub e_scaled: f64,
    /// `(1 - P(ell, 1)) ell`.
    pub p1_scaled: f64,
    /// `(1 - P(ell, 2)) ell^3`.
    pub p2_scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsProbe {
    pub p: u64,
    pub rows: Vec<AsymptoticsRow>,
    /// Per column: no value in the second half of the sweep exceeds the
    /// maximum over the first half.
    pub e_bounded: bool,
    pub p1_bounded: bool,
    pub p2_bounded: bool,
}

/// Scaled error terms across `ells`, skipping `ell = p`.
pub fn asymptotics_probe(p: u64, ells: &[u64]) -> Result<AsymptoticsProbe> {
    let mut rows = Vec::new();
    for &ell in ells.iter().filter(|&&l| l != p) {
        let e = e_constant(ell, p, 1, ExponentMode::Tabulated)?.value.expect("finite");
        let l = ell as f64;
        rows.push(AsymptoticsRow {
            ell,
            e,
            e_scaled: (e - p as f64) * l,
            p1_scaled: (1.0 - p_constant::<f64>(ell, 1)?) * l,
            p2_scaled: (1.0 - p_constant::<f64>(ell, 2)?) * l.powi(3),
        });
    }
    let bounded = |f: fn(&AsymptoticsRow) -> f64| {
        let half = rows.len().div_ceil(2);
        let head = rows[..half].iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        rows[half..].iter().map(f).all(|v| v <= head * (1.0 + 1e-9))
    };
    Ok(AsymptoticsProbe {
        p,
        e_bounded: bounded(|r| r.e_scaled),
        p1_bounded: bounded(|r| r.p1_scaled),
        p2_bounded: bounded(|r| r.p2_scaled),
        rows,
    })
}
