use num_rational::BigRational;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::place::PlaceClass;
use crate::scalar::{ratio_string, Scalar};

/// Law of the rank change `j` at a place of the given class with current
/// rank `r`, as printed in the local Selmer table.
pub fn dtable<S: Scalar>(ell: u64, r: u32, class: PlaceClass) -> Result<Vec<(i32, S)>> {
    let l = S::from_u64(ell).expect("small ell");
    let lr = S::recip_pow(ell, r);
    let l2r = S::recip_pow(ell, 2 * r);
    Ok(match class {
        PlaceClass::P0 => vec![(0, S::one())],
        PlaceClass::P1 => vec![(-1, S::one() - lr.clone()), (1, lr)],
        PlaceClass::P2 => {
            let down = S::one() - (l.clone() + S::one()) * lr.clone() + l.clone() * l2r.clone();
            let stay = (l + S::one()) * (lr - l2r.clone());
            vec![(-2, down), (0, stay), (2, l2r)]
        }
        PlaceClass::Ramified => return Err(Error::Domain("no table row for ramified places".into())),
    })
}

/// Exact two-step law of `M_ell` from `r`: changes `-2, 0, +2`.
pub fn two_step_law<S: Scalar>(ell: u64, r: u32) -> [(i32, S); 3] {
    let lr = S::recip_pow(ell, r);
    let down1 = S::one() - lr.clone();
    let dd = if r == 0 { S::zero() } else { down1.clone() * (S::one() - S::recip_pow(ell, r - 1)) };
    let du = if r == 0 { S::zero() } else { down1 * S::recip_pow(ell, r - 1) };
    let ud = lr.clone() * (S::one() - S::recip_pow(ell, r + 1));
    let uu = lr * S::recip_pow(ell, r + 1);
    [(-2, dd), (0, du + ud), (2, uu)]
}

fn ser_triple<Z: Serializer>(v: &[BigRational; 3], s: Z) -> std::result::Result<Z::Ok, Z::Error> {
    v.iter().map(ratio_string).collect::<Vec<_>>().serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DTableDiffRow {
    pub r: u32,
    /// Cells `j = -2, 0, +2`.
    #[serde(serialize_with = "ser_triple")]
    pub printed: [BigRational; 3],
    #[serde(serialize_with = "ser_triple")]
    pub two_step: [BigRational; 3],
    /// `printed - two_step`.
    #[serde(serialize_with = "ser_triple")]
    pub diff: [BigRational; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DTableComparison {
    pub ell: u64,
    pub rows: Vec<DTableDiffRow>,
    /// Cells `j` where some row differs.
    pub nonzero_cells: Vec<i32>,
    /// Cells `j` identical in every row.
    pub zero_cells: Vec<i32>,
}

/// Cellwise comparison of the printed `P2` row with the two-step law for
/// `r = 0..=r_max`, in exact rationals.
pub fn compare_dtable_vs_two_step(ell: u64, r_max: u32) -> Result<DTableComparison> {
    if r_max < 2 {
        return Err(Error::Domain("r_max must be at least 2".into()));
    }
    let mut rows = Vec::new();
    for r in 0..=r_max {
        let printed = dtable::<BigRational>(ell, r, PlaceClass::P2)?;
        let printed: [BigRational; 3] = [printed[0].1.clone(), printed[1].1.clone(), printed[2].1.clone()];
        let two = two_step_law::<BigRational>(ell, r).map(|(_, p)| p);
        let diff = [0, 1, 2].map(|i| printed[i].clone() - two[i].clone());
        rows.push(DTableDiffRow { r, printed, two_step: two, diff });
    }
    let cells = [-2, 0, 2];
    let differs = |i: usize| rows.iter().any(|row: &DTableDiffRow| !row.diff[i].is_zero());
    Ok(DTableComparison {
        ell,
        nonzero_cells: (0..3).filter(|&i| differs(i)).map(|i| cells[i]).collect(),
        zero_cells: (0..3).filter(|&i| !differs(i)).map(|i| cells[i]).collect(),
        rows,
    })
}
