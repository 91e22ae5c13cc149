use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::is_prime;

pub type Mat2 = [[u64; 2]; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct S3Element {
    pub name: String,
    pub matrix: Mat2,
    pub order: u64,
    pub fixed_dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct S3Report {
    pub ell: u64,
    pub elements: Vec<S3Element>,
    /// Closed under multiplication, six distinct elements, nonabelian.
    pub is_s3: bool,
    pub scalar_centralizer: bool,
    pub no_invariant_line: bool,
    /// Fixed-space dimensions equal `(2, 1, 1, 1, 0, 0)`.
    pub fixed_dims_expected: bool,
    pub pass: bool,
}

fn mul(a: &Mat2, b: &Mat2, l: u64) -> Mat2 {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = (a[i][0] * b[0][j] + a[i][1] * b[1][j]) % l;
        }
    }
    c
}

fn order(m: &Mat2, l: u64) -> u64 {
    let id = [[1, 0], [0, 1]];
    let mut acc = *m;
    let mut k = 1;
    while acc != id {
        acc = mul(&acc, m, l);
        k += 1;
    }
    k
}

/// `2 - rank(M - I)` over `F_ell`.
fn fixed_dim(m: &Mat2, l: u64) -> usize {
    let a = (m[0][0] + l - 1) % l;
    let d = (m[1][1] + l - 1) % l;
    let (b, c) = (m[0][1], m[1][0]);
    if a == 0 && b == 0 && c == 0 && d == 0 {
        2
    } else if (a * d % l + l - b * c % l) % l == 0 {
        1
    } else {
        0
    }
}

/// The six matrices of the `S_3` action on `F_ell^2`.
pub fn s3_matrices(ell: u64) -> Vec<(&'static str, Mat2)> {
    let m = ell - 1;
    vec![
        ("id", [[1, 0], [0, 1]]),
        ("(12)", [[m, m], [0, 1]]),
        ("(13)", [[1, 0], [m, m]]),
        ("(23)", [[0, 1], [1, 0]]),
        ("(123)", [[m, m], [1, 0]]),
        ("(132)", [[0, 1], [m, m]]),
    ]
}

/// Verifies the group structure, simplicity and centralizer of the `S_3`
/// representation over `F_ell` and reports each element's fixed space.
pub fn s3_representation_checks(ell: u64) -> Result<S3Report> {
    if ell < 5 || !is_prime(ell) {
        return Err(Error::InvalidEll(ell));
    }
    let l = ell;
    let mats = s3_matrices(ell);
    let set: Vec<Mat2> = mats.iter().map(|(_, m)| *m).collect();
    let distinct = (0..6).all(|i| (i + 1..6).all(|j| set[i] != set[j]));
    let closed = set.iter().all(|a| set.iter().all(|b| set.contains(&mul(a, b, l))));
    let nonabelian = set.iter().any(|a| set.iter().any(|b| mul(a, b, l) != mul(b, a, l)));
    let is_s3 = distinct && closed && nonabelian;

    let mut scalar_centralizer = true;
    for x in 0..l.pow(4) {
        let m = [[x % l, x / l % l], [x / l.pow(2) % l, x / l.pow(3)]];
        if set.iter().all(|a| mul(a, &m, l) == mul(&m, a, l)) && !(m[0][1] == 0 && m[1][0] == 0 && m[0][0] == m[1][1]) {
            scalar_centralizer = false;
            break;
        }
    }

    // lines spanned by (1, a) and (0, 1)
    let lines: Vec<[u64; 2]> = (0..l).map(|a| [1, a]).chain(std::iter::once([0, 1])).collect();
    let invariant = |v: &[u64; 2], m: &Mat2| {
        let w = [(m[0][0] * v[0] + m[0][1] * v[1]) % l, (m[1][0] * v[0] + m[1][1] * v[1]) % l];
        (w[0] * v[1] % l + l - w[1] * v[0] % l) % l == 0
    };
    let no_invariant_line = lines.iter().all(|v| set.iter().any(|m| !invariant(v, m)));

    let elements: Vec<S3Element> = mats
        .iter()
        .map(|(name, m)| S3Element { name: name.to_string(), matrix: *m, order: order(m, l), fixed_dim: fixed_dim(m, l) })
        .collect();
    let fixed_dims_expected = elements.iter().map(|e| e.fixed_dim).eq([2, 1, 1, 1, 0, 0]);
    let orders_ok = elements.iter().map(|e| e.order).eq([1, 2, 2, 2, 3, 3]);
    let pass = is_s3 && orders_ok && scalar_centralizer && no_invariant_line && fixed_dims_expected;
    Ok(S3Report { ell, elements, is_s3, scalar_centralizer, no_invariant_line, fixed_dims_expected, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checks_pass_for_small_primes() {
        for ell in [5, 7, 11, 13, 17] {
            let r = s3_representation_checks(ell).unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(s3_representation_checks(3).is_err());
        assert!(s3_representation_checks(2).is_err());
    }

    #[test]
    fn transposition_fixes_diagonal() {
        let m = s3_matrices(5)[3].1;
        assert_eq!(mul(&m, &[[1, 0], [1, 0]], 5), [[1, 0], [1, 0]]);
        assert_eq!(fixed_dim(&m, 5), 1);
        assert_eq!(fixed_dim(&s3_matrices(5)[4].1, 5), 0);
    }
}
