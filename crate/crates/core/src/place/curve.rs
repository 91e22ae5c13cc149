use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{factor, is_prime, Cubic, Field, FieldSpec, Place, Poly};

/// Order of `S_3`.
pub const S3_ORDER: u64 = 6;

/// Serialisable description of the twist family `y^ell = F(x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub ell: u64,
    pub field: FieldSpec,
    /// `F` as four coefficient lists in `t`, low to high in `x`.
    pub cubic: Cubic,
    /// Upper bound on the genus of the splitting field; derived when absent.
    #[serde(default)]
    pub genus_l_bound: Option<u64>,
    /// Whether the place at infinity counts as ramified in the genus bound.
    #[serde(default = "default_true")]
    pub include_infinity: bool,
}

fn default_true() -> bool {
    true
}

impl CurveSpec {
    pub fn new(ell: u64, field: FieldSpec, cubic: Cubic) -> Self {
        CurveSpec { ell, field, cubic, genus_l_bound: None, include_infinity: true }
    }

    /// `x^3 + t x + t` over `F_11` with `ell = 5`.
    pub fn example() -> Self {
        CurveSpec::new(5, FieldSpec::prime(11), Cubic::monic(Poly::t(), Poly::t(), Poly::zero()))
    }
}

/// A validated curve with its discriminant and the ramified places.
#[derive(Clone, Debug)]
pub struct CurveConfig {
    spec: CurveSpec,
    field: Field,
    disc: Poly,
    ramified: Vec<Place>,
    genus_l_bound: u64,
}

impl CurveConfig {
    /// Checks `ell >= 5` prime, `q = 1 mod ell`, `p` not in `{2, 3, ell}` and
    /// `disc != 0`, naming every violated hypothesis.
    pub fn new(spec: CurveSpec) -> Result<Self> {
        let mut problems = Vec::new();
        let ell = spec.ell;
        if ell < 5 || !is_prime(ell) {
            problems.push(format!("ell = {ell} must be a prime >= 5"));
        }
        let p = spec.field.p;
        if [2, 3, ell].contains(&p) {
            problems.push(format!("characteristic p = {p} must avoid 2, 3 and ell"));
        }
        let field = match Field::new(spec.field.clone()) {
            Ok(f) => Some(f),
            Err(e) => {
                problems.push(e.to_string());
                None
            }
        };
        if let Some(f) = &field {
            if ell >= 2 && (f.q() - 1) % ell != 0 {
                problems.push(format!("q = {} is not 1 mod ell = {ell}", f.q()));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems.join("; ")));
        }
        let field = field.expect("checked above");
        if spec.cubic.coeffs().iter().flat_map(|c| c.coeffs()).any(|&c| c >= field.q()) {
            return Err(Error::Config("cubic coefficients must lie in [0, q)".into()));
        }
        let disc = spec.cubic.discriminant(&field);
        if disc.is_zero() {
            return Err(Error::Inseparable);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let ramified: Vec<Place> = factor(&field, &disc, &mut rng)?
            .factors
            .into_iter()
            .map(|(g, _)| Place::new_unchecked(g))
            .collect();
        let genus_l_bound = spec
            .genus_l_bound
            .unwrap_or_else(|| default_genus_l_bound(disc.deg() as u64, spec.include_infinity));
        Ok(CurveConfig { spec, field, disc, ramified, genus_l_bound })
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn ell(&self) -> u64 {
        self.spec.ell
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn cubic(&self) -> &Cubic {
        &self.spec.cubic
    }

    pub fn disc(&self) -> &Poly {
        &self.disc
    }

    /// Distinct monic irreducible factors of the discriminant.
    pub fn ramified_places(&self) -> &[Place] {
        &self.ramified
    }

    pub fn genus_l_bound(&self) -> u64 {
        self.genus_l_bound
    }
}

/// `1 - |G| + (|G|/2)(deg disc + [infinity])` for `G = S_3`, clamped at 0.
///
/// Riemann-Hurwitz with every ramification index at most `|G|` and tame,
/// counting each ramified place by its degree.
pub fn default_genus_l_bound(disc_degree: u64, include_infinity: bool) -> u64 {
    let places = disc_degree + include_infinity as u64;
    (1 + (S3_ORDER / 2) * places).saturating_sub(S3_ORDER)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum S3Certificate {
    Certified,
    Failed(String),
}

impl S3Certificate {
    pub fn is_certified(&self) -> bool {
        matches!(self, S3Certificate::Certified)
    }
}

/// Certifies that the splitting field of `F` over `F_q(t)` has group `S_3`:
/// `F` has no root in `F_q[t]` and `disc` is not a square.
pub fn certify_s3(curve: &CurveConfig) -> Result<S3Certificate> {
    let field = curve.field();
    let cubic = curve.cubic();
    let disc = curve.disc();
    if disc.is_zero() {
        return Err(Error::Inseparable);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let a0 = cubic.coeff(0);
    if a0.is_zero() {
        return Ok(S3Certificate::Failed("x = 0 is a root".into()));
    }
    // a root of a monic cubic divides a0
    let fac = factor(field, a0, &mut rng)?;
    let mut divisors = vec![Poly::one()];
    for (g, m) in &fac.factors {
        let mut next = Vec::new();
        for d in &divisors {
            let mut acc = d.clone();
            for _ in 0..=*m {
                next.push(acc.clone());
                acc = acc.mul(g, field);
            }
        }
        divisors = next;
    }
    for d in &divisors {
        for u in 1..field.q() {
            let r = d.scale(u, field);
            if cubic.eval(&r, field).is_zero() {
                return Ok(S3Certificate::Failed(format!("x = {r} is a root")));
            }
        }
    }
    let dfac = factor(field, disc, &mut rng)?;
    let square = dfac.factors.iter().all(|(_, m)| m % 2 == 0) && field.is_square(dfac.unit);
    if square {
        return Ok(S3Certificate::Failed(format!("discriminant {disc} is a square")));
    }
    Ok(S3Certificate::Certified)
}
