//! Arithmetic in `F_q` and `F_q[t]`: factorization, irreducibility,
//! counting and enumeration of monic polynomials.

mod count;
mod cubic;
mod factor;
mod field;
mod place;
mod poly;

pub use count::{
    count_monic_irreducibles, count_monic_irreducibles_u64, enumerate_monic, enumerate_monic_range,
    monic_count, par_fold_monic, sample_monic, MonicFilter, MonicIter, DEFAULT_BUDGET,
};
pub use cubic::{discriminant_cubic, Cubic};
pub use factor::{
    distinct_degree_factorization, equal_degree_factorization, factor, is_irreducible,
    squarefree_decomposition, Factorization,
};
pub use field::{field_arith, is_prime, prime_divisors, Field, FieldElem, FieldOp, FieldSpec};
pub use place::{Place, ResidueField};
pub use poly::{poly_arith, Poly, PolyOp};
