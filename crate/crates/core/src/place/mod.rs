//! Frobenius classes of places for an `S_3` cubic, density censuses, the
//! `S_3` representation checks and effective Chebotarev bounds.

mod census;
mod classify;
mod curve;
mod s3;

pub use census::{
    chebotarev_audit, chebotarev_bound, chebotarev_ratio_bound, classify_degree, density_census, AuditRow,
    ChebotarevAudit, ClassCounts, DegreeCensus, DensityCensus, DensityRow, RatioBound,
};
pub use classify::{classify_place, count_roots, count_roots_direct, frob_class, FrobClass, PlaceClass};
pub use curve::{certify_s3, default_genus_l_bound, CurveConfig, CurveSpec, S3Certificate, S3_ORDER};
pub use s3::{s3_matrices, s3_representation_checks, Mat2, S3Element, S3Report};
