mod claims;
mod series;
mod table;

pub use claims::{
    p_lower, threshold, verify_all_claims, verify_claims, worst_case_tail_upper, Claim, ClaimMapping, ClaimReport,
};
pub use series::{
    bounded_sums, check_ell, check_ell_p, e_constant, e_enclosure, e_rho, ln_biguint, normalization_bounds,
    p_constant, p_rho, point_bound, round_down, round_up, s_constant, EEnclosure, EValue, ExponentMode, ParitySums,
    SERIES_CUTOFF,
};
pub use table::{
    asymptotics_probe, moment_bound, table1, table1_with_mode, AsymptoticsProbe, AsymptoticsRow, MomentBound, Table1,
    TableCell, TableRow, EXACT_MOMENT_MAX_M, REFERENCE_TABLE, TABLE_ELLS, TABLE_PRIMES, TABLE_TOLERANCE,
};
