//! Rank-state Markov operators, their stationary laws, convergence rates,
//! the local transition table and the alpha exponent.

mod dist;
mod dtable;
mod op;
mod pr;
mod spectral;

pub use dist::{parity, RankDist, MASS_TOLERANCE};
pub use dtable::{compare_dtable_vs_two_step, dtable, two_step_law, DTableComparison, DTableDiffRow};
pub use op::{apply, m_ell2_row, m_ell_row, MarkovOp, TailPolicy};
pub use pr::{
    normalization, parity_weighted_pr, partial_product, pr_distribution, pr_ratios, pr_weights, product_cutoff,
    PR_TAIL_TOLERANCE,
};
pub use spectral::{
    alpha_exponent, alpha_objective, estimate_gamma, fit_slope, fitted_rate, stationary_on_class, tv_decay,
    AlphaResult, GammaEstimate, GammaSign, GAMMA_AGREEMENT,
};
