mod experiment;
mod omega;
mod thresholds;
mod walk;

pub use experiment::{
    p2_kernel_step, rao_blackwell_prediction, run_experiment, ClassCounts, FhatSummary, SimReport, REPORT_R_MAX,
};
pub use omega::omega_distribution;
pub use thresholds::{deviation_bound, frak_n, m_nq, DeviationBound};
pub use walk::{fhat_census, rank_walk, FhatStats, RunOptions, SimConfig, TransitionMode, WalkRecord, Walker};
