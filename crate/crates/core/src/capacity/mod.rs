//! Retrieval capacity: the p_corr detection integral, Monte Carlo detection
//! statistics, and the concentration and sequence recovery experiments.

mod concentration;
mod pcorr;
mod recovery;

pub use concentration::{run_concentration_experiment, ConcentrationConfig, ConcentrationFit, ConcentrationSample, ConcentrationTable};
pub use pcorr::{pcorr_analytic, DetectionStats, Scenario, MIN_SIGMA};
pub use recovery::{
    detection_score, estimate_detection_stats, run_sequence_recovery_experiment, CapacityCurve, CapacityPoint, RecoveryConfig,
    MIN_STATS_TRIALS,
};
