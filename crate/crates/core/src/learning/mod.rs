//! Payoff-based learning in discrete time.
//!
//! Three learners are provided: score-based learning, where players reinforce
//! the score of the action they played and choose through the entropy's
//! choice map; strategy-based learning, where players move their mixed
//! strategies directly with an unbiased estimate of the entropy-driven field;
//! and its asynchronous variant with random revision sets and delayed
//! payoffs. All randomness comes from counter-based substreams, so runs are
//! reproducible and replicates can be executed in parallel.

pub mod noise;
pub mod revision;
pub mod rng;
pub mod run;
pub mod schedule;
pub mod stats;
pub mod update;

pub use noise::NoiseModel;
pub use revision::{DelayModel, RevisionProcess};
pub use run::{
    dirichlet_profile, run_async_learner, run_score_learner, run_strategy_learner, LearnerOptions,
    LearnerRun, RecordMode, RunStatus, StepRecord, NEGATIVE_TOL, SCORE_BLOWUP, SUM_TOL,
};
pub use schedule::StepSchedule;
pub use stats::{
    bootstrap_monotone, convergence_stats, density_grid, distance_to_set, ConvergenceSummary,
    MonotonicityReport, DENSITY_GRID,
};
pub use update::{
    decrement_bound, gibbs_increment, score_increment, step_bound, step_bound_for_payoffs,
    strategy_increment,
};
