//! Continuous-time entropy-driven dynamics.
//!
//! The score-space field `ż = η(Δu(Q(z)) − T z)` is unconstrained and is the
//! default integration target; the strategy-space field
//! `ẋ = η h^{-1}(Δu − T z)` is the same flow pushed through the choice map.

mod diagnostics;
mod fields;
mod integrate;
mod spec;

pub use diagnostics::{
    classify_eigenvalues, classify_rest_point, classify_scores, escape_depth, free_energy,
    rate_check, vertex_attracts, zd_divergence, zd_jacobian, RateReport, RestPointClass, Stability,
    DIVERGENCE_STEP, HYPERBOLIC_TOL, JACOBIAN_STEP,
};
pub use fields::{
    choice_profile, ed_field, field_norm, relative_scores, score_field, trd_field, zd_field,
    zd_field_at, zd_jacobian_exact,
};
pub use integrate::{
    integrate, integrate_scores, integrate_with, Diagnostic, IntegrateOptions, Representation,
    Trajectory, TrajectoryStatus, DEFAULT_DT, REST_TOL, STRATEGY_FLOOR, VERTEX_CAP,
};
pub use spec::DynamicsSpec;
