//! Quantal response equilibria, their continuation in the rationality level,
//! Nash equilibria of small games and temperature scans.
//!
//! At learning temperature `T > 0` the rest points of the entropic dynamics
//! are exactly the QRE at rationality `ϱ = 1/T`.

mod nash;
mod path;
mod qre;
mod scan;

pub use nash::{
    deviation_gap, is_pure_nash, is_strict_nash, nash_enumerate_small, NashSet, MAX_PURE_PROFILES,
};
pub use path::{qre_path, PathStatus, QPath, MIN_PATH_STEP};
pub use qre::{
    newton_rest_point, qre_map, qre_newton, qre_residual, qre_solve, restricted_qre, QrePoint,
    DAMPING_FLOOR, DAMPING_START, NEWTON_REST_ITERS, QRE_MAX_ITERS, QRE_TOL,
};
pub use scan::{
    bifurcation_scan, interior_rest_points, probe_depth, probe_vertex, scan_temperature,
    vertex_scores, BifurcationScan, CriticalMethod, CriticalTemperature, RestPointKind, ScanEntry,
    ScanRestPoint, CRITICAL_TOL, DEDUP_RADIUS, SEED_GRID,
};
