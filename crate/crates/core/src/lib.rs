//! Monte Carlo schedule risk analysis for activity-on-node project networks.
//!
//! The crate computes the classical activity sensitivity indices
//! (criticality, cruciality, significance, schedule sensitivity and
//! management-oriented indices) from a seeded simulation batch, and the
//! activity risk index from schedule risk baselines: curves of project
//! duration variance over control time, assuming execution per plan.
//!
//! The CPM engine and the statistics kernels are generic over [`Scalar`]
//! (`f32` or `f64`); the simulation pipeline runs in `f64`, and the aliases
//! below name the concrete types it uses.

pub mod distribution;
pub mod fixtures;
pub mod metrics;
pub mod network;
pub mod riskbaseline;
pub mod scalar;
pub mod scheduler;
pub mod simulation;
pub mod stats;

pub use distribution::{Determinize, DurationDistribution};
pub use metrics::{
    compute_metrics, rank_activities, MetricSelection, MetricsConfig, MetricsReport, SuccessorCount,
};
pub use network::{
    parse_project, parse_project_unchecked, Activity, NetworkError, ProjectNetwork,
    ValidationReport,
};
pub use riskbaseline::{
    ari, srb_curve, srv, AriReport, ControlGrid, RiskBaselineCurve, RiskError, Scaling,
};
pub use scalar::Scalar;
pub use scheduler::{planned_schedule, PlannedSchedule};
pub use simulation::{run_batch, run_scenarios, SimulationBatch, SimulationConfig};

/// Node-indexed durations in double precision.
pub type Durations = scheduler::DurationVector<f64>;
/// CPM result in double precision.
pub type Schedule = scheduler::ScheduleResult<f64>;
/// Streaming sample moments in double precision.
pub type SampleMoments = stats::Moments<f64>;
