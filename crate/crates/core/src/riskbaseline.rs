//! Schedule risk baselines and the activity risk index.
//!
//! The risk baseline at control time `t` is the variance of the project
//! duration when everything scheduled before `t` ran exactly as planned.
//! Activities finished by `t` are fixed at their planned duration, those not
//! yet started keep their full distribution, and an activity in progress
//! keeps uncertainty only on its remaining fraction.
//!
//! An activity's risk index compares the area under the baseline with the
//! area under the baseline recomputed with that activity made deterministic.
//! All curves share random streams replication by replication.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::DurationDistribution;
use crate::network::{NetworkError, ProjectNetwork};
use crate::scheduler::{PlannedSchedule, ScheduleError};
use crate::simulation::{run_makespans, SimulationConfig, SimulationError};
use crate::stats::{trapezoid, trapezoid_weights, Moments};

/// Control grid resolution when none is given: `SAC / DEFAULT_GRID_INTERVALS`.
pub const DEFAULT_GRID_INTERVALS: usize = 40;
/// Raw indices more negative than this many standard errors are an error.
pub const NOISE_SIGMAS: f64 = 3.0;

#[derive(Debug, Error)]
pub enum RiskError {
    #[error("control time {at} outside [0, {sac}]")]
    AtOutOfRange { at: f64, sac: f64 },
    #[error("invalid control grid: {0}")]
    BadGrid(String),
    #[error("curves do not share one control grid")]
    GridMismatch,
    #[error("ARI undefined: project has no uncertainty")]
    NoUncertainty,
    #[error(
        "activity `{activity}`: risk index {raw:.6} is below the noise floor -{noise_eps:.6}; \
         removing its uncertainty increased the risk area (SRV_0 = {srv_0:.6}, SRV_i = {srv_i:.6})"
    )]
    Inconsistent {
        activity: String,
        raw: f64,
        noise_eps: f64,
        srv_0: f64,
        srv_i: f64,
    },
    #[error(transparent)]
    Simulation(#[from] SimulationError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// How uncertainty shrinks over the remaining part of an activity in
/// progress, with `f` the remaining fraction of its planned duration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// Remaining variance is `f * var` (independent increments).
    ProportionalVariance,
    /// Remaining standard deviation is `f * sd` (fully correlated increments).
    #[default]
    ProportionalSigma,
}

impl Scaling {
    fn dispersion(self, remaining: f64) -> f64 {
        match self {
            Scaling::ProportionalVariance => remaining.sqrt(),
            Scaling::ProportionalSigma => remaining,
        }
    }
}

impl FromStr for Scaling {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "proportional-variance" => Ok(Self::ProportionalVariance),
            "proportional-sigma" => Ok(Self::ProportionalSigma),
            _ => Err(format!(
                "expected `proportional-variance` or `proportional-sigma`, got `{s}`"
            )),
        }
    }
}

impl fmt::Display for Scaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ProportionalVariance => "proportional-variance",
            Self::ProportionalSigma => "proportional-sigma",
        })
    }
}

/// Ascending control times from 0 to SAC, both included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlGrid {
    step: f64,
    points: Vec<f64>,
}

impl ControlGrid {
    /// Evenly spaced points `k * sac / m` with the smallest `m` giving a
    /// spacing of at most `step`.
    pub fn new(sac: f64, step: f64) -> Result<Self, RiskError> {
        if !(sac.is_finite() && sac >= 0.0) {
            return Err(RiskError::BadGrid(format!(
                "SAC must be finite and >= 0 (got {sac})"
            )));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(RiskError::BadGrid(format!(
                "step must be finite and > 0 (got {step})"
            )));
        }
        if sac == 0.0 {
            return Ok(ControlGrid {
                step,
                points: vec![0.0],
            });
        }
        let ratio = sac / step;
        let m = if (ratio - ratio.round()).abs() <= 1e-9 * ratio.max(1.0) {
            ratio.round()
        } else {
            ratio.ceil()
        }
        .max(1.0) as usize;
        let mut points: Vec<f64> = (0..=m).map(|k| k as f64 * sac / m as f64).collect();
        points[m] = sac;
        Ok(ControlGrid { step, points })
    }

    pub fn with_default_step(sac: f64) -> Result<Self, RiskError> {
        let step = if sac > 0.0 {
            sac / DEFAULT_GRID_INTERVALS as f64
        } else {
            1.0
        };
        Self::new(sac, step)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// The network as seen from control time `at`, assuming execution exactly
/// per plan up to then.
pub fn remaining_network_at(
    net: &ProjectNetwork,
    plan: &PlannedSchedule,
    at: f64,
    scaling: Scaling,
) -> Result<ProjectNetwork, RiskError> {
    if !(0.0..=plan.sac).contains(&at) {
        return Err(RiskError::AtOutOfRange { at, sac: plan.sac });
    }
    Ok(net.map_activities(|i, a| {
        let node = i + 1;
        let (es, ef) = (plan.schedule.es[node], plan.schedule.ef[node]);
        let planned = plan.durations.get(node) - a.elapsed;
        let mut out = a.clone();
        if ef <= at {
            out.distribution = DurationDistribution::Deterministic {
                value: a.elapsed + planned,
            };
            out.elapsed = 0.0;
        } else if es < at {
            let remaining = (ef - at) / (ef - es);
            out.elapsed = at - es;
            out.distribution = a
                .distribution
                .affine(remaining * planned, scaling.dispersion(remaining));
        }
        out
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskBaselineCurve {
    /// `srb_0` for the plan, `srb_<id>` with activity `<id>` deterministic.
    pub label: String,
    pub times: Vec<f64>,
    /// Sample variance of the project duration at each control time.
    pub values: Vec<f64>,
}

/// Curve plus the per-replication share of its area, used to estimate the
/// standard error of differences between coupled curves.
struct SampledCurve {
    curve: RiskBaselineCurve,
    area_shares: Vec<f64>,
}

fn deterministic_at_plan(
    net: &ProjectNetwork,
    plan: &PlannedSchedule,
    id: &str,
) -> Result<ProjectNetwork, RiskError> {
    let node = net.node_of(id)?;
    Ok(net.map_activities(|i, a| {
        let mut a = a.clone();
        if i + 1 == node {
            a.distribution = DurationDistribution::Deterministic {
                value: plan.durations.get(node) - a.elapsed,
            };
        }
        a
    }))
}

fn sampled_curve(
    net: &ProjectNetwork,
    deterministic: Option<&str>,
    plan: &PlannedSchedule,
    grid: &ControlGrid,
    config: SimulationConfig,
    scaling: Scaling,
) -> Result<SampledCurve, RiskError> {
    let scenario = match deterministic {
        Some(id) => deterministic_at_plan(net, plan, id)?,
        None => net.clone(),
    };
    let weights = trapezoid_weights(grid.points());
    let n = config.replications;
    let mut values = Vec::with_capacity(grid.points().len());
    let mut area_shares = vec![0.0; n];
    for (&t, &w) in grid.points().iter().zip(&weights) {
        let remaining = remaining_network_at(&scenario, plan, t, scaling)?;
        let pd = run_makespans(&remaining, config)?;
        let m: Moments<f64> = pd.iter().copied().collect();
        values.push(m.variance());
        let scale = w / (n - 1) as f64;
        for (share, x) in area_shares.iter_mut().zip(&pd) {
            *share += scale * (x - m.mean()).powi(2);
        }
    }
    let label = match deterministic {
        Some(id) => format!("srb_{id}"),
        None => "srb_0".to_string(),
    };
    Ok(SampledCurve {
        curve: RiskBaselineCurve {
            label,
            times: grid.points().to_vec(),
            values,
        },
        area_shares,
    })
}

/// Risk baseline, optionally with one activity fixed at its planned duration.
pub fn srb_curve(
    net: &ProjectNetwork,
    deterministic: Option<&str>,
    plan: &PlannedSchedule,
    grid: &ControlGrid,
    config: SimulationConfig,
    scaling: Scaling,
) -> Result<RiskBaselineCurve, RiskError> {
    Ok(sampled_curve(net, deterministic, plan, grid, config, scaling)?.curve)
}

/// Area under a risk baseline (trapezoid rule).
pub fn srv(curve: &RiskBaselineCurve) -> f64 {
    trapezoid(&curve.times, &curve.values)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AriEntry {
    pub id: String,
    pub srv: f64,
    pub ari_raw: f64,
    pub ari_normalized: f64,
    /// Estimated Monte Carlo standard error of `ari_raw`.
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AriReport {
    pub srv_0: f64,
    pub activities: Vec<AriEntry>,
    pub warnings: Vec<String>,
    /// Base curve first, then one per activity in file order.
    #[serde(skip)]
    pub curves: Vec<RiskBaselineCurve>,
}

impl AriReport {
    pub fn get(&self, id: &str) -> Option<&AriEntry> {
        self.activities.iter().find(|e| e.id == id)
    }
}

/// Base baseline, one baseline per activity made deterministic, their areas
/// and the raw and normalized risk indices.
pub fn ari(
    net: &ProjectNetwork,
    plan: &PlannedSchedule,
    grid: &ControlGrid,
    config: SimulationConfig,
    scaling: Scaling,
) -> Result<AriReport, RiskError> {
    let base = sampled_curve(net, None, plan, grid, config, scaling)?;
    let srv_0 = srv(&base.curve);
    if srv_0 <= 0.0 {
        return Err(RiskError::NoUncertainty);
    }
    let n = config.replications as f64;
    let mut curves = vec![base.curve.clone()];
    let mut activities = Vec::with_capacity(net.len());
    let mut warnings = Vec::new();
    for a in net.activities() {
        let scenario = sampled_curve(net, Some(&a.id), plan, grid, config, scaling)?;
        let srv_i = srv(&scenario.curve);
        let diffs: Moments<f64> = base
            .area_shares
            .iter()
            .zip(&scenario.area_shares)
            .map(|(b, s)| n * (b - s))
            .collect();
        let stderr = diffs.sd() / n.sqrt() / srv_0;
        let raw = (srv_0 - srv_i) / srv_0;
        let noise_eps = NOISE_SIGMAS * stderr;
        if raw < 0.0 {
            if raw < -noise_eps {
                return Err(RiskError::Inconsistent {
                    activity: a.id.clone(),
                    raw,
                    noise_eps,
                    srv_0,
                    srv_i,
                });
            }
            warnings.push(format!(
                "activity `{}`: raw risk index {raw:.3e} within noise (3 se = {noise_eps:.3e}); clamped to 0",
                a.id
            ));
        }
        curves.push(scenario.curve);
        activities.push(AriEntry {
            id: a.id.clone(),
            srv: srv_i,
            ari_raw: raw,
            ari_normalized: 0.0,
            stderr,
        });
    }
    let total: f64 = activities.iter().map(|e| e.ari_raw.max(0.0)).sum();
    if total <= 0.0 {
        return Err(RiskError::NoUncertainty);
    }
    for e in &mut activities {
        e.ari_normalized = e.ari_raw.max(0.0) / total;
    }
    Ok(AriReport {
        srv_0,
        activities,
        warnings,
        curves,
    })
}
