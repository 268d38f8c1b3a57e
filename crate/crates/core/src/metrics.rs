//! Classical activity sensitivity indices computed from a simulation batch,
//! and competition ranking.
//!
//! All per-activity vectors are in file order of the real activities.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::ProjectNetwork;
use crate::scalar::Scalar;
use crate::simulation::SimulationBatch;
use crate::stats::{kendall_tau_a, mean, pearson, spearman};

pub const DEFAULT_TIE_EPS: f64 = 1e-3;
pub const DEFAULT_MOI_MIN_DENOMINATOR: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("expected project duration is zero; significance index undefined")]
    ZeroMeanDuration,
    #[error("project duration has zero spread; schedule sensitivity index undefined")]
    ZeroDurationSpread,
    #[error("no activity has duration spread; management-oriented index undefined")]
    NoActivitySpread,
    #[error("batch is empty")]
    EmptyBatch,
}

/// Which successors count towards an activity's post density.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuccessorCount {
    Transitive,
    #[default]
    Immediate,
}

impl FromStr for SuccessorCount {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "transitive" => Ok(Self::Transitive),
            "immediate" => Ok(Self::Immediate),
            _ => Err(format!("expected `transitive` or `immediate`, got `{s}`")),
        }
    }
}

impl fmt::Display for SuccessorCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Transitive => "transitive",
            Self::Immediate => "immediate",
        })
    }
}

/// Fraction of replications in which the activity's total float is zero.
pub fn criticality_index(batch: &SimulationBatch, eps: f64) -> Vec<f64> {
    let n = batch.len() as f64;
    (0..batch.ids.len())
        .map(|i| {
            let hits = batch
                .records
                .iter()
                .filter(|r| r.total_float[i + 1].abs() <= eps)
                .count();
            hits as f64 / n
        })
        .collect()
}

fn cruciality(batch: &SimulationBatch, corr: impl Fn(&[f64], &[f64]) -> Option<f64>) -> Vec<f64> {
    let pd = batch.project_durations();
    (0..batch.ids.len())
        .map(|i| corr(&batch.durations_of(i), &pd).map_or(0.0, |r| r.abs().min(1.0)))
        .collect()
}

/// `|corr(d_i, PD)|`; zero when either series is constant.
pub fn cruciality_pearson(batch: &SimulationBatch) -> Vec<f64> {
    cruciality(batch, pearson)
}

pub fn cruciality_spearman(batch: &SimulationBatch) -> Vec<f64> {
    cruciality(batch, spearman)
}

/// Kendall tau-a without tie correction.
pub fn cruciality_kendall(batch: &SimulationBatch) -> Vec<f64> {
    cruciality(batch, kendall_tau_a)
}

/// Mean over replications of `d / (d + tf) * PD / E(PD)`.
pub fn significance_index(batch: &SimulationBatch) -> Result<Vec<f64>, MetricsError> {
    if batch.is_empty() {
        return Err(MetricsError::EmptyBatch);
    }
    let mean_pd = batch.project_duration_stats.mean();
    if mean_pd <= 0.0 {
        return Err(MetricsError::ZeroMeanDuration);
    }
    Ok((0..batch.ids.len())
        .map(|i| {
            let terms: Vec<f64> = batch
                .records
                .iter()
                .map(|r| {
                    let d = r.durations.get(i + 1);
                    let span = d + r.total_float[i + 1];
                    let share = if span > 0.0 { d / span } else { 0.0 };
                    share * r.project_duration / mean_pd
                })
                .collect();
            mean(&terms)
        })
        .collect())
}

/// `CI * sd(d_i) / sd(PD)` with sample standard deviations.
pub fn schedule_sensitivity_index(
    batch: &SimulationBatch,
    ci: &[f64],
) -> Result<Vec<f64>, MetricsError> {
    let sd_pd = batch.project_duration_stats.sd();
    if sd_pd <= 0.0 {
        return Err(MetricsError::ZeroDurationSpread);
    }
    Ok(ci
        .iter()
        .zip(&batch.duration_stats)
        .map(|(c, m)| c * m.sd() / sd_pd)
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoiResult {
    pub values: Vec<f64>,
    pub warnings: Vec<String>,
}

/// `sd_i / (sd_max * (E(TF_i) - post_density_i + 1))`, with `sd_i` taken
/// from the activity's distribution and `post_density_i` the successor count
/// over the number of real activities.
pub fn management_oriented_index(
    net: &ProjectNetwork,
    batch: &SimulationBatch,
    successors: SuccessorCount,
    min_denominator: f64,
) -> Result<MoiResult, MetricsError> {
    let sds: Vec<f64> = net
        .activities()
        .iter()
        .map(|a| a.distribution.sd())
        .collect();
    let sd_max = sds.iter().copied().fold(0.0, f64::max);
    if sd_max <= 0.0 {
        return Err(MetricsError::NoActivitySpread);
    }
    let n = net.len() as f64;
    let mut warnings = Vec::new();
    let values = net
        .activities()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let count = match successors {
                SuccessorCount::Transitive => net.transitive_successor_count(&a.id),
                SuccessorCount::Immediate => net.immediate_successor_count(&a.id),
            }
            .expect("activity belongs to network");
            let post_density = count as f64 / n;
            let factor = batch.float_stats[i].mean() - post_density + 1.0;
            if factor < min_denominator {
                warnings.push(format!(
                    "MOI for `{}`: denominator factor {factor:.6} below {min_denominator}; using sd_i / sd_max",
                    a.id
                ));
                sds[i] / sd_max
            } else {
                sds[i] / (sd_max * factor)
            }
        })
        .collect();
    Ok(MoiResult { values, warnings })
}

/// Competition ranks (1 = most important, higher value first). A value
/// within `tie_eps` of the best value in the current tie group joins that
/// group; the next group's rank skips past the group size. NaN ranks last.
pub fn rank_activities<T: Scalar>(values: &[T], tie_eps: T) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| match (values[a].is_nan(), values[b].is_nan()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        _ => values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal),
    });
    let mut ranks = vec![0; values.len()];
    let mut leader: Option<(T, usize)> = None;
    for (pos, &i) in idx.iter().enumerate() {
        let v = values[i];
        let rank = match leader {
            Some((lv, r)) if (lv - v).abs() <= tie_eps || (lv.is_nan() && v.is_nan()) => r,
            _ => {
                leader = Some((v, pos + 1));
                pos + 1
            }
        };
        ranks[i] = rank;
    }
    ranks
}

/// Which indices to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSelection {
    pub ci: bool,
    pub cri: bool,
    pub si: bool,
    pub ssi: bool,
    pub moi: bool,
    pub ari: bool,
}

impl Default for MetricSelection {
    fn default() -> Self {
        MetricSelection {
            ci: true,
            cri: true,
            si: true,
            ssi: true,
            moi: true,
            ari: true,
        }
    }
}

impl MetricSelection {
    pub fn none() -> Self {
        MetricSelection {
            ci: false,
            cri: false,
            si: false,
            ssi: false,
            moi: false,
            ari: false,
        }
    }

    pub fn needs_batch(&self) -> bool {
        self.ci || self.cri || self.si || self.ssi || self.moi
    }
}

impl FromStr for MetricSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let mut sel = MetricSelection::none();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "ci" => sel.ci = true,
                "cri" => sel.cri = true,
                "si" => sel.si = true,
                "ssi" => sel.ssi = true,
                "moi" => sel.moi = true,
                "ari" => sel.ari = true,
                "all" => sel = MetricSelection::default(),
                other => return Err(format!("unknown metric `{other}`")),
            }
        }
        if sel == MetricSelection::none() {
            return Err("no metrics selected".into());
        }
        Ok(sel)
    }
}

impl fmt::Display for MetricSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.ci, "ci"),
            (self.cri, "cri"),
            (self.si, "si"),
            (self.ssi, "ssi"),
            (self.moi, "moi"),
            (self.ari, "ari"),
        ]
        .into_iter()
        .filter_map(|(on, n)| on.then_some(n))
        .collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub float_eps: f64,
    pub successors: SuccessorCount,
    pub moi_min_denominator: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            float_eps: crate::scheduler::DEFAULT_FLOAT_EPS,
            successors: SuccessorCount::default(),
            moi_min_denominator: DEFAULT_MOI_MIN_DENOMINATOR,
        }
    }
}

/// Selected indices per real activity; unselected ones are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsReport {
    pub ids: Vec<String>,
    pub ci: Option<Vec<f64>>,
    pub cri_pearson: Option<Vec<f64>>,
    pub cri_spearman: Option<Vec<f64>>,
    pub cri_kendall: Option<Vec<f64>>,
    pub si: Option<Vec<f64>>,
    pub ssi: Option<Vec<f64>>,
    pub moi: Option<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl MetricsReport {
    /// `(column name, values)` in report column order, selected only.
    pub fn columns(&self) -> Vec<(&'static str, &[f64])> {
        [
            ("ci", &self.ci),
            ("cri_pearson", &self.cri_pearson),
            ("cri_spearman", &self.cri_spearman),
            ("cri_kendall", &self.cri_kendall),
            ("si", &self.si),
            ("ssi", &self.ssi),
            ("moi", &self.moi),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.as_deref().map(|v| (n, v)))
        .collect()
    }
}

pub fn compute_metrics(
    net: &ProjectNetwork,
    batch: &SimulationBatch,
    config: &MetricsConfig,
    selection: MetricSelection,
) -> Result<MetricsReport, MetricsError> {
    let mut report = MetricsReport {
        ids: batch.ids.clone(),
        ..Default::default()
    };
    let ci = criticality_index(batch, config.float_eps);
    if selection.cri {
        report.cri_pearson = Some(cruciality_pearson(batch));
        report.cri_spearman = Some(cruciality_spearman(batch));
        report.cri_kendall = Some(cruciality_kendall(batch));
    }
    if selection.si {
        report.si = Some(significance_index(batch)?);
    }
    if selection.ssi {
        report.ssi = Some(schedule_sensitivity_index(batch, &ci)?);
    }
    if selection.moi {
        let moi =
            management_oriented_index(net, batch, config.successors, config.moi_min_denominator)?;
        report.moi = Some(moi.values);
        report.warnings.extend(moi.warnings);
    }
    if selection.ci {
        report.ci = Some(ci);
    }
    Ok(report)
}
