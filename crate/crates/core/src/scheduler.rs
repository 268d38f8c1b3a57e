//! Critical path method: forward and backward passes, total floats and the
//! planned schedule at deterministic durations.

use std::collections::HashMap;

use thiserror::Error;

use crate::distribution::Determinize;
use crate::network::{NetworkError, ProjectNetwork};
use crate::scalar::Scalar;

/// Default absolute tolerance for classifying a float as zero.
pub const DEFAULT_FLOAT_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("no duration given for activity `{0}`")]
    MissingDuration(String),
    #[error("activity `{id}`: duration must be finite and >= 0 (got {value})")]
    BadDuration { id: String, value: f64 },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Durations indexed by network node; the virtual start and end are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DurationVector<T>(Vec<T>);

impl<T: Scalar> DurationVector<T> {
    /// From per-activity durations in file order.
    pub fn from_activity_order(
        net: &ProjectNetwork,
        durations: &[T],
    ) -> Result<Self, ScheduleError> {
        if let Some(a) = net.activities().get(durations.len()) {
            return Err(ScheduleError::MissingDuration(a.id.clone()));
        }
        let mut nodes = Vec::with_capacity(net.node_count());
        nodes.push(T::zero());
        nodes.extend_from_slice(&durations[..net.len()]);
        nodes.push(T::zero());
        Self::check(net, &nodes)?;
        Ok(DurationVector(nodes))
    }

    pub fn from_map(
        net: &ProjectNetwork,
        durations: &HashMap<String, T>,
    ) -> Result<Self, ScheduleError> {
        let ordered = net
            .activities()
            .iter()
            .map(|a| {
                durations
                    .get(&a.id)
                    .copied()
                    .ok_or_else(|| ScheduleError::MissingDuration(a.id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_activity_order(net, &ordered)
    }

    /// Node-indexed durations, unchecked apart from length.
    pub(crate) fn from_nodes_unchecked(nodes: Vec<T>) -> Self {
        DurationVector(nodes)
    }

    fn check(net: &ProjectNetwork, nodes: &[T]) -> Result<(), ScheduleError> {
        for (node, &d) in nodes.iter().enumerate() {
            if !(d.is_finite() && d >= T::zero()) {
                return Err(ScheduleError::BadDuration {
                    id: net.node_id(node).to_string(),
                    value: d.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[T] {
        &self.0
    }

    pub fn get(&self, node: usize) -> T {
        self.0[node]
    }
}

/// Earliest start and finish per node.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardPass<T> {
    pub es: Vec<T>,
    pub ef: Vec<T>,
    pub project_duration: T,
}

/// Latest start and finish per node.
#[derive(Clone, Debug, PartialEq)]
pub struct BackwardPass<T> {
    pub ls: Vec<T>,
    pub lf: Vec<T>,
}

/// Full CPM result, node-indexed.
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleResult<T> {
    pub es: Vec<T>,
    pub ef: Vec<T>,
    pub ls: Vec<T>,
    pub lf: Vec<T>,
    pub total_float: Vec<T>,
    pub project_duration: T,
}

fn check_len<T>(net: &ProjectNetwork, d: &DurationVector<T>) -> Result<(), ScheduleError> {
    if d.0.len() != net.node_count() {
        let missing = net.node_id(d.0.len().min(net.node_count() - 1)).to_string();
        return Err(ScheduleError::MissingDuration(missing));
    }
    Ok(())
}

/// Longest path length from the virtual start, with `ef` as scratch.
pub(crate) fn makespan_into<T: Scalar>(
    order: &[usize],
    net: &ProjectNetwork,
    d: &[T],
    ef: &mut Vec<T>,
) -> T {
    ef.clear();
    ef.resize(d.len(), T::zero());
    for &v in order {
        let es = net
            .preds(v)
            .iter()
            .fold(T::zero(), |acc, &p| acc.max(ef[p]));
        ef[v] = es + d[v];
    }
    ef[net.end_node()]
}

pub fn forward_pass<T: Scalar>(
    net: &ProjectNetwork,
    d: &DurationVector<T>,
) -> Result<ForwardPass<T>, ScheduleError> {
    check_len(net, d)?;
    let order = net.topo_nodes()?;
    let n = net.node_count();
    let mut es = vec![T::zero(); n];
    let mut ef = vec![T::zero(); n];
    for &v in order {
        es[v] = net
            .preds(v)
            .iter()
            .fold(T::zero(), |acc, &p| acc.max(ef[p]));
        ef[v] = es[v] + d.0[v];
    }
    let project_duration = ef[net.end_node()];
    Ok(ForwardPass {
        es,
        ef,
        project_duration,
    })
}

pub fn backward_pass<T: Scalar>(
    net: &ProjectNetwork,
    d: &DurationVector<T>,
    project_duration: T,
) -> Result<BackwardPass<T>, ScheduleError> {
    check_len(net, d)?;
    let order = net.topo_nodes()?;
    let n = net.node_count();
    let mut ls = vec![T::zero(); n];
    let mut lf = vec![T::zero(); n];
    for &v in order.iter().rev() {
        lf[v] = net
            .succs(v)
            .iter()
            .fold(project_duration, |acc, &s| acc.min(ls[s]));
        ls[v] = lf[v] - d.0[v];
    }
    Ok(BackwardPass { ls, lf })
}

/// Both passes plus total floats.
pub fn schedule<T: Scalar>(
    net: &ProjectNetwork,
    d: &DurationVector<T>,
) -> Result<ScheduleResult<T>, ScheduleError> {
    let fwd = forward_pass(net, d)?;
    let bwd = backward_pass(net, d, fwd.project_duration)?;
    let mut result = ScheduleResult {
        es: fwd.es,
        ef: fwd.ef,
        ls: bwd.ls,
        lf: bwd.lf,
        total_float: Vec::new(),
        project_duration: fwd.project_duration,
    };
    result.total_float = total_floats(&result);
    Ok(result)
}

/// `LS - ES` per node.
pub fn total_floats<T: Scalar>(s: &ScheduleResult<T>) -> Vec<T> {
    // LS >= ES holds exactly; rounding in the two passes can leave a few ulps below zero.
    s.ls.iter()
        .zip(&s.es)
        .map(|(&ls, &es)| (ls - es).max(T::zero()))
        .collect()
}

/// Real activities whose float is zero within `eps`, in file order.
pub fn critical_set<T: Scalar>(net: &ProjectNetwork, floats: &[T], eps: T) -> Vec<String> {
    (1..=net.len())
        .filter(|&v| floats[v].abs() <= eps)
        .map(|v| net.node_id(v).to_string())
        .collect()
}

/// CPM at deterministic planning durations.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannedSchedule {
    pub schedule: ScheduleResult<f64>,
    /// Planning duration per node.
    pub durations: DurationVector<f64>,
    /// Planned project duration ("schedule at completion").
    pub sac: f64,
    pub determinize: Determinize,
}

pub fn planned_schedule(
    net: &ProjectNetwork,
    how: Determinize,
) -> Result<PlannedSchedule, ScheduleError> {
    let planned: Vec<f64> = net
        .activities()
        .iter()
        .map(|a| a.elapsed + a.distribution.planning_value(how))
        .collect();
    let durations = DurationVector::from_activity_order(net, &planned)?;
    let schedule = schedule(net, &durations)?;
    Ok(PlannedSchedule {
        sac: schedule.project_duration,
        schedule,
        durations,
        determinize: how,
    })
}
