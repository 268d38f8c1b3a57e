//! Activity-on-node project networks.
//!
//! A [`ProjectNetwork`] holds the real activities in file order and an index
//! of precedence edges over *nodes*. Node `0` is a synthesized zero-duration
//! start, nodes `1..=n` are the real activities and node `n + 1` is a
//! synthesized zero-duration end. Every real activity without predecessors
//! hangs off the start and every one without successors feeds the end.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet, VecDeque};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::DurationDistribution;

pub const VIRTUAL_START: &str = "__start__";
pub const VIRTUAL_END: &str = "__end__";

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("activity `{activity}`: unknown distribution kind `{kind}`")]
    UnknownDistribution { activity: String, kind: String },
    #[error("activity `{activity}`: bad distribution parameters: {message}")]
    BadParameters { activity: String, message: String },
    #[error("duplicate activity id `{0}`")]
    DuplicateId(String),
    #[error("activity ids must be non-empty")]
    EmptyId,
    #[error("activity id `{0}` is reserved")]
    ReservedId(String),
    #[error("activity `{activity}`: unresolved predecessor `{predecessor}`")]
    UnresolvedPredecessor {
        activity: String,
        predecessor: String,
    },
    #[error("unknown activity `{0}`")]
    UnknownActivity(String),
    #[error("precedence cycle through {0:?}")]
    Cycle(Vec<String>),
    #[error("invalid network:\n{0}")]
    Invalid(ValidationReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Activity {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub distribution: DurationDistribution,
    #[serde(default)]
    pub predecessors: Vec<String>,
    /// Already executed, fixed portion of the duration. The sampled duration
    /// is `elapsed + draw(distribution)`.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub elapsed: f64,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

impl Activity {
    pub fn new(
        id: impl Into<String>,
        distribution: DurationDistribution,
        predecessors: &[&str],
    ) -> Self {
        Activity {
            id: id.into(),
            name: None,
            distribution,
            predecessors: predecessors.iter().map(|p| p.to_string()).collect(),
            elapsed: 0.0,
        }
    }

    pub fn mean_duration(&self) -> f64 {
        self.elapsed + self.distribution.mean()
    }
}

#[derive(Clone, Debug)]
pub struct ProjectNetwork {
    name: String,
    time_unit: String,
    activities: Vec<Activity>,
    index: HashMap<String, usize>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    topo: Option<Vec<usize>>,
}

impl PartialEq for ProjectNetwork {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.time_unit == other.time_unit
            && self.activities == other.activities
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectFile {
    name: String,
    time_unit: String,
    activities: Vec<RawActivity>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawActivity {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    distribution: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    predecessors: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    elapsed: f64,
}

impl ProjectNetwork {
    /// Builds the node index. Structural faults (empty, duplicate, reserved or
    /// unresolved ids) are errors; cycles and bad distribution parameters are
    /// left for [`ProjectNetwork::validate`].
    pub fn new(
        name: impl Into<String>,
        time_unit: impl Into<String>,
        activities: Vec<Activity>,
    ) -> Result<Self, NetworkError> {
        let n = activities.len();
        let mut index = HashMap::with_capacity(n);
        for (i, a) in activities.iter().enumerate() {
            if a.id.trim().is_empty() {
                return Err(NetworkError::EmptyId);
            }
            if a.id == VIRTUAL_START || a.id == VIRTUAL_END {
                return Err(NetworkError::ReservedId(a.id.clone()));
            }
            if index.insert(a.id.clone(), i + 1).is_some() {
                return Err(NetworkError::DuplicateId(a.id.clone()));
            }
        }

        let end = n + 1;
        let mut preds = vec![Vec::new(); n + 2];
        let mut succs = vec![Vec::new(); n + 2];
        for (i, a) in activities.iter().enumerate() {
            let node = i + 1;
            for p in &a.predecessors {
                let &pn = index
                    .get(p)
                    .ok_or_else(|| NetworkError::UnresolvedPredecessor {
                        activity: a.id.clone(),
                        predecessor: p.clone(),
                    })?;
                if !preds[node].contains(&pn) {
                    preds[node].push(pn);
                    succs[pn].push(node);
                }
            }
        }
        for node in 1..=n {
            if preds[node].is_empty() {
                preds[node].push(0);
                succs[0].push(node);
            }
        }
        for node in 1..=n {
            if succs[node].is_empty() {
                succs[node].push(end);
                preds[end].push(node);
            }
        }
        if n == 0 {
            succs[0].push(end);
            preds[end].push(0);
        }

        let mut net = ProjectNetwork {
            name: name.into(),
            time_unit: time_unit.into(),
            activities,
            index,
            preds,
            succs,
            topo: None,
        };
        net.topo = net.kahn();
        Ok(net)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn time_unit(&self) -> &str {
        &self.time_unit
    }

    /// Real activities in file order.
    pub fn activities(&self) -> &[Activity] {
        &self.activities
    }

    pub fn len(&self) -> usize {
        self.activities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activities.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.activities.len() + 2
    }

    pub fn start_node(&self) -> usize {
        0
    }

    pub fn end_node(&self) -> usize {
        self.activities.len() + 1
    }

    pub fn is_virtual(&self, node: usize) -> bool {
        node == 0 || node == self.end_node()
    }

    pub fn node_id(&self, node: usize) -> &str {
        if node == 0 {
            VIRTUAL_START
        } else if node == self.end_node() {
            VIRTUAL_END
        } else {
            &self.activities[node - 1].id
        }
    }

    pub fn node_of(&self, id: &str) -> Result<usize, NetworkError> {
        match id {
            VIRTUAL_START => Ok(0),
            VIRTUAL_END => Ok(self.end_node()),
            _ => self
                .index
                .get(id)
                .copied()
                .ok_or_else(|| NetworkError::UnknownActivity(id.to_string())),
        }
    }

    /// Activity at a real node, `None` for the virtual ones.
    pub fn activity_at(&self, node: usize) -> Option<&Activity> {
        if self.is_virtual(node) {
            None
        } else {
            self.activities.get(node - 1)
        }
    }

    pub fn preds(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    pub fn succs(&self, node: usize) -> &[usize] {
        &self.succs[node]
    }

    /// Nodes in precedence order, ties broken by file order.
    pub fn topo_nodes(&self) -> Result<&[usize], NetworkError> {
        self.topo.as_deref().ok_or_else(|| {
            let cycle = self.cycles().into_iter().next().unwrap_or_default();
            NetworkError::Cycle(cycle)
        })
    }

    /// Activity ids (virtual start and end included) in precedence order.
    pub fn topological_order(&self) -> Result<Vec<&str>, NetworkError> {
        Ok(self
            .topo_nodes()?
            .iter()
            .map(|&n| self.node_id(n))
            .collect())
    }

    fn kahn(&self) -> Option<Vec<usize>> {
        let nodes = self.node_count();
        let mut indeg: Vec<usize> = self.preds.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..nodes).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(nodes);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &s in &self.succs[v] {
                indeg[s] -= 1;
                if indeg[s] == 0 {
                    ready.push(Reverse(s));
                }
            }
        }
        (order.len() == nodes).then_some(order)
    }

    /// Strongly connected components that form cycles, as activity ids in
    /// file order.
    fn cycles(&self) -> Vec<Vec<String>> {
        let mut g = DiGraph::<usize, ()>::with_capacity(self.node_count(), 0);
        let ix: Vec<_> = (0..self.node_count()).map(|v| g.add_node(v)).collect();
        for (v, ss) in self.succs.iter().enumerate() {
            for &s in ss {
                g.add_edge(ix[v], ix[s], ());
            }
        }
        let mut out: Vec<Vec<String>> = tarjan_scc(&g)
            .into_iter()
            .filter(|scc| scc.len() > 1 || self.succs[g[scc[0]]].contains(&g[scc[0]]))
            .map(|scc| {
                let mut nodes: Vec<usize> = scc.iter().map(|&i| g[i]).collect();
                nodes.sort_unstable();
                nodes.iter().map(|&n| self.node_id(n).to_string()).collect()
            })
            .collect();
        out.sort();
        out
    }

    /// Checks acyclicity, distribution parameters and reachability from the
    /// virtual start. Violations are returned as data.
    pub fn validate(&self) -> ValidationReport {
        let cycles = self.cycles();
        let bad_parameters = self
            .activities
            .iter()
            .flat_map(|a| {
                let mut v = a.distribution.violations();
                if !(a.elapsed.is_finite() && a.elapsed >= 0.0) {
                    v.push(format!(
                        "elapsed must be finite and >= 0 (got {})",
                        a.elapsed
                    ));
                }
                v.into_iter().map(move |m| (a.id.clone(), m))
            })
            .collect();

        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &s in &self.succs[v] {
                if !seen[s] {
                    seen[s] = true;
                    queue.push_back(s);
                }
            }
        }
        let in_cycle: HashSet<&str> = cycles.iter().flatten().map(String::as_str).collect();
        let unreachable = (1..=self.len())
            .filter(|&v| !seen[v] && !in_cycle.contains(self.node_id(v)))
            .map(|v| self.node_id(v).to_string())
            .collect();

        ValidationReport {
            cycles,
            bad_parameters,
            unreachable,
        }
    }

    fn real_successors(&self, node: usize, transitive: bool) -> usize {
        if !transitive {
            return self.succs[node]
                .iter()
                .filter(|&&s| !self.is_virtual(s))
                .count();
        }
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![node];
        let mut count = 0;
        while let Some(v) = stack.pop() {
            for &s in &self.succs[v] {
                if !seen[s] && !self.is_virtual(s) {
                    seen[s] = true;
                    count += 1;
                    stack.push(s);
                }
            }
        }
        count
    }

    /// Distinct real activities reachable from `id` along precedence edges.
    pub fn transitive_successor_count(&self, id: &str) -> Result<usize, NetworkError> {
        Ok(self.real_successors(self.node_of(id)?, true))
    }

    /// Real activities listing `id` as a direct predecessor.
    pub fn immediate_successor_count(&self, id: &str) -> Result<usize, NetworkError> {
        Ok(self.real_successors(self.node_of(id)?, false))
    }

    /// Same topology and order, with distributions replaced per activity.
    pub fn map_activities(&self, mut f: impl FnMut(usize, &Activity) -> Activity) -> Self {
        let activities = self
            .activities
            .iter()
            .enumerate()
            .map(|(i, a)| f(i, a))
            .collect();
        ProjectNetwork {
            activities,
            ..self.clone()
        }
    }

    /// Serializes to the project file format.
    pub fn to_json(&self) -> String {
        let file = ProjectFile {
            name: self.name.clone(),
            time_unit: self.time_unit.clone(),
            activities: self
                .activities
                .iter()
                .map(|a| RawActivity {
                    id: a.id.clone(),
                    name: a.name.clone(),
                    distribution: match serde_json::to_value(a.distribution) {
                        Ok(serde_json::Value::Object(m)) => m,
                        _ => unreachable!("distributions serialize to objects"),
                    },
                    predecessors: a.predecessors.clone(),
                    elapsed: a.elapsed,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("project serializes")
    }
}

/// Structural and parameter problems found by [`ProjectNetwork::validate`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub cycles: Vec<Vec<String>>,
    /// `(activity id, message)`
    pub bad_parameters: Vec<(String, String)>,
    pub unreachable: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty() && self.bad_parameters.is_empty() && self.unreachable.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return writeln!(f, "ok");
        }
        for c in &self.cycles {
            writeln!(f, "cycle: {}", c.join(" -> "))?;
        }
        for (id, msg) in &self.bad_parameters {
            writeln!(f, "bad parameter in `{id}`: {msg}")?;
        }
        for id in &self.unreachable {
            writeln!(f, "unreachable from project start: `{id}`")?;
        }
        Ok(())
    }
}

/// Parses a project file without running [`ProjectNetwork::validate`].
pub fn parse_project_unchecked(text: &str) -> Result<ProjectNetwork, NetworkError> {
    let file: ProjectFile = serde_json::from_str(text).map_err(|e| NetworkError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let activities = file
        .activities
        .into_iter()
        .map(|raw| {
            let kind = raw
                .distribution
                .get("type")
                .and_then(|v| v.as_str())
                .unwrap_or_default()
                .to_string();
            if !DurationDistribution::KINDS.contains(&kind.as_str()) {
                return Err(NetworkError::UnknownDistribution {
                    activity: raw.id,
                    kind,
                });
            }
            let distribution = serde_json::from_value(serde_json::Value::Object(raw.distribution))
                .map_err(|e| NetworkError::BadParameters {
                    activity: raw.id.clone(),
                    message: e.to_string(),
                })?;
            Ok(Activity {
                id: raw.id,
                name: raw.name,
                distribution,
                predecessors: raw.predecessors,
                elapsed: raw.elapsed,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    ProjectNetwork::new(file.name, file.time_unit, activities)
}

/// Parses and validates a project file.
pub fn parse_project(text: &str) -> Result<ProjectNetwork, NetworkError> {
    let net = parse_project_unchecked(text)?;
    let report = net.validate();
    if report.is_empty() {
        Ok(net)
    } else {
        Err(NetworkError::Invalid(report))
    }
}
