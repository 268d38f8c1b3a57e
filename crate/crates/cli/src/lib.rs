//! Orchestration and report emission for the `schedrisk` command.
//!
//! [`analyze`] runs the whole pipeline for one project file and returns the
//! rendered artifacts; [`write_artifacts`] puts them on disk. Artifacts are a
//! pure function of the input bytes and the [`RunConfig`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use schedrisk_core::metrics::{DEFAULT_MOI_MIN_DENOMINATOR, DEFAULT_TIE_EPS};
use schedrisk_core::scheduler::DEFAULT_FLOAT_EPS;
use schedrisk_core::simulation::{DEFAULT_REPLICATIONS, DEFAULT_SEED};
use schedrisk_core::{
    ari, compute_metrics, parse_project, planned_schedule, rank_activities, run_batch, AriReport,
    ControlGrid, Determinize, MetricSelection, MetricsConfig, MetricsReport, ProjectNetwork,
    RiskBaselineCurve, Scaling, SimulationConfig, SuccessorCount,
};

pub const TOOL_NAME: &str = "schedrisk";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("expected `csv` or `json`, got `{s}`")),
        }
    }
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Everything that determines an analysis. `out` only says where artifacts
/// go and is not echoed into them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub replications: usize,
    pub seed: u64,
    /// `None` means `SAC / 40`.
    pub grid_step: Option<f64>,
    pub scaling: Scaling,
    #[serde(serialize_with = "as_display")]
    pub metrics: MetricSelection,
    pub tie_eps: f64,
    pub moi_successors: SuccessorCount,
    pub determinize_with: Determinize,
    pub format: Format,
    #[serde(skip)]
    pub out: PathBuf,
}

fn as_display<S: serde::Serializer>(v: &MetricSelection, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>) -> Self {
        RunConfig {
            input: input.into(),
            replications: DEFAULT_REPLICATIONS,
            seed: DEFAULT_SEED,
            grid_step: None,
            scaling: Scaling::default(),
            metrics: MetricSelection::default(),
            tie_eps: DEFAULT_TIE_EPS,
            moi_successors: SuccessorCount::default(),
            determinize_with: Determinize::default(),
            format: Format::default(),
            out: PathBuf::from("schedrisk-out"),
        }
    }

    fn echo(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[derive(Debug, Error)]
pub enum AnalyzeError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Computation(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl AnalyzeError {
    /// 1 for input and validation problems, 2 for everything after.
    pub fn exit_code(&self) -> i32 {
        match self {
            AnalyzeError::Read { .. } | AnalyzeError::Validation(_) => 1,
            AnalyzeError::Computation(_) | AnalyzeError::Write { .. } => 2,
        }
    }
}

/// Numbers as computed, before rendering.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub network: ProjectNetwork,
    pub sac: f64,
    pub metrics: Option<MetricsReport>,
    pub ari: Option<AriReport>,
}

/// Rendered artifacts in write order: `(file name, content)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }
}

pub fn load_network(path: &Path) -> Result<ProjectNetwork, AnalyzeError> {
    let text = fs::read_to_string(path).map_err(|source| AnalyzeError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_project(&text).map_err(|e| AnalyzeError::Validation(format!("{}: {e}", path.display())))
}

pub fn compute(config: &RunConfig) -> Result<Analysis, AnalyzeError> {
    let network = load_network(&config.input)?;
    let comp = |e: &dyn std::fmt::Display| AnalyzeError::Computation(e.to_string());
    let plan = planned_schedule(&network, config.determinize_with).map_err(|e| comp(&e))?;
    let sim = SimulationConfig::new(config.replications, config.seed);
    sim.check()
        .map_err(|e| AnalyzeError::Validation(e.to_string()))?;

    let ari = if config.metrics.ari {
        let grid = match config.grid_step {
            Some(step) => ControlGrid::new(plan.sac, step),
            None => ControlGrid::with_default_step(plan.sac),
        }
        .map_err(|e| comp(&e))?;
        Some(ari(&network, &plan, &grid, sim, config.scaling).map_err(|e| comp(&e))?)
    } else {
        None
    };

    let metrics = if config.metrics.needs_batch() {
        let batch = run_batch(&network, sim).map_err(|e| comp(&e))?;
        let mcfg = MetricsConfig {
            float_eps: DEFAULT_FLOAT_EPS,
            successors: config.moi_successors,
            moi_min_denominator: DEFAULT_MOI_MIN_DENOMINATOR,
        };
        Some(compute_metrics(&network, &batch, &mcfg, config.metrics).map_err(|e| comp(&e))?)
    } else {
        None
    };

    Ok(Analysis {
        sac: plan.sac,
        network,
        metrics,
        ari,
    })
}

/// Runs the analysis and renders every artifact.
pub fn analyze(config: &RunConfig) -> Result<(Analysis, Artifacts), AnalyzeError> {
    let analysis = compute(config)?;
    let mut files = Vec::new();
    let ext = config.format.ext();
    files.push((format!("metrics.{ext}"), emit_metrics(&analysis, config)));
    if let Some(ari) = &analysis.ari {
        let curves = emit_curves(&ari.curves, config)
            .map_err(|e| AnalyzeError::Computation(e.to_string()))?;
        files.push((format!("curves.{ext}"), curves));
        files.push((format!("ari.{ext}"), emit_ari(ari, config)));
    }
    files.push((
        "manifest.json".to_string(),
        manifest(&analysis, config, &files),
    ));
    Ok((analysis, Artifacts { files }))
}

pub fn write_artifacts(dir: &Path, artifacts: &Artifacts) -> Result<(), AnalyzeError> {
    let werr = |path: &Path, source| AnalyzeError::Write {
        path: path.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(|e| werr(dir, e))?;
    for (name, content) in &artifacts.files {
        let path = dir.join(name);
        fs::write(&path, content).map_err(|e| werr(&path, e))?;
    }
    Ok(())
}

/// `%g`-style rendering with six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exp) {
        let s = format!("{x:.5e}");
        let (mant, e) = s.split_once('e').expect("exponent form");
        let mant = trim_zeros(mant);
        return format!("{mant}e{e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    trim_zeros(&s).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Columns of the metrics table, values in file order.
fn metric_columns(a: &Analysis) -> Vec<(&'static str, Vec<f64>)> {
    let mut cols: Vec<(&'static str, Vec<f64>)> = Vec::new();
    if let Some(m) = &a.metrics {
        cols.extend(m.columns().into_iter().map(|(n, v)| (n, v.to_vec())));
    }
    if let Some(r) = &a.ari {
        cols.push(("ari_raw", r.activities.iter().map(|e| e.ari_raw).collect()));
        cols.push((
            "ari_normalized",
            r.activities.iter().map(|e| e.ari_normalized).collect(),
        ));
    }
    cols
}

/// Rank columns; ARI is ranked by its normalized value.
fn rank_columns(a: &Analysis, tie_eps: f64) -> Vec<(String, Vec<usize>)> {
    metric_columns(a)
        .into_iter()
        .filter(|(n, _)| *n != "ari_raw")
        .map(|(n, v)| {
            let name = if n == "ari_normalized" {
                "rank_ari".to_string()
            } else {
                format!("rank_{n}")
            };
            (name, rank_activities(&v, tie_eps))
        })
        .collect()
}

fn config_comment(config: &RunConfig) -> String {
    format!("# {TOOL_NAME} {TOOL_VERSION} config: {}\n", config.echo())
}

/// One row per real activity in file order: id, selected metrics, ARI, then
/// one rank column per metric.
pub fn emit_metrics(a: &Analysis, config: &RunConfig) -> String {
    let ids: Vec<&str> = a
        .network
        .activities()
        .iter()
        .map(|x| x.id.as_str())
        .collect();
    let cols = metric_columns(a);
    let ranks = rank_columns(a, config.tie_eps);
    match config.format {
        Format::Csv => {
            let mut out = config_comment(config);
            let header: Vec<String> = std::iter::once("activity_id".to_string())
                .chain(cols.iter().map(|(n, _)| n.to_string()))
                .chain(ranks.iter().map(|(n, _)| n.clone()))
                .collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for (i, id) in ids.iter().enumerate() {
                let row: Vec<String> = std::iter::once(csv_field(id))
                    .chain(cols.iter().map(|(_, v)| sig6(v[i])))
                    .chain(ranks.iter().map(|(_, r)| r[i].to_string()))
                    .collect();
                out.push_str(&row.join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut top = Map::new();
            for (i, id) in ids.iter().enumerate() {
                let mut row = Map::new();
                for (n, v) in &cols {
                    row.insert(n.to_string(), json!(v[i]));
                }
                for (n, r) in &ranks {
                    row.insert(n.clone(), json!(r[i]));
                }
                top.insert(id.to_string(), Value::Object(row));
            }
            pretty(&Value::Object(top))
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json renders");
    s.push('\n');
    s
}

#[derive(Debug, Error)]
#[error("curves do not share one control grid")]
pub struct GridMismatch;

/// Wide table: `time`, then one column per curve in the given order.
pub fn emit_curves(
    curves: &[RiskBaselineCurve],
    config: &RunConfig,
) -> Result<String, GridMismatch> {
    let Some(first) = curves.first() else {
        return Ok(String::new());
    };
    if curves
        .iter()
        .any(|c| c.times != first.times || c.values.len() != first.times.len())
    {
        return Err(GridMismatch);
    }
    Ok(match config.format {
        Format::Csv => {
            let mut out = config_comment(config);
            out.push_str("time");
            for c in curves {
                let _ = write!(out, ",{}", csv_field(&c.label));
            }
            out.push('\n');
            for (k, t) in first.times.iter().enumerate() {
                out.push_str(&sig6(*t));
                for c in curves {
                    let _ = write!(out, ",{}", sig6(c.values[k]));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut top = Map::new();
            top.insert("time".into(), json!(first.times));
            for c in curves {
                top.insert(c.label.clone(), json!(c.values));
            }
            pretty(&Value::Object(top))
        }
    })
}

pub fn emit_ari(r: &AriReport, config: &RunConfig) -> String {
    match config.format {
        Format::Csv => {
            let mut out = config_comment(config);
            let _ = writeln!(out, "# srv_0={}", sig6(r.srv_0));
            for w in &r.warnings {
                let _ = writeln!(out, "# warning: {w}");
            }
            out.push_str("activity_id,srv,ari_raw,ari_normalized,stderr\n");
            for e in &r.activities {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    csv_field(&e.id),
                    sig6(e.srv),
                    sig6(e.ari_raw),
                    sig6(e.ari_normalized),
                    sig6(e.stderr)
                );
            }
            out
        }
        Format::Json => pretty(&json!({
            "config": config.echo(),
            "srv_0": r.srv_0,
            "activities": r.activities,
            "warnings": r.warnings,
        })),
    }
}

fn manifest(a: &Analysis, config: &RunConfig, files: &[(String, String)]) -> String {
    let warnings: Vec<&String> = a
        .metrics
        .iter()
        .flat_map(|m| &m.warnings)
        .chain(a.ari.iter().flat_map(|r| &r.warnings))
        .collect();
    pretty(&json!({
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "seed": config.seed,
        "config": config.echo(),
        "project": a.network.name(),
        "time_unit": a.network.time_unit(),
        "sac": a.sac,
        "artifacts": files.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        "warnings": warnings,
    }))
}
