//! Seeded Monte Carlo over project networks.
//!
//! Every `(replication, activity)` pair owns a fixed window of a ChaCha8
//! keystream: the key is derived from the seed, the stream id is the
//! replication index and the word position is the activity's file index
//! shifted into the high bits. Results therefore do not depend on thread
//! count or evaluation order, and two networks with the same activity order
//! draw their durations from identical uniforms (common random numbers).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distribution::{DurationDistribution, Sampler};
use crate::network::{NetworkError, ProjectNetwork};
use crate::scheduler::{makespan_into, schedule, DurationVector, ScheduleError};
use crate::stats::Moments;

pub const DEFAULT_REPLICATIONS: usize = 20_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MAX_RESAMPLE_ATTEMPTS: u32 = 100;

#[derive(Debug, Error)]
pub enum SimulationError {
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
    #[error("activity `{activity}`: no nonnegative duration after {attempts} draws")]
    ResampleExhausted { activity: String, attempts: u32 },
    #[error("activity `{activity}`: {message}")]
    BadDistribution { activity: String, message: String },
    #[error("scenario override names unknown activity `{0}`")]
    UnknownOverride(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub replications: usize,
    pub seed: u64,
    pub max_resample_attempts: u32,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            replications: DEFAULT_REPLICATIONS,
            seed: DEFAULT_SEED,
            max_resample_attempts: DEFAULT_MAX_RESAMPLE_ATTEMPTS,
        }
    }
}

impl SimulationConfig {
    pub fn new(replications: usize, seed: u64) -> Self {
        SimulationConfig {
            replications,
            seed,
            ..Default::default()
        }
    }

    pub fn check(&self) -> Result<(), SimulationError> {
        if self.replications < 2 {
            return Err(SimulationError::InvalidConfig(format!(
                "need at least 2 replications (got {})",
                self.replications
            )));
        }
        if self.max_resample_attempts == 0 {
            return Err(SimulationError::InvalidConfig(
                "max_resample_attempts must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Counter-based random streams keyed by `(seed, replication, slot)`.
#[derive(Clone, Debug)]
pub struct RandomStreams {
    base: ChaCha8Rng,
}

impl RandomStreams {
    pub fn new(seed: u64) -> Self {
        RandomStreams {
            base: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Generator for one replication; position it with [`Self::seek`].
    pub fn replication(&self, replication: usize) -> ChaCha8Rng {
        let mut rng = self.base.clone();
        rng.set_stream(replication as u64);
        rng
    }

    /// Moves `rng` to the start of the window owned by `slot`.
    pub fn seek(rng: &mut ChaCha8Rng, slot: usize) {
        rng.set_word_pos((slot as u128) << 32);
    }

    pub fn stream(&self, replication: usize, slot: usize) -> ChaCha8Rng {
        let mut rng = self.replication(replication);
        Self::seek(&mut rng, slot);
        rng
    }
}

/// One duration draw; negative variates are rejected and redrawn.
pub fn sample_duration<R: Rng + ?Sized>(
    dist: &DurationDistribution,
    rng: &mut R,
    max_attempts: u32,
) -> Result<f64, SimulationError> {
    let sampler = dist
        .sampler()
        .map_err(|message| SimulationError::BadDistribution {
            activity: String::new(),
            message,
        })?;
    draw_nonnegative(&sampler, 0.0, rng, max_attempts).ok_or(SimulationError::ResampleExhausted {
        activity: String::new(),
        attempts: max_attempts,
    })
}

/// Draws until `offset + x >= 0`. The offset is the elapsed part of an
/// in-progress activity: only its total duration must be non-negative, so
/// the remaining part keeps its full scaled spread.
fn draw_nonnegative<R: Rng + ?Sized>(
    sampler: &Sampler,
    offset: f64,
    rng: &mut R,
    max_attempts: u32,
) -> Option<f64> {
    (0..max_attempts)
        .map(|_| sampler.draw(rng))
        .find(|&x| offset + x >= 0.0)
}

/// Network with pre-built samplers, ready for repeated replications.
pub struct CompiledNetwork<'a> {
    net: &'a ProjectNetwork,
    order: &'a [usize],
    samplers: Vec<Sampler>,
    config: SimulationConfig,
    streams: RandomStreams,
}

impl<'a> CompiledNetwork<'a> {
    pub fn new(net: &'a ProjectNetwork, config: SimulationConfig) -> Result<Self, SimulationError> {
        config.check()?;
        let order = net.topo_nodes()?;
        let samplers = net
            .activities()
            .iter()
            .map(|a| {
                a.distribution
                    .sampler()
                    .map_err(|message| SimulationError::BadDistribution {
                        activity: a.id.clone(),
                        message,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CompiledNetwork {
            net,
            order,
            samplers,
            config,
            streams: RandomStreams::new(config.seed),
        })
    }

    pub fn network(&self) -> &ProjectNetwork {
        self.net
    }

    /// Node-indexed sampled durations for replication `k`.
    pub fn sample(&self, k: usize) -> Result<Vec<f64>, SimulationError> {
        let mut d = vec![0.0; self.net.node_count()];
        self.sample_into(k, &mut d)?;
        Ok(d)
    }

    fn sample_into(&self, k: usize, d: &mut [f64]) -> Result<(), SimulationError> {
        let mut rng = self.streams.replication(k);
        for (i, (a, s)) in self.net.activities().iter().zip(&self.samplers).enumerate() {
            let x = if s.is_constant() {
                s.draw(&mut rng)
            } else {
                RandomStreams::seek(&mut rng, i);
                draw_nonnegative(s, a.elapsed, &mut rng, self.config.max_resample_attempts)
                    .ok_or_else(|| SimulationError::ResampleExhausted {
                        activity: a.id.clone(),
                        attempts: self.config.max_resample_attempts,
                    })?
            };
            d[i + 1] = a.elapsed + x;
        }
        Ok(())
    }

    /// Full CPM record for replication `k`.
    pub fn run_replication(&self, k: usize) -> Result<ReplicationRecord, SimulationError> {
        let d = DurationVector::from_nodes_unchecked(self.sample(k)?);
        let s = schedule(self.net, &d)?;
        Ok(ReplicationRecord {
            durations: d,
            project_duration: s.project_duration,
            total_float: s.total_float,
        })
    }

    /// Project duration only, for replication `k`.
    pub fn makespan(&self, k: usize, scratch: &mut Scratch) -> Result<f64, SimulationError> {
        scratch.d.resize(self.net.node_count(), 0.0);
        self.sample_into(k, &mut scratch.d)?;
        Ok(makespan_into(
            self.order,
            self.net,
            &scratch.d,
            &mut scratch.ef,
        ))
    }
}

#[derive(Default)]
pub struct Scratch {
    d: Vec<f64>,
    ef: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReplicationRecord {
    /// Node-indexed sampled durations.
    pub durations: DurationVector<f64>,
    pub project_duration: f64,
    /// Node-indexed total floats.
    pub total_float: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SimulationBatch {
    pub config: SimulationConfig,
    /// Real activity ids in file order.
    pub ids: Vec<String>,
    pub records: Vec<ReplicationRecord>,
    pub duration_stats: Vec<Moments<f64>>,
    pub float_stats: Vec<Moments<f64>>,
    pub project_duration_stats: Moments<f64>,
}

impl SimulationBatch {
    fn assemble(
        net: &ProjectNetwork,
        config: SimulationConfig,
        records: Vec<ReplicationRecord>,
    ) -> Self {
        let n = net.len();
        let mut duration_stats = vec![Moments::new(); n];
        let mut float_stats = vec![Moments::new(); n];
        let mut project_duration_stats = Moments::new();
        for r in &records {
            for i in 0..n {
                duration_stats[i].push(r.durations.get(i + 1));
                float_stats[i].push(r.total_float[i + 1]);
            }
            project_duration_stats.push(r.project_duration);
        }
        SimulationBatch {
            config,
            ids: net.activities().iter().map(|a| a.id.clone()).collect(),
            records,
            duration_stats,
            float_stats,
            project_duration_stats,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sampled durations of real activity `i` (file order), one per replication.
    pub fn durations_of(&self, i: usize) -> Vec<f64> {
        self.records
            .iter()
            .map(|r| r.durations.get(i + 1))
            .collect()
    }

    pub fn floats_of(&self, i: usize) -> Vec<f64> {
        self.records.iter().map(|r| r.total_float[i + 1]).collect()
    }

    pub fn project_durations(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.project_duration).collect()
    }
}

pub fn run_batch(
    net: &ProjectNetwork,
    config: SimulationConfig,
) -> Result<SimulationBatch, SimulationError> {
    let compiled = CompiledNetwork::new(net, config)?;
    let records = (0..config.replications)
        .into_par_iter()
        .map(|k| compiled.run_replication(k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SimulationBatch::assemble(net, config, records))
}

/// Project durations only, in replication order.
pub fn run_makespans(
    net: &ProjectNetwork,
    config: SimulationConfig,
) -> Result<Vec<f64>, SimulationError> {
    let compiled = CompiledNetwork::new(net, config)?;
    (0..config.replications)
        .into_par_iter()
        .map_init(Scratch::default, |scratch, k| compiled.makespan(k, scratch))
        .collect()
}

/// Replacement distributions keyed by activity id.
pub type ScenarioOverride = BTreeMap<String, DurationDistribution>;

pub fn apply_override(
    net: &ProjectNetwork,
    over: &ScenarioOverride,
) -> Result<ProjectNetwork, SimulationError> {
    for id in over.keys() {
        net.node_of(id)
            .map_err(|_| SimulationError::UnknownOverride(id.clone()))?;
    }
    Ok(net.map_activities(|_, a| {
        let mut a = a.clone();
        if let Some(d) = over.get(&a.id) {
            a.distribution = *d;
        }
        a
    }))
}

/// One batch per scenario, all sharing the base network's random streams.
pub fn run_scenarios(
    net: &ProjectNetwork,
    scenarios: &[ScenarioOverride],
    config: SimulationConfig,
) -> Result<Vec<SimulationBatch>, SimulationError> {
    scenarios
        .iter()
        .map(|s| run_batch(&apply_override(net, s)?, config))
        .collect()
}
