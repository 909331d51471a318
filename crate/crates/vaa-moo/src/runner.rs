//! Shared optimizer machinery: run configuration, run results with
//! per-iteration archive snapshots, and deterministic RNG substreams.
//!
//! Every random decision of a run draws from a counter-based substream
//! keyed by `(seed, purpose, iteration, individual)`, so results are
//! bit-identical regardless of evaluation parallelism or seed scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beamforming::BeamformingError;
use crate::pareto::{Archive, ArchiveEntry};
use crate::problem::{EvalConfig, Evaluator, ObjectiveVector, Solution};
use crate::scenario::{validate_scenario, Scenario};

/// Hyperparameters shared by every population optimizer in the crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub pop_size: usize,
    pub max_iters: usize,
    pub archive_capacity: usize,
    pub grid_divisions: usize,
    pub rng_seed: u64,
    pub eval: EvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pop_size: 30,
            max_iters: 100,
            archive_capacity: 100,
            grid_divisions: 10,
            rng_seed: 0,
            eval: EvalConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("scenario failed validation: {0}")]
    InvalidScenario(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Beamforming(#[from] BeamformingError),
}

/// Objectives of one archive member at one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotRow {
    pub id: u64,
    pub f1_s: f64,
    pub f2: f64,
    pub f3_j: f64,
}

/// Archive contents after one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSnapshot {
    pub iter: usize,
    pub entries: Vec<SnapshotRow>,
}

/// A member of the final archive, with its genome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalEntry {
    pub id: u64,
    pub objectives: ObjectiveVector,
    pub solution: Solution,
}

/// Everything one optimizer run produced. The serialized form is a pure
/// function of `(scenario, params, seed)`; wall-clock time is kept only in
/// memory so reruns serialize byte-identically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algo: String,
    pub seed: u64,
    /// Echo of the run parameters.
    pub params: serde_json::Value,
    pub snapshots: Vec<IterationSnapshot>,
    pub final_entries: Vec<FinalEntry>,
    pub eval_count: u64,
    #[serde(skip)]
    pub wall_clock_s: f64,
}

impl RunResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run result serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    /// Final entry with the lowest `f1`, the conventional single pick from
    /// the front.
    pub fn best_by_f1(&self) -> Option<&FinalEntry> {
        self.final_entries
            .iter()
            .min_by(|a, b| a.objectives.f1_s.total_cmp(&b.objectives.f1_s))
    }

    pub fn best_f1(&self) -> f64 {
        self.best_by_f1().map_or(f64::INFINITY, |e| e.objectives.f1_s)
    }

    pub fn best_f3(&self) -> f64 {
        self.final_entries
            .iter()
            .map(|e| e.objectives.f3_j)
            .fold(f64::INFINITY, f64::min)
    }
}

// Purpose tags of the RNG substreams.
pub(crate) const TAG_INIT: u64 = 0x01;
pub(crate) const TAG_LEADER: u64 = 0x02;
pub(crate) const TAG_UPDATE: u64 = 0x03;
pub(crate) const TAG_REPAIR: u64 = 0x04;
pub(crate) const TAG_TRIM: u64 = 0x05;
pub(crate) const TAG_PARAMS: u64 = 0x06;
pub(crate) const TAG_PBEST: u64 = 0x07;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic, platform-independent RNG keyed by a seed and a tag path.
pub fn substream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut state = splitmix64(seed);
    for &t in tags {
        state = splitmix64(state ^ t.wrapping_mul(0xA24B_AED4_963E_E407));
    }
    ChaCha8Rng::seed_from_u64(state)
}

/// Validates the scenario once before a run.
pub(crate) fn ensure_valid_scenario(s: &Scenario) -> Result<(), RunError> {
    let violations = validate_scenario(s);
    if let Some(first) = violations.first() {
        return Err(RunError::InvalidScenario(format!(
            "{first}{}",
            if violations.len() > 1 {
                format!(" (+{} more)", violations.len() - 1)
            } else {
                String::new()
            }
        )));
    }
    Ok(())
}

/// Evaluates a population in parallel. Solutions produced by the operators
/// are structurally valid by construction, so evaluation errors are bugs.
pub(crate) fn evaluate_population(ev: &Evaluator<'_>, pop: &[Solution]) -> Vec<ObjectiveVector> {
    pop.par_iter()
        .map(|x| ev.evaluate(x).expect("operators preserve structural validity"))
        .collect()
}

/// Inserts a generation into the archive in population order and snapshots it.
pub(crate) fn archive_generation(
    archive: &mut Archive<Solution>,
    pop: &[Solution],
    objectives: &[ObjectiveVector],
    iter: usize,
    seed: u64,
) -> IterationSnapshot {
    let mut trim_rng = substream(seed, &[TAG_TRIM, iter as u64]);
    for (x, o) in pop.iter().zip(objectives) {
        archive.insert(x.clone(), *o, &mut trim_rng);
    }
    IterationSnapshot {
        iter,
        entries: archive
            .entries()
            .iter()
            .map(|e| SnapshotRow { id: e.id, f1_s: e.objectives.f1_s, f2: e.objectives.f2, f3_j: e.objectives.f3_j })
            .collect(),
    }
}

/// Lexicographic objective order: finite before infinite, then `f2`, `f3`.
pub(crate) fn objective_order(a: &ObjectiveVector, b: &ObjectiveVector) -> std::cmp::Ordering {
    a.f1_s.total_cmp(&b.f1_s).then(a.f2.total_cmp(&b.f2)).then(a.f3_j.total_cmp(&b.f3_j))
}

/// Sorts `(solution, objectives)` pairs into salp-chain order.
pub(crate) fn sort_population(pop: &mut Vec<(Solution, ObjectiveVector)>) {
    pop.sort_by(|a, b| objective_order(&a.1, &b.1));
}

/// The leader draw for one individual: an archive member chosen from sparse
/// cells, or the population's lexicographic best while the archive is empty.
pub(crate) fn select_guide(
    archive: &Archive<Solution>,
    population_best: &Solution,
    rng: &mut ChaCha8Rng,
) -> Solution {
    match archive.select_leader(rng) {
        Some(entry) => entry.item.clone(),
        None => population_best.clone(),
    }
}

/// Final archive contents as result entries.
pub(crate) fn final_entries(archive: &Archive<Solution>) -> Vec<FinalEntry> {
    archive
        .entries()
        .iter()
        .map(|e: &ArchiveEntry<Solution>| FinalEntry {
            id: e.id,
            objectives: e.objectives,
            solution: e.item.clone(),
        })
        .collect()
}
