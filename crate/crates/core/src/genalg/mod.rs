//! Genetic optimization of parity-check matrices.
//!
//! Each epoch keeps the `T` best distinct matrices (with their cached
//! fitness), derives `mutations_per_elite` mutants from every elite and two
//! crossover offspring from every unordered elite pair, and scores all new
//! candidates at the design point. New candidates of one epoch share a noise
//! seed.

mod checkpoint;
mod operators;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{load_snapshot, Snapshot, LOG_HEADER};
pub use operators::{crossover, mutate, repair, Axis, MutationKind};

use crate::channels::{ChannelKind, OperatingPoint};
use crate::codes::alist::AlistError;
use crate::codes::{
    apply_template, random_column_regular, random_regular, CodeError, ParityCheckMatrix, StructureTemplate,
    TemplateKind,
};
use crate::decoder::DecoderConfig;
use crate::eval::{self, EvalError, Fitness, StoppingRule};
use crate::seed;

#[derive(Debug, Error)]
pub enum GaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("mutation impossible: {0}")]
    NoMutableEntry(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("population has not been evaluated")]
    NotEvaluated,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Alist(#[from] AlistError),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

// Stream tags for seed derivation.
const TAG_INIT: u64 = 1;
const TAG_MUTATE: u64 = 2;
const TAG_CROSS: u64 = 3;
const TAG_EVAL: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    pub n: usize,
    pub m: usize,
    /// Column weight of the random initial codes (of `H_L` in structured mode).
    #[serde(default = "default_vn_degree")]
    pub vn_degree: usize,
    /// Row weight of unstructured initial codes; `n * vn_degree / cn_degree` must equal `m`.
    #[serde(default = "default_cn_degree")]
    pub cn_degree: usize,
    #[serde(default = "default_template")]
    pub template: TemplateKind,
    /// Zero-based middle row of the PTB-IRA weight-three column.
    #[serde(default)]
    pub ptb_middle_row: Option<usize>,
    /// Number of elites `T`.
    #[serde(default = "default_elites")]
    pub elite_count: usize,
    #[serde(default = "default_mutations")]
    pub mutations_per_elite: usize,
    /// Size of the first population; defaults to the steady-state size.
    #[serde(default)]
    pub initial_population: Option<usize>,
    pub design: OperatingPoint,
    #[serde(default)]
    pub decoder: DecoderConfig,
    #[serde(default)]
    pub budget: StoppingRule,
    pub max_epochs: usize,
    #[serde(default)]
    pub target_bler: f64,
    #[serde(default)]
    pub master_seed: u64,
}

fn default_vn_degree() -> usize {
    3
}
fn default_cn_degree() -> usize {
    6
}
fn default_template() -> TemplateKind {
    TemplateKind::Unstructured
}
fn default_elites() -> usize {
    20
}
fn default_mutations() -> usize {
    3
}

impl GaConfig {
    /// Unstructured `(3,6)` setup with defaults for everything else.
    pub fn new(n: usize, m: usize, design_ebno_db: f64) -> Self {
        GaConfig {
            n,
            m,
            vn_degree: 3,
            cn_degree: 6,
            template: TemplateKind::Unstructured,
            ptb_middle_row: None,
            elite_count: 20,
            mutations_per_elite: 3,
            initial_population: None,
            design: OperatingPoint::new(ChannelKind::BiAwgn, design_ebno_db),
            decoder: DecoderConfig::default(),
            budget: StoppingRule { min_block_errors: 100, max_frames: 100_000 },
            max_epochs: 100,
            target_bler: 0.0,
            master_seed: 0,
        }
    }

    /// `T + T * mutations_per_elite + 2 * C(T, 2)`.
    pub fn population_size(&self) -> usize {
        let t = self.elite_count;
        t + t * self.mutations_per_elite + t * t.saturating_sub(1)
    }

    pub fn initial_size(&self) -> usize {
        self.initial_population.unwrap_or_else(|| self.population_size())
    }

    pub fn structure(&self) -> Result<Option<StructureTemplate>, GaError> {
        if self.template == TemplateKind::Unstructured {
            return Ok(None);
        }
        let mut t = StructureTemplate::new(self.template, self.m)?;
        if let Some(r) = self.ptb_middle_row {
            t = t.with_ptb_middle_row(r)?;
        }
        Ok(Some(t))
    }

    pub fn validate(&self) -> Result<(), GaError> {
        let bad = |s: String| Err(GaError::InvalidConfig(s));
        if self.elite_count < 2 {
            return bad(format!("elite_count must be at least 2, got {}", self.elite_count));
        }
        if self.initial_size() < self.elite_count {
            return bad("initial population smaller than the elite count".into());
        }
        if self.m == 0 || self.n <= self.m {
            return bad(format!("need 0 < m < n, got m={}, n={}", self.m, self.n));
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.target_bler) {
            return bad(format!("target_bler {} outside [0, 1]", self.target_bler));
        }
        if self.vn_degree == 0 || self.vn_degree > self.m {
            return bad(format!("vn_degree {} does not fit {} rows", self.vn_degree, self.m));
        }
        if self.template == TemplateKind::Unstructured
            && (self.cn_degree == 0 || self.n * self.vn_degree != self.m * self.cn_degree) {
                return bad(format!(
                    "({}, {})-regular codes of length {} do not have {} rows",
                    self.vn_degree, self.cn_degree, self.n, self.m
                ));
            }
        self.structure()?;
        self.decoder.validate().map_err(|e| GaError::InvalidConfig(e.to_string()))?;
        self.budget.validate()?;
        self.design
            .with_rate(0.5)
            .map_err(|e| GaError::InvalidConfig(format!("design point: {e}")))?;
        Ok(())
    }

    fn epoch_seed(&self, epoch: usize) -> u64 {
        seed::derive(self.master_seed, &[TAG_EVAL, epoch as u64])
    }
}

/// How a candidate came about.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "op")]
pub enum Origin {
    Initial,
    Mutation { parent: u64, kind: MutationKind },
    Crossover { parents: [u64; 2], axis: Axis, offspring: u8 },
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub id: u64,
    pub matrix: Arc<ParityCheckMatrix>,
    pub fitness: Option<Fitness>,
    /// Noise seed the fitness was measured under.
    pub fitness_seed: Option<u64>,
    pub origin: Origin,
}

impl Candidate {
    fn new(id: u64, matrix: ParityCheckMatrix, origin: Origin) -> Self {
        Candidate { id, matrix: Arc::new(matrix), fitness: None, fitness_seed: None, origin }
    }

    fn cmp_rank(&self, other: &Self) -> std::cmp::Ordering {
        match (&self.fitness, &other.fitness) {
            (Some(a), Some(b)) => a.rank_cmp(b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        }
        .then(self.id.cmp(&other.id))
    }
}

/// Candidates of one epoch, best first once evaluated.
#[derive(Debug, Clone)]
pub struct Population {
    pub epoch: usize,
    pub candidates: Vec<Candidate>,
    pub next_id: u64,
}

impl Population {
    pub fn best(&self) -> Option<&Candidate> {
        self.candidates.first()
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn is_evaluated(&self) -> bool {
        self.candidates.iter().all(|c| c.fitness.is_some())
    }

    fn sort(&mut self) {
        self.candidates.sort_by(Candidate::cmp_rank);
    }

    /// The `t` best distinct matrices, topped up with duplicates if fewer
    /// than `t` distinct ones exist.
    // Hashing ignores the lazily cached rank, so matrices are sound keys.
    #[allow(clippy::mutable_key_type)]
    pub fn elites(&self, t: usize) -> Vec<Candidate> {
        let mut seen = std::collections::HashSet::new();
        let mut chosen = Vec::with_capacity(t);
        let mut rest = Vec::new();
        for c in &self.candidates {
            if chosen.len() == t {
                break;
            }
            if seen.insert(c.matrix.clone()) {
                chosen.push(c.clone());
            } else {
                rest.push(c.clone());
            }
        }
        chosen.extend(rest.into_iter().take(t - chosen.len()));
        chosen
    }

    fn median_bler(&self) -> f64 {
        let mut b: Vec<f64> = self.candidates.iter().filter_map(|c| c.fitness.map(|f| f.bler)).collect();
        b.sort_by(f64::total_cmp);
        match b.len() {
            0 => f64::NAN,
            l if l % 2 == 1 => b[l / 2],
            l => 0.5 * (b[l / 2 - 1] + b[l / 2]),
        }
    }
}

/// Random initial population: `(vn, cn)`-regular codes, or random
/// column-regular `H_L` next to the template block.
pub fn init_population(cfg: &GaConfig) -> Result<Population, GaError> {
    cfg.validate()?;
    let template = cfg.structure()?;
    let candidates = (0..cfg.initial_size())
        .map(|i| {
            let s = seed::derive(cfg.master_seed, &[TAG_INIT, i as u64]);
            let h = match &template {
                None => random_regular(cfg.n, cfg.vn_degree, cfg.cn_degree, s)?,
                Some(t) => {
                    let mut rng = seed::rng(s, &[]);
                    let left = random_column_regular(cfg.m, cfg.n - cfg.m, cfg.vn_degree, &mut rng)?;
                    apply_template(&left, t)?
                }
            };
            Ok(Candidate::new(i as u64, h, Origin::Initial))
        })
        .collect::<Result<Vec<_>, GaError>>()?;
    let next_id = candidates.len() as u64;
    Ok(Population { epoch: 1, candidates, next_id })
}

/// Scores every unevaluated candidate with `seed`. Identical matrices are
/// simulated once and share the result.
#[allow(clippy::mutable_key_type)]
fn evaluate_new(candidates: &mut [Candidate], cfg: &GaConfig, seed: u64) -> Result<u64, GaError> {
    let mut known: HashMap<Arc<ParityCheckMatrix>, (Fitness, u64)> = HashMap::new();
    for c in candidates.iter() {
        if let (Some(f), Some(s)) = (c.fitness, c.fitness_seed) {
            known.entry(c.matrix.clone()).or_insert((f, s));
        }
    }
    let mut todo: Vec<Arc<ParityCheckMatrix>> = Vec::new();
    for c in candidates.iter().filter(|c| c.fitness.is_none()) {
        if !known.contains_key(&c.matrix) && !todo.contains(&c.matrix) {
            todo.push(c.matrix.clone());
        }
    }
    let scored: Vec<Fitness> = todo
        .par_iter()
        .map(|h| eval::fitness(h, &cfg.design, &cfg.decoder, &cfg.budget, seed))
        .collect::<Result<_, _>>()?;
    let frames = scored.iter().map(|f| f.frames).sum();
    for (h, f) in todo.into_iter().zip(scored) {
        known.insert(h, (f, seed));
    }
    for c in candidates.iter_mut().filter(|c| c.fitness.is_none()) {
        let (f, s) = known[&c.matrix];
        c.fitness = Some(f);
        c.fitness_seed = Some(s);
    }
    Ok(frames)
}

/// Evaluates the initial population and sorts it. Returns the number of
/// simulated frames.
pub fn evaluate_population(pop: &mut Population, cfg: &GaConfig) -> Result<u64, GaError> {
    let frames = evaluate_new(&mut pop.candidates, cfg, cfg.epoch_seed(pop.epoch))?;
    pop.sort();
    Ok(frames)
}

/// Builds and evaluates population `pop.epoch + 1`.
pub fn step_epoch(pop: &Population, cfg: &GaConfig) -> Result<(Population, u64), GaError> {
    if !pop.is_evaluated() {
        return Err(GaError::NotEvaluated);
    }
    let epoch = pop.epoch + 1;
    let elites = pop.elites(cfg.elite_count);
    let mut next_id = pop.next_id;
    let mut fresh = Vec::with_capacity(cfg.population_size());

    for (rank, e) in elites.iter().enumerate() {
        for j in 0..cfg.mutations_per_elite {
            let kind = MutationKind::ALL[j % 3];
            let mut rng = seed::rng(cfg.master_seed, &[TAG_MUTATE, epoch as u64, rank as u64, j as u64]);
            let child = repair(&mutate(&e.matrix, kind, &mut rng)?, &mut rng);
            fresh.push(Candidate::new(next_id, child, Origin::Mutation { parent: e.id, kind }));
            next_id += 1;
        }
    }
    let mut pair = 0u64;
    for a in 0..elites.len() {
        for b in a + 1..elites.len() {
            let axis = if pair.is_multiple_of(2) { Axis::Vertical } else { Axis::Horizontal };
            let mut rng = seed::rng(cfg.master_seed, &[TAG_CROSS, epoch as u64, pair]);
            let (x, y) = crossover(&elites[a].matrix, &elites[b].matrix, axis, &mut rng)?;
            let parents = [elites[a].id, elites[b].id];
            fresh.push(Candidate::new(next_id, x, Origin::Crossover { parents, axis, offspring: 0 }));
            fresh.push(Candidate::new(next_id + 1, y, Origin::Crossover { parents, axis, offspring: 1 }));
            next_id += 2;
            pair += 1;
        }
    }

    let mut candidates = elites;
    candidates.extend(fresh);
    let frames = evaluate_new(&mut candidates, cfg, cfg.epoch_seed(epoch))?;
    let mut next = Population { epoch, candidates, next_id };
    next.sort();
    Ok((next, frames))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub best_bler: f64,
    pub median_bler: f64,
    pub best_edges: usize,
    pub frames_spent: u64,
    pub best_id: u64,
    pub population: usize,
}

impl EpochLog {
    fn of(pop: &Population, frames_spent: u64) -> Self {
        let best = pop.best().expect("non-empty population");
        let f = best.fitness.expect("evaluated");
        EpochLog {
            epoch: pop.epoch,
            best_bler: f.bler,
            median_bler: pop.median_bler(),
            best_edges: f.edges,
            frames_spent,
            best_id: best.id,
            population: pop.len(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Write `epoch_<i>_best.alist`, `log.csv`, `best.alist` and a resumable
    /// `population.json` here.
    pub checkpoint_dir: Option<PathBuf>,
    /// Keep every candidate ever created in [`RunResult::history`].
    pub keep_history: bool,
    /// Print one progress line per epoch to standard error.
    pub progress: bool,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Candidate,
    pub log: Vec<EpochLog>,
    pub final_population: Population,
    pub history: Vec<Candidate>,
}

/// Runs the optimizer from a fresh initial population.
pub fn run(cfg: &GaConfig, opts: &RunOptions) -> Result<RunResult, GaError> {
    let mut pop = init_population(cfg)?;
    let frames = evaluate_population(&mut pop, cfg)?;
    let log = vec![EpochLog::of(&pop, frames)];
    let history = if opts.keep_history { pop.candidates.clone() } else { Vec::new() };
    continue_run(cfg, opts, pop, log, history)
}

/// Resumes a run from the `population.json` in `dir`.
pub fn resume(cfg: &GaConfig, dir: &Path, opts: &RunOptions) -> Result<RunResult, GaError> {
    let snap = load_snapshot(dir)?;
    // Termination settings may change between sessions; nothing else may.
    let mut stored = snap.config.clone();
    stored.max_epochs = cfg.max_epochs;
    stored.target_bler = cfg.target_bler;
    if &stored != cfg {
        return Err(GaError::Checkpoint("configuration differs from the checkpointed run".into()));
    }
    let (pop, log) = snap.into_population(cfg)?;
    continue_run(cfg, opts, pop, log, Vec::new())
}

/// Runs [`run`] on a dedicated pool of `workers` threads. Results do not
/// depend on `workers`.
pub fn run_with_workers(cfg: &GaConfig, opts: &RunOptions, workers: usize) -> Result<RunResult, GaError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| GaError::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| run(cfg, opts))
}

fn continue_run(
    cfg: &GaConfig,
    opts: &RunOptions,
    mut pop: Population,
    mut log: Vec<EpochLog>,
    mut history: Vec<Candidate>,
) -> Result<RunResult, GaError> {
    if let Some(dir) = &opts.checkpoint_dir {
        std::fs::create_dir_all(dir)?;
        checkpoint::write(dir, cfg, &pop, &log)?;
    }
    report(opts, log.last().expect("log has the first epoch"));
    while pop.epoch < cfg.max_epochs && !reached(cfg, &pop) {
        let (next, frames) = step_epoch(&pop, cfg)?;
        if opts.keep_history {
            history.extend(next.candidates.iter().filter(|c| c.id >= pop.next_id).cloned());
        }
        pop = next;
        log.push(EpochLog::of(&pop, frames));
        if let Some(dir) = &opts.checkpoint_dir {
            checkpoint::write(dir, cfg, &pop, &log)?;
        }
        report(opts, log.last().expect("just pushed"));
    }
    Ok(RunResult { best: pop.best().expect("non-empty").clone(), log, final_population: pop, history })
}

fn reached(cfg: &GaConfig, pop: &Population) -> bool {
    pop.best().and_then(|b| b.fitness).is_some_and(|f| f.bler <= cfg.target_bler)
}

fn report(opts: &RunOptions, l: &EpochLog) {
    if opts.progress {
        eprintln!(
            "epoch {:>4}  best BLER {:.3e}  median {:.3e}  E {}  frames {}",
            l.epoch, l.best_bler, l.median_bler, l.best_edges, l.frames_spent
        );
    }
}
