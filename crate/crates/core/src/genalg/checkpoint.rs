//! On-disk state of a running optimization.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Candidate, EpochLog, GaConfig, GaError, Origin, Population};
use crate::codes::alist::write_alist;
use crate::codes::ParityCheckMatrix;
use crate::eval::Fitness;

pub const LOG_HEADER: &str = "epoch,best_bler,median_bler,E_best,frames_spent,best_id,population";
const SNAPSHOT: &str = "population.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StoredCandidate {
    id: u64,
    origin: Origin,
    fitness: Option<Fitness>,
    fitness_seed: Option<u64>,
    /// Row-major edge list.
    edges: Vec<(usize, usize)>,
}

/// Everything needed to continue a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Snapshot {
    pub config: GaConfig,
    pub epoch: usize,
    pub next_id: u64,
    candidates: Vec<StoredCandidate>,
    pub log: Vec<EpochLog>,
}

impl Snapshot {
    fn of(cfg: &GaConfig, pop: &Population, log: &[EpochLog]) -> Self {
        Snapshot {
            config: cfg.clone(),
            epoch: pop.epoch,
            next_id: pop.next_id,
            candidates: pop
                .candidates
                .iter()
                .map(|c| StoredCandidate {
                    id: c.id,
                    origin: c.origin.clone(),
                    fitness: c.fitness,
                    fitness_seed: c.fitness_seed,
                    edges: c.matrix.edges().collect(),
                })
                .collect(),
            log: log.to_vec(),
        }
    }

    pub(super) fn into_population(self, cfg: &GaConfig) -> Result<(Population, Vec<EpochLog>), GaError> {
        let template = cfg.structure()?;
        let candidates = self
            .candidates
            .into_iter()
            .map(|s| {
                let mut h = ParityCheckMatrix::new(cfg.m, cfg.n, s.edges)?;
                if let Some(t) = &template {
                    h = h.with_template(t.clone())?;
                }
                Ok(Candidate {
                    id: s.id,
                    matrix: Arc::new(h),
                    fitness: s.fitness,
                    fitness_seed: s.fitness_seed,
                    origin: s.origin,
                })
            })
            .collect::<Result<Vec<_>, GaError>>()?;
        if candidates.is_empty() || self.log.last().map(|l| l.epoch) != Some(self.epoch) {
            return Err(GaError::Checkpoint("snapshot is empty or its log is inconsistent".into()));
        }
        let pop = Population { epoch: self.epoch, candidates, next_id: self.next_id };
        if !pop.is_evaluated() {
            return Err(GaError::NotEvaluated);
        }
        Ok((pop, self.log))
    }
}

pub fn load_snapshot(dir: &Path) -> Result<Snapshot, GaError> {
    let text = std::fs::read_to_string(dir.join(SNAPSHOT))?;
    serde_json::from_str(&text).map_err(|e| GaError::Checkpoint(format!("{SNAPSHOT}: {e}")))
}

/// Writes the per-epoch best matrix, the log, `best.alist` and the snapshot.
/// The snapshot goes through a temporary file so a crash never leaves a
/// half-written one behind.
pub(super) fn write(dir: &Path, cfg: &GaConfig, pop: &Population, log: &[EpochLog]) -> Result<(), GaError> {
    let best = pop.best().ok_or(GaError::NotEvaluated)?;
    write_alist(&best.matrix, dir.join(format!("epoch_{}_best.alist", pop.epoch)))?;
    write_alist(&best.matrix, dir.join("best.alist"))?;

    let mut csv = String::from(LOG_HEADER);
    csv.push('\n');
    for l in log {
        csv.push_str(&format!(
            "{},{:e},{:e},{},{},{},{}\n",
            l.epoch, l.best_bler, l.median_bler, l.best_edges, l.frames_spent, l.best_id, l.population
        ));
    }
    std::fs::write(dir.join("log.csv"), csv)?;

    let json = serde_json::to_vec(&Snapshot::of(cfg, pop, log))
        .map_err(|e| GaError::Checkpoint(e.to_string()))?;
    let tmp = dir.join(format!("{SNAPSHOT}.tmp"));
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(&json)?;
    f.sync_all()?;
    std::fs::rename(tmp, dir.join(SNAPSHOT))?;
    Ok(())
}
