use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::eval::QualityReport;
use crate::model::Solution;

/// One sample of solver progress.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iter: u64,
    pub evals: u64,
    #[serde(rename = "best_C")]
    pub best_c: f64,
    pub comparisons: u64,
}

/// Platform-independent work counters of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub iterations: u64,
    pub evaluations: u64,
    /// Probabilistic construction decisions.
    pub decisions: u64,
    /// Candidates considered by the random proportional rule, summed over
    /// decisions.
    pub comparisons: u64,
    /// Pheromone weights actually computed.
    pub scored: u64,
    /// Tours deposited into a pheromone matrix.
    pub deposits: u64,
    pub trace: Vec<TracePoint>,
}

impl RunStats {
    pub fn comparisons_per_candidate(&self) -> f64 {
        if self.evaluations == 0 {
            0.0
        } else {
            self.comparisons as f64 / self.evaluations as f64
        }
    }

    pub(crate) fn sample(&mut self, best_c: f64) {
        let point = TracePoint {
            iter: self.iterations,
            evals: self.evaluations,
            best_c,
            comparisons: self.comparisons,
        };
        if self.trace.last().map(|p| p.evals) != Some(point.evals) {
            self.trace.push(point);
        }
    }

    /// Writes the trace as JSON lines.
    pub fn write_trace<W: Write>(&self, mut out: W) -> Result<()> {
        for p in &self.trace {
            serde_json::to_writer(&mut out, p)?;
            out.write_all(b"\n").map_err(|e| crate::Error::io("<trace>", e))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub best: Solution,
    pub report: QualityReport,
    pub stats: RunStats,
}

/// Optional fixed-size thread pool for the iteration-barrier solvers. Results
/// do not depend on the thread count.
pub(crate) fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}
