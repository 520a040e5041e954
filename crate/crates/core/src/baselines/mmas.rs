//! Max-Min Ant System with a full edge matrix.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{Builder, ChoiceTable, Counters, Exponents, PheromoneSource};
use crate::error::{Error, Result};
use crate::eval::{evaluate, quality};
use crate::model::{Gene, Instance, Solution};
use crate::paco::ant_rng;
use crate::pheromone::EdgeMatrix;
use crate::run::{with_pool, RunOutput, RunStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmasConfig {
    pub n_ants: usize,
    pub max_iterations: u64,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub eval_budget: Option<u64>,
    pub seed: u64,
    pub trace_stride: u64,
    pub threads: Option<usize>,
}

impl Default for MmasConfig {
    fn default() -> Self {
        MmasConfig {
            n_ants: 192,
            max_iterations: 1_000_000,
            alpha: 1.0,
            beta: 1.0,
            rho: 0.02,
            eval_budget: None,
            seed: 0,
            trace_stride: 100,
            threads: None,
        }
    }
}

impl MmasConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_ants == 0 {
            return fail("n_ants must be at least 1".into());
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return fail(format!("rho {} outside (0, 1)", self.rho));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0 && self.beta.is_finite() && self.beta >= 0.0)
        {
            return fail(format!("alpha {} / beta {} must be finite and >= 0", self.alpha, self.beta));
        }
        if let Some(b) = self.eval_budget {
            if b < self.n_ants as u64 {
                return fail(format!("eval_budget {b} is below n_ants {}", self.n_ants));
            }
        }
        if self.trace_stride == 0 {
            return fail("trace_stride must be at least 1".into());
        }
        Ok(())
    }
}

/// `(tau_min, tau_max)` for the best-so-far cost on `n` genes.
pub fn mmas_bounds(best_cost: f64, rho: f64, n: usize) -> (f64, f64) {
    let tau_max = 1.0 / (rho * best_cost.max(1e-9));
    (tau_max / (2.0 * n as f64), tau_max)
}

struct Ant {
    rng: rand_chacha::ChaCha8Rng,
    builder: Builder,
    tour: Vec<Gene>,
}

pub fn run_mmas(instance: &Instance, config: &MmasConfig) -> Result<RunOutput> {
    config.validate()?;
    with_pool(config.threads, || mmas(instance, config))
}

fn mmas(instance: &Instance, config: &MmasConfig) -> Result<RunOutput> {
    let n = instance.n_genes();
    let exps = Exponents {
        alpha: config.alpha,
        beta: config.beta,
    };
    let budget = config.eval_budget.unwrap_or(u64::MAX);
    let mut ants: Vec<Ant> = (0..config.n_ants)
        .map(|k| Ant {
            rng: ant_rng(config.seed, k),
            builder: Builder::new(n),
            tour: Vec::with_capacity(n),
        })
        .collect();
    let mut matrix = EdgeMatrix::new(n, 0.0);
    let mut table: Option<ChoiceTable> = None;
    let mut best: Vec<Gene> = Vec::new();
    let mut best_cost = f64::INFINITY;
    let mut stats = RunStats::default();

    let mut first = true;
    while (first || stats.iterations < config.max_iterations) && stats.evaluations < budget {
        let active = (budget - stats.evaluations).min(ants.len() as u64) as usize;
        let source = match &table {
            None => PheromoneSource::Uniform,
            Some(t) => PheromoneSource::Matrix(t),
        };
        let outcomes: Vec<(f64, Counters)> = ants[..active]
            .par_iter_mut()
            .map(|ant| {
                let mut c = Counters::default();
                ant.builder
                    .build(instance, source, exps, &[], &mut ant.rng, &mut ant.tour, &mut c);
                (quality(instance, &ant.tour).cost, c)
            })
            .collect();

        for (ant, (cost, c)) in ants.iter().zip(&outcomes) {
            stats.decisions += c.decisions;
            stats.comparisons += c.comparisons;
            stats.scored += c.scored;
            if *cost < best_cost {
                best_cost = *cost;
                best.clone_from(&ant.tour);
            }
        }
        stats.evaluations += active as u64;

        let (lo, hi) = mmas_bounds(best_cost, config.rho, n);
        matrix.set_bounds(lo, hi)?;
        if first {
            matrix.fill(hi);
        }
        matrix.evaporate(config.rho)?;
        matrix.deposit_tour(&best, 1.0 / best_cost.max(1e-9))?;
        stats.deposits += 1;
        table = Some(ChoiceTable::new(instance, &matrix, exps));

        if first {
            // the construction from uniform pheromone is not counted as an
            // iteration
            first = false;
            stats.sample(best_cost);
            continue;
        }
        stats.iterations += 1;
        if stats.iterations.is_multiple_of(config.trace_stride) {
            stats.sample(best_cost);
        }
    }
    stats.sample(best_cost);

    let best = Solution::new(best);
    let report = evaluate(instance, &best)?;
    Ok(RunOutput {
        best,
        report,
        stats,
    })
}
