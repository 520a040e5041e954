//! Partial-ACO.
//!
//! Every ant remembers the best solution it has produced (`l_best`). Each
//! iteration an ant copies a random contiguous, possibly wrapping, segment
//! of its `l_best` and completes the rest with the random proportional rule.
//! The child replaces `l_best` only if strictly better. The length of the
//! copied segment is bounded below by the modification cap, except for a
//! rare escape that allows a rebuild of any size.
//!
//! Ants construct concurrently against the population (or matrix) state of
//! the previous barrier; replacements are applied in ant order at the
//! barrier, so results are independent of the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{Builder, ChoiceTable, Counters, Exponents, PheromoneSource};
use crate::error::{Error, Result};
use crate::eval::{evaluate, quality};
use crate::model::{Gene, Instance, Solution};
use crate::pheromone::{EdgeMatrix, PopulationView};
use crate::run::{with_pool, RunOutput, RunStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Pheromone reconstructed from the ants' `l_best` solutions.
    MatrixFree,
    /// Ants' `l_best` solutions deposit into an evaporating edge matrix.
    PheromoneMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacoConfig {
    pub n_ants: usize,
    pub max_iterations: u64,
    pub alpha: f64,
    pub beta: f64,
    /// Evaporation rate, used by the matrix variant only.
    pub rho: f64,
    /// Largest fraction of `l_best` an ant may rebuild, in `(0, 1]`.
    pub max_modify: f64,
    /// Probability that the cap is lifted for one reconstruction.
    pub escape_prob: f64,
    pub eval_budget: Option<u64>,
    pub seed: u64,
    /// Trace sampling stride in iterations.
    pub trace_stride: u64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

impl PacoConfig {
    pub fn matrix_free() -> Self {
        PacoConfig {
            n_ants: 32,
            max_iterations: 6_000_000,
            alpha: 3.0,
            beta: 1.0,
            rho: 0.5,
            max_modify: 1.0,
            escape_prob: 0.001,
            eval_budget: None,
            seed: 0,
            trace_stride: 100,
            threads: None,
        }
    }

    pub fn pheromone_matrix() -> Self {
        PacoConfig {
            n_ants: 192,
            max_iterations: 1_000_000,
            alpha: 1.0,
            ..PacoConfig::matrix_free()
        }
    }

    pub fn for_variant(variant: Variant) -> Self {
        match variant {
            Variant::MatrixFree => Self::matrix_free(),
            Variant::PheromoneMatrix => Self::pheromone_matrix(),
        }
    }

    pub fn validate(&self, variant: Variant) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_ants == 0 {
            return fail("n_ants must be at least 1".into());
        }
        if !(self.max_modify > 0.0 && self.max_modify <= 1.0) {
            return fail(format!("max_modify {} outside (0, 1]", self.max_modify));
        }
        if !(0.0..=1.0).contains(&self.escape_prob) {
            return fail(format!("escape_prob {} outside [0, 1]", self.escape_prob));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0 && self.beta.is_finite() && self.beta >= 0.0)
        {
            return fail(format!("alpha {} / beta {} must be finite and >= 0", self.alpha, self.beta));
        }
        if variant == Variant::PheromoneMatrix && !(self.rho > 0.0 && self.rho < 1.0) {
            return fail(format!("rho {} outside (0, 1)", self.rho));
        }
        if let Some(b) = self.eval_budget {
            if b < self.n_ants as u64 {
                return fail(format!(
                    "eval_budget {b} cannot cover the {} initial constructions",
                    self.n_ants
                ));
            }
        }
        if self.trace_stride == 0 {
            return fail("trace_stride must be at least 1".into());
        }
        Ok(())
    }

    fn exponents(&self) -> Exponents {
        Exponents {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

impl Default for PacoConfig {
    fn default() -> Self {
        Self::matrix_free()
    }
}

/// An ant: its best solution so far plus a private random stream.
#[derive(Debug, Clone)]
pub struct AntState {
    pub l_best: Solution,
    pub l_best_quality: f64,
    rng: ChaCha8Rng,
    builder: Builder,
    child: Vec<Gene>,
}

impl AntState {
    /// Ant `index` of a run seeded with `seed`; every ant draws from its own
    /// ChaCha stream.
    pub fn new(instance: &Instance, seed: u64, index: usize) -> Self {
        AntState {
            l_best: Solution::new(Vec::new()),
            l_best_quality: f64::INFINITY,
            rng: ant_rng(seed, index),
            builder: Builder::new(instance.n_genes()),
            child: Vec::with_capacity(instance.n_genes()),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn footprint(&self) -> usize {
        self.l_best.len() + self.child.capacity() + self.builder.footprint()
    }
}

pub(crate) fn ant_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);
    rng
}

/// Fully probabilistic construction starting from a random vehicle.
pub fn construct_initial<R: Rng + ?Sized>(
    instance: &Instance,
    source: PheromoneSource<'_>,
    exps: Exponents,
    rng: &mut R,
) -> Solution {
    let mut builder = Builder::new(instance.n_genes());
    let mut out = Vec::with_capacity(instance.n_genes());
    builder.build(instance, source, exps, &[], rng, &mut out, &mut Counters::default());
    Solution::new(out)
}

/// Contiguous cyclic segment of `l_best` to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Retention {
    pub start: usize,
    pub len: usize,
}

/// Smallest retained length allowed by the cap for a sequence of `n` genes.
pub fn retention_floor(n: usize, max_modify: f64) -> usize {
    // the epsilon absorbs representation error such as (1 - 0.7) * 10
    let floor = (((1.0 - max_modify) * n as f64) - 1e-9).ceil().max(0.0) as usize;
    floor.min(n.saturating_sub(1))
}

/// Start uniform in `[0, n)`; length uniform in `[floor, n - 1]`, or in
/// `[0, n - 1]` with probability `escape_prob`.
pub fn select_retention<R: Rng + ?Sized>(
    n: usize,
    max_modify: f64,
    escape_prob: f64,
    rng: &mut R,
) -> Retention {
    assert!(n >= 2, "retention needs at least two genes");
    let start = rng.random_range(0..n);
    let escape = escape_prob > 0.0 && rng.random::<f64>() < escape_prob;
    let lower = if escape { 0 } else { retention_floor(n, max_modify) };
    let len = rng.random_range(lower..n);
    Retention { start, len }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub solution: Solution,
    pub retention: Retention,
    pub counters: Counters,
}

/// Copies a retained segment of the ant's `l_best` and completes it.
pub fn partial_reconstruct(
    ant: &mut AntState,
    instance: &Instance,
    source: PheromoneSource<'_>,
    config: &PacoConfig,
) -> Reconstruction {
    let mut counters = Counters::default();
    let retention = reconstruct_into(ant, instance, source, config, &mut counters);
    Reconstruction {
        solution: Solution::new(ant.child.clone()),
        retention,
        counters,
    }
}

fn reconstruct_into(
    ant: &mut AntState,
    instance: &Instance,
    source: PheromoneSource<'_>,
    config: &PacoConfig,
    counters: &mut Counters,
) -> Retention {
    let n = ant.l_best.len();
    let retention = if n >= 2 {
        select_retention(n, config.max_modify, config.escape_prob, &mut ant.rng)
    } else {
        Retention { start: 0, len: 0 }
    };
    let prefix: Vec<Gene> = (0..retention.len)
        .map(|k| ant.l_best.genes[(retention.start + k) % n])
        .collect();
    ant.builder.build(
        instance,
        source,
        config.exponents(),
        &prefix,
        &mut ant.rng,
        &mut ant.child,
        counters,
    );
    retention
}

/// Runs Partial-ACO until `max_iterations` or the evaluation budget.
pub fn run_paco(instance: &Instance, config: &PacoConfig, variant: Variant) -> Result<RunOutput> {
    config.validate(variant)?;
    with_pool(config.threads, || Colony::new(instance, config, variant).run())
}

struct Colony<'a> {
    instance: &'a Instance,
    config: &'a PacoConfig,
    variant: Variant,
    ants: Vec<AntState>,
    stats: RunStats,
}

impl<'a> Colony<'a> {
    fn new(instance: &'a Instance, config: &'a PacoConfig, variant: Variant) -> Self {
        let ants = (0..config.n_ants)
            .map(|k| AntState::new(instance, config.seed, k))
            .collect();
        Colony {
            instance,
            config,
            variant,
            ants,
            stats: RunStats::default(),
        }
    }

    fn run(mut self) -> Result<RunOutput> {
        let instance = self.instance;
        let config = self.config;
        let exps = config.exponents();
        let budget = config.eval_budget.unwrap_or(u64::MAX);

        let init: Vec<Counters> = self
            .ants
            .par_iter_mut()
            .map(|ant| {
                let mut c = Counters::default();
                ant.builder.build(
                    instance,
                    PheromoneSource::Uniform,
                    exps,
                    &[],
                    &mut ant.rng,
                    &mut ant.child,
                    &mut c,
                );
                ant.l_best = Solution::new(ant.child.clone());
                ant.l_best_quality = quality(instance, &ant.l_best.genes).cost;
                c
            })
            .collect();
        self.count(&init, self.ants.len());

        let mut view = PopulationView::new(
            self.ants.iter().map(|a| (&a.l_best, a.l_best_quality)),
            config.alpha,
        );
        let mut matrix = match self.variant {
            Variant::MatrixFree => None,
            Variant::PheromoneMatrix => {
                let mut m = EdgeMatrix::new(instance.n_genes(), 0.0);
                self.deposit_population(&mut m, &view)?;
                let table = ChoiceTable::new(instance, &m, exps);
                Some((m, table))
            }
        };
        self.stats.sample(view.g_best());

        while self.stats.iterations < config.max_iterations && self.stats.evaluations < budget {
            let active = (budget - self.stats.evaluations).min(self.ants.len() as u64) as usize;
            let source = match &matrix {
                None => PheromoneSource::Population(&view),
                Some((_, table)) => PheromoneSource::Matrix(table),
            };
            let outcomes: Vec<(f64, Counters)> = self.ants[..active]
                .par_iter_mut()
                .map(|ant| {
                    let mut c = Counters::default();
                    reconstruct_into(ant, instance, source, config, &mut c);
                    (quality(instance, &ant.child).cost, c)
                })
                .collect();

            // barrier
            let counters: Vec<Counters> = outcomes.iter().map(|o| o.1).collect();
            self.count(&counters, active);
            for (k, (ant, &(cost, _))) in self.ants.iter_mut().zip(&outcomes).enumerate() {
                if cost < ant.l_best_quality {
                    std::mem::swap(&mut ant.l_best.genes, &mut ant.child);
                    ant.l_best_quality = cost;
                    view.replace(k, &ant.l_best, cost);
                }
            }
            view.refresh();
            if let Some((m, table)) = matrix.as_mut() {
                m.evaporate(config.rho)?;
                self.deposit_population(m, &view)?;
                *table = ChoiceTable::new(instance, m, exps);
            }

            self.stats.iterations += 1;
            if self.stats.iterations.is_multiple_of(config.trace_stride) {
                self.stats.sample(view.g_best());
            }
        }
        self.stats.sample(view.g_best());

        let best = self
            .ants
            .iter()
            .min_by(|a, b| a.l_best_quality.total_cmp(&b.l_best_quality))
            .expect("at least one ant");
        let report = evaluate(instance, &best.l_best)?;
        debug_assert_eq!(report.cost, best.l_best_quality);
        Ok(RunOutput {
            best: best.l_best.clone(),
            report,
            stats: self.stats,
        })
    }

    fn count(&mut self, counters: &[Counters], evaluations: usize) {
        for c in counters {
            self.stats.decisions += c.decisions;
            self.stats.comparisons += c.comparisons;
            self.stats.scored += c.scored;
        }
        self.stats.evaluations += evaluations as u64;
    }

    fn deposit_population(&mut self, matrix: &mut EdgeMatrix, view: &PopulationView) -> Result<()> {
        for (k, &amount) in view.amounts().iter().enumerate() {
            if amount > 0.0 {
                matrix.deposit_tour(view.genes(k), amount)?;
                self.stats.deposits += 1;
            }
        }
        Ok(())
    }
}

/// Auxiliary memory of a matrix-free colony in gene-sized slots, excluding
/// the instance itself.
pub fn matrix_free_footprint(instance: &Instance, config: &PacoConfig) -> usize {
    let ants: Vec<AntState> = (0..config.n_ants)
        .map(|k| {
            let mut ant = AntState::new(instance, config.seed, k);
            ant.l_best = construct_initial(
                instance,
                PheromoneSource::Uniform,
                config.exponents(),
                &mut ant.rng,
            );
            ant
        })
        .collect();
    let view = PopulationView::new(ants.iter().map(|a| (&a.l_best, 1.0)), config.alpha);
    ants.iter().map(AntState::footprint).sum::<usize>() + view.footprint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, validate_solution, GeneratorSpec};

    fn small() -> Instance {
        generate_instance(&GeneratorSpec::new(3, 12, 5)).unwrap()
    }

    #[test]
    fn floor_examples() {
        assert_eq!(retention_floor(10, 0.5), 5);
        assert_eq!(retention_floor(10, 1.0), 0);
        assert_eq!(retention_floor(10, 0.25), 8);
        assert_eq!(retention_floor(10, 0.7), 3);
        assert_eq!(retention_floor(2, 0.01), 1);
    }

    #[test]
    fn capped_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = [false; 10];
        for _ in 0..10_000 {
            let r = select_retention(10, 0.5, 0.0, &mut rng);
            assert!((5..=9).contains(&r.len), "{r:?}");
            assert!(r.start < 10);
            seen[r.len] = true;
        }
        assert!(seen[5..].iter().all(|&s| s));
    }

    #[test]
    fn unrestricted_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut seen = [false; 10];
        for _ in 0..10_000 {
            let r = select_retention(10, 1.0, 0.001, &mut rng);
            assert!(r.len <= 9);
            seen[r.len] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn escape_rate_matches_binomial() {
        // P(len < 5) = 0.001 * 5/10; over 1e5 draws mean 50, sd 7.0693
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let below = (0..100_000)
            .filter(|_| select_retention(10, 0.5, 0.001, &mut rng).len < 5)
            .count() as f64;
        assert!((28.79..=71.21).contains(&below), "{below}");
    }

    #[test]
    fn initial_construction_starts_with_a_vehicle() {
        let inst = small();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let exps = Exponents { alpha: 3.0, beta: 1.0 };
        for _ in 0..1000 {
            let s = construct_initial(&inst, PheromoneSource::Uniform, exps, &mut rng);
            assert!(inst.is_vehicle(s.genes[0]));
            assert!(validate_solution(&inst, &s).is_ok());
        }
    }

    fn seeded_ant(inst: &Instance) -> AntState {
        let mut ant = AntState::new(inst, 9, 0);
        let exps = Exponents { alpha: 3.0, beta: 1.0 };
        ant.l_best = construct_initial(inst, PheromoneSource::Uniform, exps, &mut ant.rng);
        ant.l_best_quality = quality(inst, &ant.l_best.genes).cost;
        ant
    }

    #[test]
    fn retained_segment_is_copied_in_order() {
        let inst = small();
        let mut ant = seeded_ant(&inst);
        let view = PopulationView::new([(&ant.l_best.clone(), ant.l_best_quality)], 3.0);
        let config = PacoConfig { max_modify: 0.5, ..PacoConfig::matrix_free() };
        let n = inst.n_genes();
        for _ in 0..1000 {
            let r = partial_reconstruct(&mut ant, &inst, PheromoneSource::Population(&view), &config);
            let Retention { start, len } = r.retention;
            for k in 0..len {
                assert_eq!(r.solution.genes[k], ant.l_best.genes[(start + k) % n]);
            }
            assert!(validate_solution(&inst, &r.solution).is_ok());
            assert_eq!(r.counters.decisions as usize, n - len);
        }
    }

    #[test]
    fn near_full_retention_is_a_rotation_up_to_one_gene() {
        let inst = small();
        let mut ant = seeded_ant(&inst);
        let n = inst.n_genes();
        // cap of one gene out of n
        let config = PacoConfig {
            max_modify: 1.0 / n as f64,
            escape_prob: 0.0,
            ..PacoConfig::matrix_free()
        };
        for _ in 0..200 {
            let r = partial_reconstruct(&mut ant, &inst, PheromoneSource::Uniform, &config);
            assert_eq!(r.retention.len, n - 1);
            let rotated: Vec<Gene> =
                (0..n).map(|k| ant.l_best.genes[(r.retention.start + k) % n]).collect();
            let differing = rotated.iter().zip(&r.solution.genes).filter(|(a, b)| a != b).count();
            assert!(differing <= 1);
        }
    }

    #[test]
    fn config_errors() {
        let inst = small();
        let bad = [
            PacoConfig { n_ants: 0, ..PacoConfig::default() },
            PacoConfig { max_modify: 0.0, ..PacoConfig::default() },
            PacoConfig { max_modify: 1.5, ..PacoConfig::default() },
            PacoConfig { escape_prob: -0.1, ..PacoConfig::default() },
            PacoConfig { eval_budget: Some(3), ..PacoConfig::default() },
        ];
        for c in bad {
            assert!(matches!(run_paco(&inst, &c, Variant::MatrixFree), Err(Error::Config(_))));
        }
        let c = PacoConfig { rho: 1.0, ..PacoConfig::pheromone_matrix() };
        assert!(run_paco(&inst, &c, Variant::PheromoneMatrix).is_err());
    }

    #[test]
    fn one_iteration_budget_returns_best_initial() {
        let inst = small();
        let config = PacoConfig { eval_budget: Some(32), seed: 5, ..PacoConfig::default() };
        let out = run_paco(&inst, &config, Variant::MatrixFree).unwrap();
        assert_eq!(out.stats.iterations, 0);
        assert_eq!(out.stats.evaluations, 32);
        let best_initial = (0..32)
            .map(|k| {
                let mut rng = ant_rng(5, k);
                let s = construct_initial(
                    &inst,
                    PheromoneSource::Uniform,
                    config.exponents(),
                    &mut rng,
                );
                quality(&inst, &s.genes).cost
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(out.report.cost, best_initial);
    }

    #[test]
    fn trace_is_non_increasing_and_budget_exact() {
        let inst = small();
        for variant in [Variant::MatrixFree, Variant::PheromoneMatrix] {
            let config = PacoConfig {
                eval_budget: Some(5_000),
                max_modify: 0.5,
                trace_stride: 3,
                seed: 2,
                ..PacoConfig::for_variant(variant)
            };
            let out = run_paco(&inst, &config, variant).unwrap();
            assert_eq!(out.stats.evaluations, 5_000);
            let trace = &out.stats.trace;
            assert!(trace.windows(2).all(|w| w[1].best_c <= w[0].best_c));
            assert_eq!(trace.last().unwrap().best_c, out.report.cost);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let inst = small();
        let base = PacoConfig { eval_budget: Some(3_000), seed: 8, ..PacoConfig::default() };
        let one = run_paco(&inst, &PacoConfig { threads: Some(1), ..base.clone() }, Variant::MatrixFree)
            .unwrap();
        let four = run_paco(&inst, &PacoConfig { threads: Some(4), ..base }, Variant::MatrixFree)
            .unwrap();
        assert_eq!(one.best, four.best);
        assert_eq!(one.stats, four.stats);
    }

    #[test]
    fn matrix_free_memory_is_linear_in_ants_and_genes() {
        let inst = generate_instance(&GeneratorSpec::new(8, 120, 1)).unwrap();
        let config = PacoConfig::matrix_free();
        let n = inst.n_genes();
        let slots = matrix_free_footprint(&inst, &config);
        assert!(slots <= 16 * config.n_ants * n, "{slots}");
        let half = PacoConfig { n_ants: 16, ..config };
        assert!(matrix_free_footprint(&inst, &half) * 2 <= slots + 16 * n);
    }
}
