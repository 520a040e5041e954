//! Steady-state genetic algorithm.
//!
//! Each step picks two parents by tournament and makes one child, which
//! replaces the worse parent only if strictly better. A generation is
//! `population` steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::operators::{
    crossover_cx, crossover_ox, crossover_pmx, mutate_insert, mutate_reverse, mutate_swap,
};
use crate::construct::{Builder, Counters, Exponents, PheromoneSource};
use crate::error::{Error, Result};
use crate::eval::{evaluate, quality};
use crate::model::{Gene, Instance, Solution};
use crate::run::{RunOutput, RunStats};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population: usize,
    pub max_generations: u64,
    pub tournament: usize,
    pub crossover_prob: f64,
    pub mutation_prob: f64,
    pub eval_budget: Option<u64>,
    pub seed: u64,
    /// Trace sampling stride in steps.
    pub trace_stride: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 192,
            max_generations: 1_000_000,
            tournament: 5,
            crossover_prob: 0.5,
            mutation_prob: 0.5,
            eval_budget: None,
            seed: 0,
            trace_stride: 1000,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.population == 0 || self.tournament == 0 {
            return fail("population and tournament must be at least 1".into());
        }
        if self.tournament > self.population {
            return fail(format!(
                "tournament {} exceeds population {}",
                self.tournament, self.population
            ));
        }
        for (name, p) in [("crossover_prob", self.crossover_prob), ("mutation_prob", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} {p} outside [0, 1]"));
            }
        }
        if let Some(b) = self.eval_budget {
            if b < self.population as u64 {
                return fail(format!("eval_budget {b} is below population {}", self.population));
            }
        }
        if self.trace_stride == 0 {
            return fail("trace_stride must be at least 1".into());
        }
        Ok(())
    }
}

fn tournament<R: Rng + ?Sized>(costs: &[f64], size: usize, rng: &mut R) -> usize {
    let mut best = rng.random_range(0..costs.len());
    for _ in 1..size {
        let c = rng.random_range(0..costs.len());
        if costs[c] < costs[best] {
            best = c;
        }
    }
    best
}

pub fn run_ga(instance: &Instance, config: &GaConfig) -> Result<RunOutput> {
    config.validate()?;
    let n = instance.n_genes();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut stats = RunStats::default();
    let mut builder = Builder::new(n);
    let exps = Exponents { alpha: 1.0, beta: 0.0 };

    let mut pop: Vec<Vec<Gene>> = Vec::with_capacity(config.population);
    let mut costs: Vec<f64> = Vec::with_capacity(config.population);
    for _ in 0..config.population {
        let mut tour = Vec::with_capacity(n);
        let mut c = Counters::default();
        builder.build(instance, PheromoneSource::Uniform, exps, &[], &mut rng, &mut tour, &mut c);
        costs.push(quality(instance, &tour).cost);
        pop.push(tour);
    }
    stats.evaluations = config.population as u64;
    let best_of = |costs: &[f64]| costs.iter().copied().fold(f64::INFINITY, f64::min);
    stats.sample(best_of(&costs));

    let budget = config.eval_budget.unwrap_or(u64::MAX);
    let max_steps = config.max_generations.saturating_mul(config.population as u64);
    let mut steps = 0u64;
    while steps < max_steps && stats.evaluations < budget {
        let a = tournament(&costs, config.tournament, &mut rng);
        let b = tournament(&costs, config.tournament, &mut rng);
        let (fitter, worse) = if costs[b] < costs[a] { (b, a) } else { (a, b) };
        let mut changed = false;
        let mut child = if rng.random::<f64>() < config.crossover_prob {
            changed = true;
            match rng.random_range(0..3) {
                0 => crossover_cx(&pop[a], &pop[b])?,
                1 => crossover_ox(&pop[a], &pop[b], &mut rng)?,
                _ => crossover_pmx(&pop[a], &pop[b], &mut rng)?,
            }
        } else {
            pop[fitter].clone()
        };
        if rng.random::<f64>() < config.mutation_prob {
            changed = true;
            match rng.random_range(0..3) {
                0 => mutate_swap(&mut child, &mut rng),
                1 => mutate_reverse(&mut child, &mut rng),
                _ => mutate_insert(&mut child, &mut rng),
            }
        }
        steps += 1;
        stats.evaluations += 1;
        // an untouched clone is not a new solution
        if changed {
            let cost = quality(instance, &child).cost;
            if cost < costs[worse] {
                pop[worse] = child;
                costs[worse] = cost;
            }
        }
        stats.iterations = steps / config.population as u64;
        if steps.is_multiple_of(config.trace_stride) {
            stats.sample(best_of(&costs));
        }
    }
    stats.sample(best_of(&costs));

    let (bi, _) = costs
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty population");
    let best = Solution::new(pop.swap_remove(bi));
    let report = evaluate(instance, &best)?;
    Ok(RunOutput {
        best,
        report,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, validate_solution, GeneratorSpec};

    #[test]
    fn tournament_prefers_better() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let costs = [5.0, 1.0, 3.0, 4.0];
        let wins = (0..1000).filter(|_| tournament(&costs, 4, &mut rng) == 1).count();
        // 1 - (3/4)^4 = 0.684
        assert!((620..=750).contains(&wins), "{wins}");
        assert_eq!(tournament(&[2.0], 5, &mut rng), 0);
    }

    #[test]
    fn no_operators_keeps_population() {
        let inst = generate_instance(&GeneratorSpec::new(2, 8, 1)).unwrap();
        let base = GaConfig { population: 10, eval_budget: Some(10), seed: 3, ..GaConfig::default() };
        let start = run_ga(&inst, &base).unwrap();
        let frozen = run_ga(
            &inst,
            &GaConfig {
                crossover_prob: 0.0,
                mutation_prob: 0.0,
                eval_budget: Some(500),
                ..base
            },
        )
        .unwrap();
        assert_eq!(start.report.cost, frozen.report.cost);
        assert_eq!(frozen.stats.evaluations, 500);
    }

    #[test]
    fn improves_over_initial_population() {
        let inst = generate_instance(&GeneratorSpec::new(2, 15, 2)).unwrap();
        let config = GaConfig { population: 20, eval_budget: Some(5_000), seed: 4, ..GaConfig::default() };
        let out = run_ga(&inst, &config).unwrap();
        assert!(validate_solution(&inst, &out.best).is_ok());
        let trace = &out.stats.trace;
        assert!(trace.windows(2).all(|w| w[1].best_c <= w[0].best_c));
        assert!(trace.last().unwrap().best_c < trace[0].best_c);
        assert_eq!(trace.last().unwrap().best_c, out.report.cost);
    }

    #[test]
    fn generation_is_population_steps() {
        let inst = generate_instance(&GeneratorSpec::new(2, 6, 5)).unwrap();
        let config = GaConfig { population: 10, max_generations: 3, seed: 1, ..GaConfig::default() };
        let out = run_ga(&inst, &config).unwrap();
        assert_eq!(out.stats.iterations, 3);
        assert_eq!(out.stats.evaluations, 10 + 30);
    }

    #[test]
    fn invalid_config() {
        let inst = generate_instance(&GeneratorSpec::new(2, 4, 4)).unwrap();
        for c in [
            GaConfig { population: 0, ..GaConfig::default() },
            GaConfig { crossover_prob: 1.5, ..GaConfig::default() },
            GaConfig { eval_budget: Some(5), ..GaConfig::default() },
            GaConfig { population: 4, ..GaConfig::default() },
        ] {
            assert!(matches!(run_ga(&inst, &c), Err(Error::Config(_))));
        }
    }
}
