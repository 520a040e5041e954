use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{
    run_experiment, write_summary_csv, AlgorithmConfig, ExperimentSpec, InstanceSource, SummaryRow,
};
use crate::baselines::{GaConfig, MmasConfig};
use crate::error::{Error, Result};
use crate::model::{generate_instance, Scenario, SCENARIOS};
use crate::paco::PacoConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Scale {
    /// 200k evaluations, 5 runs per configuration.
    Small,
    /// Default iteration limits, 25 runs per configuration.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub scale: Scale,
    /// Overrides the scale's run count.
    pub runs: Option<usize>,
    /// Overrides the scale's evaluation budget.
    pub eval_budget: Option<u64>,
    /// Scenario names to run; all presets when `None`.
    pub scenarios: Option<Vec<String>>,
    pub algorithms: Vec<AlgorithmConfig>,
    pub instance_seed: u64,
    pub base_seed: u64,
}

impl SuiteOptions {
    pub fn new(scale: Scale) -> Self {
        SuiteOptions {
            scale,
            runs: None,
            eval_budget: None,
            scenarios: None,
            algorithms: suite_algorithms(),
            instance_seed: 1,
            base_seed: 0,
        }
    }

    fn runs(&self) -> usize {
        self.runs.unwrap_or(match self.scale {
            Scale::Small => 5,
            Scale::Full => 25,
        })
    }

    fn budget(&self) -> Option<u64> {
        self.eval_budget.or(match self.scale {
            Scale::Small => Some(200_000),
            Scale::Full => None,
        })
    }

    fn scenarios(&self) -> Result<Vec<Scenario>> {
        match &self.scenarios {
            None => Ok(SCENARIOS.to_vec()),
            Some(names) => names
                .iter()
                .map(|n| {
                    Scenario::by_name(n)
                        .ok_or_else(|| Error::InvalidSpec(format!("unknown scenario {n:?}")))
                })
                .collect(),
        }
    }
}

/// GA, MMAS, matrix-free Partial-ACO at caps 1.0, 0.5 and 0.25, and the
/// pheromone-matrix variant at cap 0.5, all with default parameters.
pub fn suite_algorithms() -> Vec<AlgorithmConfig> {
    let paco = |m| AlgorithmConfig::Paco(PacoConfig { max_modify: m, ..PacoConfig::matrix_free() });
    vec![
        AlgorithmConfig::Ga(GaConfig::default()),
        AlgorithmConfig::Mmas(MmasConfig::default()),
        paco(1.0),
        paco(0.5),
        paco(0.25),
        AlgorithmConfig::PacoPh(PacoConfig { max_modify: 0.5, ..PacoConfig::pheromone_matrix() }),
    ]
}

/// Generates every scenario instance into `out_dir/instances`, runs each
/// algorithm on it and writes `out_dir/summary.csv`.
pub fn scenario_suite(out_dir: &Path, options: &SuiteOptions) -> Result<Vec<SummaryRow>> {
    let scenarios = options.scenarios()?;
    let instances_dir = out_dir.join("instances");
    fs::create_dir_all(&instances_dir).map_err(|e| Error::io(&instances_dir, e))?;
    let budget = options.budget();

    let mut rows = Vec::new();
    for scenario in scenarios {
        let instance = generate_instance(&scenario.spec(options.instance_seed))?;
        let path = instances_dir.join(format!("{}.json", scenario.name));
        fs::write(&path, instance.to_json()?).map_err(|e| Error::io(&path, e))?;
        for algorithm in &options.algorithms {
            let spec = ExperimentSpec {
                problem: scenario.name.to_string(),
                source: InstanceSource::Loaded(Box::new(instance.clone())),
                algorithm: algorithm.with_run(0, budget),
                runs: options.runs(),
                base_seed: options.base_seed,
                out_dir: Some(out_dir.join("runs")),
            };
            rows.push(run_experiment(&spec)?.summary);
        }
    }
    write_summary_csv(&out_dir.join("summary.csv"), &rows)?;
    Ok(rows)
}
