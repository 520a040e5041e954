use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::stats::{mean, sample_sd};
use crate::baselines::{run_ga, run_mmas, GaConfig, MmasConfig};
use crate::error::{Error, Result};
use crate::eval::{company_baseline, evaluate};
use crate::model::{generate_instance, load_instance, GeneratorSpec, Instance};
use crate::paco::{run_paco, PacoConfig, Variant};
use crate::run::RunOutput;

pub const CSV_HEADER: &str =
    "problem,algorithm,runs,serviced_mean,serviced_sd,reduction_mean,reduction_sd,evals,comparisons_mean";

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    File(PathBuf),
    Generated(GeneratorSpec),
    Loaded(Box<Instance>),
}

impl InstanceSource {
    pub fn instance(&self) -> Result<Instance> {
        match self {
            InstanceSource::File(path) => {
                let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
                load_instance(&bytes)
            }
            InstanceSource::Generated(spec) => generate_instance(spec),
            InstanceSource::Loaded(inst) => Ok((**inst).clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AlgorithmConfig {
    Paco(PacoConfig),
    PacoPh(PacoConfig),
    Mmas(MmasConfig),
    Ga(GaConfig),
}

impl AlgorithmConfig {
    /// Short label used in reports, e.g. `paco(0.5)`.
    pub fn name(&self) -> String {
        match self {
            AlgorithmConfig::Paco(c) => format!("paco({})", c.max_modify),
            AlgorithmConfig::PacoPh(c) => format!("paco-ph({})", c.max_modify),
            AlgorithmConfig::Mmas(_) => "mmas".into(),
            AlgorithmConfig::Ga(_) => "ga".into(),
        }
    }

    /// Same configuration with a different seed and, if given, budget.
    pub fn with_run(&self, seed: u64, eval_budget: Option<u64>) -> Self {
        let mut c = self.clone();
        match &mut c {
            AlgorithmConfig::Paco(p) | AlgorithmConfig::PacoPh(p) => {
                p.seed = seed;
                p.eval_budget = eval_budget.or(p.eval_budget);
            }
            AlgorithmConfig::Mmas(m) => {
                m.seed = seed;
                m.eval_budget = eval_budget.or(m.eval_budget);
            }
            AlgorithmConfig::Ga(g) => {
                g.seed = seed;
                g.eval_budget = eval_budget.or(g.eval_budget);
            }
        }
        c
    }
}

pub fn run_algorithm(instance: &Instance, algorithm: &AlgorithmConfig) -> Result<RunOutput> {
    match algorithm {
        AlgorithmConfig::Paco(c) => run_paco(instance, c, Variant::MatrixFree),
        AlgorithmConfig::PacoPh(c) => run_paco(instance, c, Variant::PheromoneMatrix),
        AlgorithmConfig::Mmas(c) => run_mmas(instance, c),
        AlgorithmConfig::Ga(c) => run_ga(instance, c),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem: String,
    pub source: InstanceSource,
    pub algorithm: AlgorithmConfig,
    pub runs: usize,
    pub base_seed: u64,
    /// Directory for per-run records and traces; nothing is written if unset.
    pub out_dir: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn new(problem: impl Into<String>, source: InstanceSource, algorithm: AlgorithmConfig) -> Self {
        ExperimentSpec {
            problem: problem.into(),
            source,
            algorithm,
            runs: 25,
            base_seed: 0,
            out_dir: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub algorithm: String,
    pub seed: u64,
    pub serviced_pct: f64,
    pub traversal_min: f64,
    #[serde(rename = "C")]
    pub cost: f64,
    /// Against the emulated company schedule; `None` when the two schedules
    /// service different amounts of job time.
    pub reduction_pct: Option<f64>,
    pub baseline_serviced_pct: f64,
    pub baseline_traversal_min: f64,
    pub evaluations: u64,
    pub comparisons_per_candidate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: String,
    pub algorithm: String,
    pub runs: usize,
    pub serviced_mean: f64,
    pub serviced_sd: f64,
    /// Over the runs whose reduction is defined.
    pub reduction_mean: Option<f64>,
    pub reduction_sd: Option<f64>,
    pub evals: f64,
    pub comparisons_mean: f64,
}

impl SummaryRow {
    pub fn csv_line(&self) -> String {
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.problem,
            self.algorithm,
            self.runs,
            self.serviced_mean,
            self.serviced_sd,
            opt(self.reduction_mean),
            opt(self.reduction_sd),
            self.evals,
            self.comparisons_mean
        )
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub summary: SummaryRow,
    pub runs: Vec<RunRecord>,
}

pub fn summarise(problem: &str, algorithm: &str, runs: &[RunRecord]) -> SummaryRow {
    let serviced: Vec<f64> = runs.iter().map(|r| r.serviced_pct).collect();
    let reductions: Vec<f64> = runs.iter().filter_map(|r| r.reduction_pct).collect();
    let evals: Vec<f64> = runs.iter().map(|r| r.evaluations as f64).collect();
    let comparisons: Vec<f64> = runs.iter().map(|r| r.comparisons_per_candidate).collect();
    let defined = !reductions.is_empty();
    SummaryRow {
        problem: problem.to_string(),
        algorithm: algorithm.to_string(),
        runs: runs.len(),
        serviced_mean: mean(&serviced),
        serviced_sd: sample_sd(&serviced),
        reduction_mean: defined.then(|| mean(&reductions)),
        reduction_sd: defined.then(|| sample_sd(&reductions)),
        evals: mean(&evals),
        comparisons_mean: mean(&comparisons),
    }
}

/// Percentage drop in traversal from `baseline` to `solution`.
pub(crate) fn reduction_pct(baseline_traversal: f64, traversal: f64) -> f64 {
    if baseline_traversal == 0.0 {
        0.0
    } else {
        100.0 * (baseline_traversal - traversal) / baseline_traversal
    }
}

/// Runs seeds `base_seed..base_seed + runs` in order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Experiment> {
    if spec.runs == 0 {
        return Err(Error::InvalidSpec("runs must be at least 1".into()));
    }
    let instance = spec.source.instance()?;
    let baseline = evaluate(&instance, &company_baseline(&instance))?;
    let algorithm = spec.algorithm.name();

    let dir = spec.out_dir.as_ref().map(|d| d.join(file_stem(&spec.problem, &algorithm)));
    if let Some(d) = &dir {
        fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
    }

    let mut records = Vec::with_capacity(spec.runs);
    for i in 0..spec.runs {
        let seed = spec.base_seed + i as u64;
        let out = run_algorithm(&instance, &spec.algorithm.with_run(seed, None))?;
        let report = &out.report;
        let reduction = (report.serviced == baseline.serviced)
            .then(|| reduction_pct(baseline.traversal, report.traversal));
        records.push(RunRecord {
            problem: spec.problem.clone(),
            algorithm: algorithm.clone(),
            seed,
            serviced_pct: report.serviced_pct,
            traversal_min: report.traversal,
            cost: report.cost,
            reduction_pct: reduction,
            baseline_serviced_pct: baseline.serviced_pct,
            baseline_traversal_min: baseline.traversal,
            evaluations: out.stats.evaluations,
            comparisons_per_candidate: out.stats.comparisons_per_candidate(),
        });
        if let Some(d) = &dir {
            let path = d.join(format!("trace_{seed}.jsonl"));
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            out.stats.write_trace(BufWriter::new(file))?;
        }
    }

    let summary = summarise(&spec.problem, &algorithm, &records);
    if let Some(d) = &dir {
        let mut lines = String::new();
        for r in &records {
            writeln!(lines, "{}", serde_json::to_string(r)?).expect("write to string");
        }
        write_file(&d.join("runs.jsonl"), lines.as_bytes())?;
        write_summary_csv(&d.join("summary.csv"), std::slice::from_ref(&summary))?;
    }
    Ok(Experiment {
        summary,
        runs: records,
    })
}

fn file_stem(problem: &str, algorithm: &str) -> String {
    format!("{problem}_{algorithm}")
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(bytes).map_err(|e| Error::io(path, e))
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for r in rows {
        text.push_str(&r.csv_line());
        text.push('\n');
    }
    write_file(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GeneratorSpec;

    #[test]
    fn reductions() {
        assert_eq!(reduction_pct(120.0, 120.0), 0.0);
        assert_eq!(reduction_pct(120.0, 60.0), 50.0);
        assert_eq!(reduction_pct(100.0, 130.0), -30.0);
    }

    fn small_spec(dir: Option<PathBuf>) -> ExperimentSpec {
        let paco = PacoConfig {
            n_ants: 4,
            eval_budget: Some(400),
            max_modify: 0.5,
            ..PacoConfig::default()
        };
        ExperimentSpec {
            runs: 3,
            base_seed: 7,
            out_dir: dir,
            ..ExperimentSpec::new(
                "tiny",
                InstanceSource::Generated(GeneratorSpec::new(2, 8, 1)),
                AlgorithmConfig::Paco(paco),
            )
        }
    }

    #[test]
    fn summary_matches_records() {
        let e = run_experiment(&small_spec(None)).unwrap();
        assert_eq!(e.runs.len(), 3);
        assert_eq!(e.runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![7, 8, 9]);
        assert_eq!(e.summary, summarise("tiny", "paco(0.5)", &e.runs));
        assert!(e.summary.serviced_sd >= 0.0);
        assert_eq!(e.summary.evals, 400.0);
    }

    #[test]
    fn outputs_are_reproducible() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        run_experiment(&small_spec(Some(a.path().into()))).unwrap();
        run_experiment(&small_spec(Some(b.path().into()))).unwrap();
        for file in ["summary.csv", "runs.jsonl", "trace_8.jsonl"] {
            let pa = a.path().join("tiny_paco_0.5_").join(file);
            let pb = b.path().join("tiny_paco_0.5_").join(file);
            assert_eq!(fs::read(&pa).unwrap(), fs::read(&pb).unwrap(), "{file}");
        }
        let csv = fs::read_to_string(a.path().join("tiny_paco_0.5_/summary.csv")).unwrap();
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn zero_runs_rejected() {
        let spec = ExperimentSpec { runs: 0, ..small_spec(None) };
        assert!(matches!(run_experiment(&spec), Err(Error::InvalidSpec(_))));
    }
}
