use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fleet_aco::baselines::{GaConfig, MmasConfig};
use fleet_aco::bench::{scenario_suite, run_algorithm, AlgorithmConfig, Scale, SuiteOptions};
use fleet_aco::eval::company_baseline;
use fleet_aco::model::{generate_instance, load_instance, GeneratorSpec};
use fleet_aco::paco::PacoConfig;
use fleet_aco::{evaluate, Error, Instance, Result};

#[derive(Parser)]
#[command(name = "fleet-aco", version, about = "Fleet routing solvers and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Paco,
    PacoPh,
    Mmas,
    Ga,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write solution, report, stats and trace.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "paco")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Evaluation budget; the default iteration limit applies otherwise.
        #[arg(long)]
        evals: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        max_modify: f64,
        #[arg(long, default_value_t = 0.001)]
        escape_prob: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Generate a synthetic instance.
    Gen {
        #[arg(long)]
        vehicles: usize,
        #[arg(long)]
        jobs: usize,
        #[arg(long, default_value_t = 0.1)]
        window_frac: f64,
        /// Rescale service times to this many minutes in total.
        #[arg(long)]
        total_service: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every algorithm on the preset scenarios.
    Suite {
        #[arg(long, value_enum, default_value = "small")]
        scale: Scale,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        evals: Option<u64>,
        /// Restrict to the named scenario; repeatable.
        #[arg(long = "scenario")]
        scenarios: Vec<String>,
    },
    /// Evaluate the emulated company schedule.
    Baseline {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct SolveStats {
    algorithm: String,
    seed: u64,
    iterations: u64,
    evaluations: u64,
    decisions: u64,
    comparisons: u64,
    scored: u64,
    deposits: u64,
    comparisons_per_candidate: f64,
    #[serde(rename = "best_C")]
    best_c: f64,
}

fn read_instance(path: &Path) -> Result<Instance> {
    let bytes = fs::read(path).map_err(|e| io(path, e))?;
    load_instance(&bytes)
}

fn io(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io(path, e))
}

fn algorithm_config(
    algorithm: Algorithm,
    seed: u64,
    evals: Option<u64>,
    max_modify: f64,
    escape_prob: f64,
    threads: Option<usize>,
) -> AlgorithmConfig {
    let paco = |base: PacoConfig| PacoConfig {
        max_modify,
        escape_prob,
        threads,
        ..base
    };
    let config = match algorithm {
        Algorithm::Paco => AlgorithmConfig::Paco(paco(PacoConfig::matrix_free())),
        Algorithm::PacoPh => AlgorithmConfig::PacoPh(paco(PacoConfig::pheromone_matrix())),
        Algorithm::Mmas => AlgorithmConfig::Mmas(MmasConfig {
            threads,
            ..MmasConfig::default()
        }),
        Algorithm::Ga => AlgorithmConfig::Ga(GaConfig::default()),
    };
    config.with_run(seed, evals)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve {
            instance,
            algorithm,
            seed,
            evals,
            max_modify,
            escape_prob,
            out,
            threads,
        } => {
            let inst = read_instance(&instance)?;
            let config = algorithm_config(algorithm, seed, evals, max_modify, escape_prob, threads);
            let output = run_algorithm(&inst, &config)?;
            fs::create_dir_all(&out).map_err(|e| io(&out, e))?;
            write_json(&out.join("solution.json"), &output.best.labels(&inst))?;
            write_json(&out.join("report.json"), &output.report)?;
            let s = &output.stats;
            write_json(
                &out.join("stats.json"),
                &SolveStats {
                    algorithm: config.name(),
                    seed,
                    iterations: s.iterations,
                    evaluations: s.evaluations,
                    decisions: s.decisions,
                    comparisons: s.comparisons,
                    scored: s.scored,
                    deposits: s.deposits,
                    comparisons_per_candidate: s.comparisons_per_candidate(),
                    best_c: output.report.cost,
                },
            )?;
            let trace = out.join("trace.jsonl");
            let file = fs::File::create(&trace).map_err(|e| io(&trace, e))?;
            s.write_trace(BufWriter::new(file))?;
            println!(
                "C = {}  serviced = {:.2}%  traversal = {:.1} min",
                output.report.cost, output.report.serviced_pct, output.report.traversal
            );
        }
        Command::Gen {
            vehicles,
            jobs,
            window_frac,
            total_service,
            seed,
            out,
        } => {
            let spec = GeneratorSpec {
                window_fraction: window_frac,
                target_total_service: total_service,
                ..GeneratorSpec::new(vehicles, jobs, seed)
            };
            let inst = generate_instance(&spec)?;
            fs::write(&out, inst.to_json()?).map_err(|e| io(&out, e))?;
        }
        Command::Suite {
            scale,
            out,
            runs,
            evals,
            scenarios,
        } => {
            let options = SuiteOptions {
                runs,
                eval_budget: evals,
                scenarios: (!scenarios.is_empty()).then_some(scenarios),
                ..SuiteOptions::new(scale)
            };
            let rows = scenario_suite(&out, &options)?;
            for r in rows {
                println!("{}", r.csv_line());
            }
        }
        Command::Baseline { instance, out } => {
            let inst = read_instance(&instance)?;
            let solution = company_baseline(&inst);
            let report = evaluate(&inst, &solution)?;
            #[derive(Serialize)]
            struct Baseline {
                solution: Vec<String>,
                report: fleet_aco::QualityReport,
            }
            write_json(
                &out,
                &Baseline {
                    solution: solution.labels(&inst),
                    report,
                },
            )?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
