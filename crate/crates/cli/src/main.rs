//! `kcsp` command-line front end.
//!
//! Exit codes: 0 success or SAT, 1 UNSAT / FAILURE / failed check, 2 usage
//! or input errors, 3 runtime errors.

mod args;
mod report;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use kcsp_core::analysis::{bound_table, bound_variable_domain_dpll, bound_variable_domain_ppsz};
use kcsp_core::corpus::{small_corpus, CorpusEntry};
use kcsp_core::experiment::{
    estimate_iteration_success, node_growth_experiment, verify_campaign, Campaign, GrowthFamily,
};
use kcsp_core::generators::{gen_coloring, gen_latin, gen_model_rb, gen_nqueens, gen_uniform};
use kcsp_core::{parse_instance, serialize_instance, CspInstance, Verdict};

use args::{Algorithm, BenchKind, Cli, Command, Family, Format, VerifyKind};
use report::{analyze_csv, records_csv, OracleReport, SolveReport};

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<kcsp_core::Error> for CliError {
    fn from(e: kcsp_core::Error) -> Self {
        match e {
            kcsp_core::Error::InvalidParameters(_) | kcsp_core::Error::Parse(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Verdict mapped onto the exit code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Negative,
}

fn read_instance(path: &Path) -> CliResult<CspInstance> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))
        }
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut bytes =
        serde_json::to_vec(value).map_err(|e| CliError::Runtime(format!("serialization: {e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn verdict_status(v: Verdict) -> Status {
    match v {
        Verdict::Fail => Status::Negative,
        Verdict::Pass | Verdict::Inconclusive | Verdict::NotApplicable => Status::Ok,
    }
}

fn run(cli: Cli) -> CliResult<Status> {
    match cli.command {
        Command::Gen { family } => {
            let (instance, common) = match family {
                Family::Uniform { n, d, k, m, common } => (gen_uniform(n, d, k, m, common.seed)?, common),
                Family::ModelRb { n, alpha, r, p, k, common } => {
                    (gen_model_rb(n, alpha, r, p, k, common.seed)?, common)
                }
                Family::Coloring { edges, vertices, d, common } => {
                    (gen_coloring(&edges.0, vertices, d)?, common)
                }
                Family::Latin { size, common } => (gen_latin(size)?, common),
                Family::Nqueens { size, common } => (gen_nqueens(size)?, common),
            };
            write_output(common.output.out.as_ref(), &serialize_instance(&instance))?;
            Ok(Status::Ok)
        }
        Command::Solve(a) => {
            let instance = read_instance(&a.instance)?;
            let report = match a.alg {
                Algorithm::Dpll => SolveReport::dpll(&kcsp_core::solve_dpll(&instance)),
                Algorithm::Ppsz => {
                    SolveReport::ppsz(&kcsp_core::solve_ppsz(&instance, a.max_repeats, a.seed)?)
                }
                Algorithm::Brute => {
                    let start = std::time::Instant::now();
                    let sols = kcsp_core::enumerate_solutions(&instance, a.cap)?;
                    SolveReport::brute(&sols, start.elapsed())
                }
            };
            let report = report.with_timing(a.timing);
            let negative = report.result != "SAT";
            write_output(a.stats.as_ref(), &json_line(&report)?)?;
            Ok(if negative { Status::Negative } else { Status::Ok })
        }
        Command::Oracle(a) => {
            let instance = read_instance(&a.instance)?;
            let sols = kcsp_core::enumerate_solutions(&instance, a.cap)?;
            let status = if sols.is_empty() { Status::Negative } else { Status::Ok };
            write_output(a.output.out.as_ref(), &json_line(&OracleReport::new(&sols))?)?;
            Ok(status)
        }
        Command::Verify { kind } => {
            let (campaign, seed, out) = match kind {
                VerifyKind::Lemma1 { instances, max_vars, seed, output } => {
                    let corpus = if instances.is_empty() {
                        small_corpus(max_vars)
                    } else {
                        instances
                            .iter()
                            .map(|p| {
                                Ok(CorpusEntry {
                                    name: p.display().to_string(),
                                    instance: read_instance(p)?,
                                })
                            })
                            .collect::<CliResult<Vec<_>>>()?
                    };
                    if max_vars > kcsp_core::oracle::EXHAUSTIVE_MAX_VARS {
                        return Err(CliError::Usage(format!(
                            "--max-vars is limited to {}",
                            kcsp_core::oracle::EXHAUSTIVE_MAX_VARS
                        )));
                    }
                    (Campaign::Lemma1 { corpus, max_vars }, seed, output.out)
                }
                VerifyKind::Lemma2 { n, d, subsets, seed, output } => (
                    Campaign::Lemma2 {
                        n_values: n.0.map(|v| v as usize).collect(),
                        d_values: d.0.collect(),
                        subsets,
                    },
                    seed,
                    output.out,
                ),
            };
            let result = verify_campaign(&campaign, seed)?;
            write_output(out.as_ref(), &json_line(&report::ExperimentReport::new("verify", seed, &result))?)?;
            Ok(verdict_status(result.verdict))
        }
        Command::Analyze(a) => {
            let rows = bound_table(a.d.0.clone(), a.k.0.clone())?;
            let regime = match (a.alpha, a.n) {
                (Some(alpha), Some(n)) => {
                    if n < 2.0 || alpha <= 0.0 || a.epsilon < 0.0 {
                        return Err(CliError::Usage(
                            "--n must be >= 2, --alpha > 0 and --epsilon >= 0".into(),
                        ));
                    }
                    Some((n, alpha, a.epsilon, bound_variable_domain_dpll(n, alpha, a.epsilon)))
                }
                _ => None,
            };
            let csv = analyze_csv(&rows, regime, |k| {
                regime.map(|(n, alpha, ..)| bound_variable_domain_ppsz(n, alpha, k))
            });
            write_output(a.output.out.as_ref(), csv.as_bytes())?;
            Ok(Status::Ok)
        }
        Command::Bench { kind } => {
            let (result, seed, format, out) = match kind {
                BenchKind::Prob { trials, seed, format, output, instance } => {
                    let instance = read_instance(&instance)?;
                    (estimate_iteration_success(&instance, trials, seed)?, seed, format, output.out)
                }
                BenchKind::Growth { d, k, ratio, n, instances, seed, format, output } => {
                    let n_values: Vec<usize> = n.0.map(|v| v as usize).collect();
                    let family = GrowthFamily { d, k, ratio };
                    (node_growth_experiment(family, &n_values, instances, seed)?, seed, format, output.out)
                }
            };
            let bytes = match format {
                Format::Json => json_line(&report::ExperimentReport::new("bench", seed, &result))?,
                Format::Csv => records_csv(&result.trials).into_bytes(),
            };
            write_output(out.as_ref(), &bytes)?;
            Ok(verdict_status(result.verdict))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Negative) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
