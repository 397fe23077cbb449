//! Output documents. JSON keys are stable; optional fields are omitted
//! rather than written as null.

use std::fmt::Write as _;
use std::time::Duration;

use kcsp_core::analysis::BoundRow;
use kcsp_core::oracle::{Solution, SolutionSet};
use kcsp_core::{DpllOutcome, DpllStats, ExperimentResult, PpszOutcome, PpszStats, Value};
use serde::Serialize;
use serde_json::Value as Json;

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub tool_version: &'static str,
    pub subcommand: &'static str,
    pub algorithm: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations_used: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_repeats: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub narrow_histogram: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl SolveReport {
    fn base(algorithm: &'static str, result: &'static str, elapsed: Duration) -> Self {
        Self {
            tool_version: kcsp_core::VERSION,
            subcommand: "solve",
            algorithm,
            seed: None,
            result,
            assignment: None,
            nodes: None,
            max_depth: None,
            iterations_used: None,
            max_repeats: None,
            narrow_histogram: None,
            rng: None,
            elapsed_ms: Some(millis(elapsed)),
        }
    }

    pub fn dpll(stats: &DpllStats) -> Self {
        let (result, assignment) = match &stats.outcome {
            DpllOutcome::Sat(v) => ("SAT", Some(v.clone())),
            DpllOutcome::Unsat => ("UNSAT", None),
        };
        Self {
            assignment,
            nodes: Some(stats.nodes),
            max_depth: Some(stats.max_depth),
            ..Self::base("dpll", result, stats.elapsed)
        }
    }

    pub fn ppsz(stats: &PpszStats) -> Self {
        let (result, assignment) = match &stats.outcome {
            PpszOutcome::Sat(v) => ("SAT", Some(v.clone())),
            PpszOutcome::Failure => ("FAILURE", None),
        };
        Self {
            seed: Some(stats.seed),
            assignment,
            iterations_used: Some(stats.iterations_used),
            max_repeats: Some(stats.max_repeats),
            narrow_histogram: Some(stats.narrow_histogram.clone()),
            rng: Some(kcsp_core::rng::RNG_ALGORITHM),
            ..Self::base("ppsz", result, stats.elapsed)
        }
    }

    pub fn brute(sols: &SolutionSet, elapsed: Duration) -> Self {
        match sols.solutions.first() {
            Some(s) => Self {
                assignment: Some(s.values.clone()),
                ..Self::base("brute", "SAT", elapsed)
            },
            None => Self::base("brute", "UNSAT", elapsed),
        }
    }

    pub fn with_timing(mut self, timing: bool) -> Self {
        if !timing {
            self.elapsed_ms = None;
        }
        self
    }
}

#[derive(Debug, Serialize)]
pub struct OracleReport<'a> {
    pub tool_version: &'static str,
    pub subcommand: &'static str,
    pub n: usize,
    pub d: u32,
    pub count: usize,
    pub solutions: &'a [Solution],
}

impl<'a> OracleReport<'a> {
    pub fn new(sols: &'a SolutionSet) -> Self {
        Self {
            tool_version: kcsp_core::VERSION,
            subcommand: "oracle",
            n: sols.n,
            d: sols.d,
            count: sols.len(),
            solutions: &sols.solutions,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExperimentReport<'a> {
    pub tool_version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    #[serde(flatten)]
    pub result: &'a ExperimentResult,
}

impl<'a> ExperimentReport<'a> {
    pub fn new(subcommand: &'static str, seed: u64, result: &'a ExperimentResult) -> Self {
        Self {
            tool_version: kcsp_core::VERSION,
            subcommand,
            seed,
            result,
        }
    }
}

pub const ANALYZE_HEADER: &str =
    "d,k,lambda,dpll_base,ppsz_base,smaller,n,alpha,epsilon,ln_bound_dpll_var,ln_bound_ppsz_var";

/// Bound table as CSV. The growing-domain columns are empty unless `regime`
/// (`n`, `alpha`, `epsilon`, ln of the branching bound) is given.
pub fn analyze_csv(
    rows: &[BoundRow],
    regime: Option<(f64, f64, f64, f64)>,
    ppsz_ln: impl Fn(u32) -> Option<f64>,
) -> String {
    let mut out = String::from(ANALYZE_HEADER);
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{},{},{},{},{},{}",
            r.d, r.k, r.lambda, r.dpll_base, r.ppsz_base, r.smaller
        )
        .unwrap();
        match (regime, ppsz_ln(r.k)) {
            (Some((n, alpha, eps, ln_dpll)), Some(ln_ppsz)) => {
                write!(out, ",{n},{alpha},{eps},{ln_dpll},{ln_ppsz}").unwrap()
            }
            _ => out.push_str(",,,,,"),
        }
        out.push('\n');
    }
    out
}

/// Per-trial records as CSV with a header of the (sorted) record keys.
pub fn records_csv(records: &[Json]) -> String {
    let Some(Json::Object(first)) = records.first() else {
        return String::new();
    };
    let keys: Vec<&String> = first.keys().collect();
    let mut out = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    out.push('\n');
    for rec in records {
        let cells: Vec<String> = keys
            .iter()
            .map(|k| match &rec[k.as_str()] {
                Json::String(s) => s.clone(),
                Json::Null => String::new(),
                other => other.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
