//! Randomized narrow-choice search.
//!
//! One iteration visits the variables in a uniformly random order. A
//! variable whose value is forced away from some option by a nogood whose
//! other pairs are already matched draws uniformly from what remains; any
//! other variable draws from the full domain. Iterations repeat until one
//! yields a solution or the budget runs out.
//!
//! Each iteration `i` owns the generator `rng::stream(seed, [i])`, so runs
//! are reproducible and iterations can be evaluated in any order.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{CspInstance, PartialAssignment, Value, Var};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IterationOutcome {
    /// A total assignment, not necessarily satisfying.
    Complete { values: Vec<Value>, narrow: usize },
    /// Some variable had every value forbidden.
    Abort { narrow: usize },
}

impl IterationOutcome {
    pub fn narrow(&self) -> usize {
        match *self {
            IterationOutcome::Complete { narrow, .. } | IterationOutcome::Abort { narrow } => narrow,
        }
    }
}

/// Reusable buffers for [`run_iteration`].
#[derive(Debug)]
pub struct IterationScratch {
    pa: PartialAssignment,
    order: Vec<Var>,
    forbidden: Vec<bool>,
    allowed: Vec<Value>,
}

impl IterationScratch {
    pub fn new(instance: &CspInstance) -> Self {
        Self {
            pa: PartialAssignment::new(instance.num_vars()),
            order: Vec::with_capacity(instance.num_vars()),
            forbidden: Vec::with_capacity(instance.domain_size() as usize),
            allowed: Vec::with_capacity(instance.domain_size() as usize),
        }
    }
}

/// One pass of random-order narrow-choice assignment.
pub fn run_iteration<R: Rng>(
    instance: &CspInstance,
    rng: &mut R,
    scratch: &mut IterationScratch,
) -> IterationOutcome {
    let d = instance.domain_size();
    scratch.pa.clear();
    scratch.order.clear();
    scratch.order.extend(instance.variables());
    scratch.order.shuffle(rng);

    let mut narrow = 0;
    for &y in &scratch.order {
        let removed = instance.forbidden_values(&scratch.pa, y, &mut scratch.forbidden);
        let value = if removed == 0 {
            rng.gen_range(0..d)
        } else {
            narrow += 1;
            scratch.allowed.clear();
            scratch
                .allowed
                .extend((0..d).filter(|&a| !scratch.forbidden[a as usize]));
            if scratch.allowed.is_empty() {
                return IterationOutcome::Abort { narrow };
            }
            scratch.allowed[rng.gen_range(0..scratch.allowed.len())]
        };
        scratch.pa.assign(y, value);
    }
    IterationOutcome::Complete {
        values: scratch.pa.to_values().expect("every variable assigned"),
        narrow,
    }
}

/// Generator owned by iteration `index` under master `seed`.
pub fn iteration_rng(seed: u64, index: u64) -> ChaCha8Rng {
    rng::stream(seed, &[index])
}

/// Runs iteration `index` and reports whether it produced a solution.
pub fn run_seeded_iteration(
    instance: &CspInstance,
    seed: u64,
    index: u64,
    scratch: &mut IterationScratch,
) -> (IterationOutcome, bool) {
    let outcome = run_iteration(instance, &mut iteration_rng(seed, index), scratch);
    let ok = match &outcome {
        IterationOutcome::Complete { values, .. } => instance.satisfies_values(values),
        IterationOutcome::Abort { .. } => false,
    };
    (outcome, ok)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "assignment", rename_all = "UPPERCASE")]
pub enum PpszOutcome {
    Sat(Vec<Value>),
    Failure,
}

#[derive(Debug, Clone)]
pub struct PpszStats {
    pub outcome: PpszOutcome,
    pub iterations_used: u64,
    pub max_repeats: u64,
    /// `narrow_histogram[c]` counts iterations with `c` narrowly chosen
    /// variables (aborted iterations count up to the abort).
    pub narrow_histogram: Vec<u64>,
    pub seed: u64,
    pub elapsed: Duration,
}

impl PpszStats {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, PpszOutcome::Sat(_))
    }
}

/// Repeats iterations until one satisfies the instance. `max_repeats`
/// defaults to [`repeat_count`]. Never returns a non-satisfying assignment.
pub fn solve_ppsz(instance: &CspInstance, max_repeats: Option<u64>, seed: u64) -> Result<PpszStats> {
    let start = Instant::now();
    let max_repeats = match max_repeats {
        Some(r) => r,
        None => repeat_count(
            instance.num_vars() as u64,
            instance.domain_size(),
            instance.k_max().max(1) as u32,
        )?,
    };
    let mut scratch = IterationScratch::new(instance);
    let mut histogram = vec![0u64; instance.num_vars() + 1];
    let mut outcome = PpszOutcome::Failure;
    let mut used = 0;
    for index in 0..max_repeats {
        used += 1;
        let (it, ok) = run_seeded_iteration(instance, seed, index, &mut scratch);
        histogram[it.narrow()] += 1;
        if ok {
            let IterationOutcome::Complete { values, .. } = it else {
                unreachable!("aborted iterations never satisfy")
            };
            assert!(instance.satisfies_values(&values));
            outcome = PpszOutcome::Sat(values);
            break;
        }
    }
    Ok(PpszStats {
        outcome,
        iterations_used: used,
        max_repeats,
        narrow_histogram: histogram,
        seed,
        elapsed: start.elapsed(),
    })
}

fn validate(n: u64, d: u32, k: u32) -> Result<()> {
    if n < 1 || d < 2 || k < 1 {
        return Err(Error::InvalidParameters(format!(
            "requires n >= 1, d >= 2, k >= 1 (n={n}, d={d}, k={k})"
        )));
    }
    Ok(())
}

/// `ceil(n (n+1) (d ((d-1)/d)^(1/k))^n)`.
///
/// The `k`-th power of the quantity is the integer
/// `(n(n+1))^k d^(n(k-1)) (d-1)^n`, so the ceiling is an exact integer
/// `k`-th root with no floating-point rounding involved.
pub fn repeat_count(n: u64, d: u32, k: u32) -> Result<u64> {
    validate(n, d, k)?;
    // log-space screen so absurd inputs fail before any big-integer work
    let ln_estimate = ((n * (n + 1)) as f64).ln() + n as f64 * ppsz_base_ln(d, k);
    if ln_estimate > 64.0 * std::f64::consts::LN_2 + 1.0 {
        return Err(Error::RepeatOverflow);
    }
    let n_big = BigUint::from(n);
    let prefactor = &n_big * (&n_big + 1u32);
    let d_big = BigUint::from(d);
    let power = Pow::pow(&prefactor, k)
        * Pow::pow(&d_big, n * (k as u64 - 1))
        * Pow::pow(&(d_big - 1u32), n);
    let root = power.nth_root(k);
    let ceil = if Pow::pow(&root, k) == power { root } else { root + 1u32 };
    ceil.to_u64().ok_or(Error::RepeatOverflow)
}

fn ppsz_base_ln(d: u32, k: u32) -> f64 {
    let d = d as f64;
    d.ln() + ((d - 1.0) / d).ln() / k as f64
}

/// Per-iteration success probability floor
/// `1/(n+1) * (d ((d-1)/d)^(1/k))^(-n)` for satisfiable instances.
pub fn success_lower_bound(n: u64, d: u32, k: u32) -> f64 {
    (-((n as f64) + 1.0).ln() - n as f64 * ppsz_base_ln(d, k)).exp()
}
