//! Brute-force ground truth.
//!
//! Everything here enumerates: all `d^n` points to find solutions, every
//! single-coordinate flip to find critical dimensions, and every variable
//! order to average narrow-choice counts. None of it shares code with the
//! solvers beyond the instance model, so it can be used to check them.

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::Pow;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{CspInstance, PartialAssignment, Value, Var};
use crate::rng;

/// Default bound on `d^n` for exhaustive enumeration.
pub const DEFAULT_CAP: u64 = 1 << 24;

/// Largest `n` for which every one of the `n!` variable orders is visited.
pub const EXHAUSTIVE_MAX_VARS: usize = 8;

/// Two-sided 99% normal quantile.
pub(crate) const Z_99: f64 = 2.575_829_303_548_901;

fn checked_space(n: usize, d: u32, cap: u64) -> Result<usize> {
    match (d as u64).checked_pow(n as u32) {
        Some(space) if space <= cap && space <= usize::MAX as u64 => Ok(space as usize),
        _ => Err(Error::CapExceeded { cap }),
    }
}

/// Mixed-radix index of a point, first coordinate most significant.
fn point_index(d: u32, x: &[Value]) -> usize {
    x.iter().fold(0usize, |acc, &a| acc * d as usize + a as usize)
}

/// Advances `x` to the next point in lexicographic order; false on wrap.
fn next_point(d: u32, x: &mut [Value]) -> bool {
    for slot in x.iter_mut().rev() {
        *slot += 1;
        if *slot < d {
            return true;
        }
        *slot = 0;
    }
    false
}

/// A nonempty subset of `D^n` given by its members.
#[derive(Debug, Clone)]
pub struct PointSet {
    n: usize,
    d: u32,
    points: Vec<Vec<Value>>,
    members: Vec<u64>,
}

impl PointSet {
    /// Duplicate points are collapsed. Requires `d^n <= DEFAULT_CAP`.
    pub fn new<I>(n: usize, d: u32, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Value>>,
    {
        Self::with_cap(n, d, points, DEFAULT_CAP)
    }

    pub fn with_cap<I>(n: usize, d: u32, points: I, cap: u64) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Value>>,
    {
        if d < 1 {
            return Err(Error::InvalidParameters("domain must be nonempty".into()));
        }
        let space = checked_space(n, d, cap)?;
        let mut set = Self {
            n,
            d,
            points: Vec::new(),
            members: vec![0; space.div_ceil(64)],
        };
        for p in points {
            if p.len() != n || p.iter().any(|&a| a >= d) {
                return Err(Error::InvalidParameters(format!(
                    "point {p:?} is not in D^{n} with d = {d}"
                )));
            }
            let idx = point_index(d, &p);
            if set.members[idx / 64] & (1 << (idx % 64)) == 0 {
                set.members[idx / 64] |= 1 << (idx % 64);
                set.points.push(p);
            }
        }
        if set.points.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(set)
    }

    pub fn num_dims(&self) -> usize {
        self.n
    }

    pub fn domain_size(&self) -> u32 {
        self.d
    }

    pub fn points(&self) -> &[Vec<Value>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &[Value]) -> bool {
        x.len() == self.n
            && x.iter().all(|&a| a < self.d)
            && self.contains_index(point_index(self.d, x))
    }

    fn contains_index(&self, idx: usize) -> bool {
        self.members[idx / 64] & (1 << (idx % 64)) != 0
    }
}

/// Dimensions `i` (1-indexed) such that changing coordinate `i` of `x` to
/// some other value leaves `s`. Its length is the isolation degree `J_S(x)`.
pub fn critical_points(x: &[Value], s: &PointSet) -> Result<Vec<usize>> {
    if !s.contains(x) {
        return Err(Error::NotInSet);
    }
    Ok(critical_unchecked(x, s))
}

fn critical_unchecked(x: &[Value], s: &PointSet) -> Vec<usize> {
    let d = s.d as usize;
    let base = point_index(s.d, x);
    let mut weight = 1usize;
    let mut critical = Vec::new();
    for i in (0..s.n).rev() {
        let own = x[i] as usize;
        let stripped = base - own * weight;
        if (0..d).any(|a| a != own && !s.contains_index(stripped + a * weight)) {
            critical.push(i + 1);
        }
        weight *= d;
    }
    critical.reverse();
    critical
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    pub values: Vec<Value>,
    /// Critical dimensions, 1-indexed, ascending.
    pub critical: Vec<usize>,
    pub isolation: usize,
}

/// All solutions of an instance in lexicographic order.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionSet {
    pub n: usize,
    pub d: u32,
    pub solutions: Vec<Solution>,
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn find(&self, x: &[Value]) -> Option<&Solution> {
        self.solutions
            .binary_search_by(|s| s.values.as_slice().cmp(x))
            .ok()
            .map(|i| &self.solutions[i])
    }
}

/// Enumerates every point of `D^n` and keeps the satisfying ones, filling in
/// critical dimensions against the solution set itself.
pub fn enumerate_solutions(instance: &CspInstance, cap: u64) -> Result<SolutionSet> {
    let (n, d) = (instance.num_vars(), instance.domain_size());
    checked_space(n, d, cap)?;
    let mut found = Vec::new();
    let mut x = vec![0; n];
    loop {
        if instance.satisfies_values(&x) {
            found.push(x.clone());
        }
        if !next_point(d, &mut x) {
            break;
        }
    }
    let solutions = if found.is_empty() {
        Vec::new()
    } else {
        let set = PointSet::with_cap(n, d, found, cap)?;
        set.points()
            .iter()
            .map(|x| {
                let critical = critical_unchecked(x, &set);
                Solution {
                    values: x.clone(),
                    isolation: critical.len(),
                    critical,
                }
            })
            .collect()
    };
    Ok(SolutionSet { n, d, solutions })
}

/// Exact form of `sum_{x in S} (1/d)^(n - J_S(x)) >= 1`, scaled by `d^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma2Check {
    pub holds: bool,
    /// `sum_{x in S} d^J_S(x)`
    pub lhs: BigUint,
    /// `d^n`
    pub rhs: BigUint,
}

pub fn verify_lemma2(s: &PointSet) -> Result<Lemma2Check> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let d = BigUint::from(s.d);
    let lhs = s
        .points()
        .iter()
        .map(|x| Pow::pow(&d, critical_unchecked(x, s).len() as u32))
        .fold(BigUint::from(0u32), |acc, t| acc + t);
    let rhs = Pow::pow(&d, s.n as u32);
    Ok(Lemma2Check {
        holds: lhs >= rhs,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NarrowMode {
    Exhaustive,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum NarrowAverage {
    /// Sum of narrow counts over all `n!` orders.
    Exact { total: u64, orders: u64 },
    /// Sample mean with a 99% normal-approximation interval.
    Estimate {
        mean: f64,
        ci_low: f64,
        ci_high: f64,
        trials: u64,
    },
}

impl NarrowAverage {
    pub fn mean(&self) -> f64 {
        match *self {
            NarrowAverage::Exact { total, orders } => total as f64 / orders as f64,
            NarrowAverage::Estimate { mean, .. } => mean,
        }
    }

    pub fn exact(&self) -> Option<Ratio<u64>> {
        match *self {
            NarrowAverage::Exact { total, orders } => Some(Ratio::new(total, orders)),
            NarrowAverage::Estimate { .. } => None,
        }
    }

    /// Whether the average reaches `j / k`. Exact averages compare as
    /// rationals; estimates compare the upper confidence limit.
    pub fn reaches(&self, j: usize, k: usize) -> bool {
        if j == 0 {
            return true;
        }
        if k == 0 {
            return false;
        }
        match *self {
            NarrowAverage::Exact { total, orders } => {
                total as u128 * k as u128 >= j as u128 * orders as u128
            }
            NarrowAverage::Estimate { ci_high, .. } => ci_high >= j as f64 / k as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NarrowReport {
    pub average: NarrowAverage,
    pub isolation: usize,
    pub k_max: usize,
    pub bound_holds: bool,
}

/// Number of variables that are narrowly chosen when the variables of `x`
/// are assigned one by one in `order`.
pub fn narrow_count_in_order(instance: &CspInstance, x: &[Value], order: &[Var]) -> usize {
    let mut pa = PartialAssignment::new(instance.num_vars());
    let mut narrow = 0;
    for &y in order {
        if instance
            .is_narrowly_chosen(&pa, y)
            .expect("order visits each variable once")
        {
            narrow += 1;
        }
        pa.assign(y, x[y as usize - 1]);
    }
    narrow
}

/// Average narrow-choice count over variable orders ending at `x`.
pub fn narrow_average(instance: &CspInstance, x: &[Value], mode: NarrowMode) -> Result<NarrowAverage> {
    let n = instance.num_vars();
    if x.len() != n || !instance.satisfies_values(x) {
        return Err(Error::NotASolution);
    }
    match mode {
        NarrowMode::Exhaustive => {
            if n > EXHAUSTIVE_MAX_VARS {
                return Err(Error::InvalidParameters(format!(
                    "exhaustive mode supports n <= {EXHAUSTIVE_MAX_VARS}, got {n}"
                )));
            }
            let vars: Vec<Var> = instance.variables().collect();
            let (mut total, mut orders) = (0u64, 0u64);
            for order in vars.iter().copied().permutations(n) {
                total += narrow_count_in_order(instance, x, &order) as u64;
                orders += 1;
            }
            Ok(NarrowAverage::Exact { total, orders })
        }
        NarrowMode::Sampled { trials, seed } => {
            if trials == 0 {
                return Err(Error::InvalidParameters("trials must be positive".into()));
            }
            let mut order: Vec<Var> = instance.variables().collect();
            let (mut sum, mut sum_sq) = (0f64, 0f64);
            for t in 0..trials {
                order.sort_unstable();
                order.shuffle(&mut rng::stream(seed, &[t]));
                let c = narrow_count_in_order(instance, x, &order) as f64;
                sum += c;
                sum_sq += c * c;
            }
            let m = trials as f64;
            let mean = sum / m;
            let var = if trials > 1 {
                ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
            } else {
                0.0
            };
            let half = Z_99 * (var / m).sqrt();
            Ok(NarrowAverage::Estimate {
                mean,
                ci_low: mean - half,
                ci_high: mean + half,
                trials,
            })
        }
    }
}

/// Narrow-choice average for the solution `x` together with its isolation
/// degree, taken from a full enumeration of the instance.
pub fn avg_narrow_count(instance: &CspInstance, x: &[Value], mode: NarrowMode) -> Result<NarrowReport> {
    let solutions = enumerate_solutions(instance, DEFAULT_CAP)?;
    let isolation = solutions.find(x).ok_or(Error::NotASolution)?.isolation;
    let average = narrow_average(instance, x, mode)?;
    let k_max = instance.k_max();
    Ok(NarrowReport {
        bound_holds: average.reaches(isolation, k_max),
        average,
        isolation,
        k_max,
    })
}

/// `n!`, saturating.
pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).try_fold(1u64, |acc, i| acc.checked_mul(i)).unwrap_or(u64::MAX)
}
