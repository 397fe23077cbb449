//! Instance families: uniform random nogoods, Model RB, graph coloring,
//! Latin squares and N-queens.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{CspInstance, Nogood, Value, Var};
use crate::rng;

/// A generator family with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenSpec {
    Uniform { n: usize, d: u32, k: usize, m: usize },
    ModelRb { n: usize, alpha: f64, r: f64, p: f64, k: usize },
    Coloring { edges: Vec<(Var, Var)>, vertices: usize, d: u32 },
    Latin { size: usize },
    Nqueens { size: usize },
}

impl GenSpec {
    /// Builds the instance. Deterministic families ignore `seed`.
    pub fn generate(&self, seed: u64) -> Result<CspInstance> {
        match self {
            GenSpec::Uniform { n, d, k, m } => gen_uniform(*n, *d, *k, *m, seed),
            GenSpec::ModelRb { n, alpha, r, p, k } => gen_model_rb(*n, *alpha, *r, *p, *k, seed),
            GenSpec::Coloring { edges, vertices, d } => gen_coloring(edges, *vertices, *d),
            GenSpec::Latin { size } => gen_latin(*size),
            GenSpec::Nqueens { size } => gen_nqueens(*size),
        }
    }
}

/// Round half up.
fn round_half_up(x: f64) -> f64 {
    (x + 0.5).floor()
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

fn random_scope<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<Var> {
    let mut vars: Vec<Var> = sample(rng, n, k).iter().map(|i| i as Var + 1).collect();
    vars.sort_unstable();
    vars
}

/// `m` distinct nogoods, each over `k` distinct uniformly random variables
/// with uniformly random values.
pub fn gen_uniform(n: usize, d: u32, k: usize, m: usize, seed: u64) -> Result<CspInstance> {
    if k == 0 || n < k || d < 2 {
        return Err(Error::InvalidParameters(format!(
            "uniform requires n >= k >= 1 and d >= 2 (n={n}, d={d}, k={k})"
        )));
    }
    let possible = binomial(n as u128, k as u128)
        .saturating_mul((d as u128).checked_pow(k as u32).unwrap_or(u128::MAX));
    if m as u128 > possible {
        return Err(Error::InvalidParameters(format!(
            "m={m} exceeds the {possible} distinct nogoods available"
        )));
    }
    let mut rng = rng::stream(seed, &[]);
    let mut seen = HashSet::with_capacity(m);
    let mut nogoods = Vec::with_capacity(m);
    while nogoods.len() < m {
        let pairs: Vec<(Var, Value)> = random_scope(&mut rng, n, k)
            .into_iter()
            .map(|v| (v, rng.gen_range(0..d)))
            .collect();
        let ng = Nogood::new(pairs)?;
        if seen.insert(ng.clone()) {
            nogoods.push(ng);
        }
    }
    CspInstance::new(n, d, nogoods)
}

/// Model RB sampler: `d = round(n^alpha)`, `round(r n ln n)` constraints of
/// arity `k`, each forbidding `round(p d^k)` distinct tuples of its scope.
pub fn gen_model_rb(n: usize, alpha: f64, r: f64, p: f64, k: usize, seed: u64) -> Result<CspInstance> {
    if !(alpha > 0.0 && r > 0.0 && p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameters(
            "model-rb requires alpha > 0, r > 0 and 0 < p < 1".into(),
        ));
    }
    if k < 2 || n < k {
        return Err(Error::InvalidParameters(format!(
            "model-rb requires n >= k >= 2 (n={n}, k={k})"
        )));
    }
    let d = round_half_up((n as f64).powf(alpha));
    if d < 2.0 {
        return Err(Error::InvalidParameters(format!(
            "domain size round(n^alpha) = {d} is below 2"
        )));
    }
    if d > u32::MAX as f64 {
        return Err(Error::InvalidParameters("domain size too large".into()));
    }
    let d = d as u32;
    let tuples = (d as u64)
        .checked_pow(k as u32)
        .filter(|&t| t <= usize::MAX as u64)
        .ok_or_else(|| Error::InvalidParameters("d^k too large".into()))?;
    let per_constraint = round_half_up(p * tuples as f64) as u64;
    if per_constraint < 1 {
        return Err(Error::InvalidParameters(
            "round(p * d^k) is zero: constraints would forbid nothing".into(),
        ));
    }
    let constraints = round_half_up(r * n as f64 * (n as f64).ln()) as usize;

    let mut rng = rng::stream(seed, &[]);
    let mut nogoods = Vec::with_capacity(constraints * per_constraint as usize);
    for _ in 0..constraints {
        let scope = random_scope(&mut rng, n, k);
        for code in sample(&mut rng, tuples as usize, per_constraint as usize).iter() {
            let mut rest = code as u64;
            let mut pairs = Vec::with_capacity(k);
            for &var in scope.iter().rev() {
                pairs.push((var, (rest % d as u64) as Value));
                rest /= d as u64;
            }
            nogoods.push(Nogood::new(pairs)?);
        }
    }
    CspInstance::new(n, d, nogoods)
}

/// Proper `d`-coloring of a graph on vertices `1..=vertices`.
pub fn gen_coloring(edges: &[(Var, Var)], vertices: usize, d: u32) -> Result<CspInstance> {
    if vertices == 0 || d < 2 {
        return Err(Error::InvalidParameters(
            "coloring requires at least one vertex and d >= 2".into(),
        ));
    }
    let mut nogoods = Vec::with_capacity(edges.len() * d as usize);
    for &(u, v) in edges {
        if u == v {
            return Err(Error::InvalidParameters(format!("self-loop on vertex {u}")));
        }
        for w in [u, v] {
            if w == 0 || w as usize > vertices {
                return Err(Error::InvalidParameters(format!(
                    "vertex {w} out of range 1..={vertices}"
                )));
            }
        }
        for c in 0..d {
            nogoods.push(Nogood::new(vec![(u, c), (v, c)])?);
        }
    }
    CspInstance::new(vertices, d, nogoods)
}

/// Full Latin square of order `size`; cell (i, j) is variable (i-1)*size + j.
pub fn gen_latin(size: usize) -> Result<CspInstance> {
    if size == 0 {
        return Err(Error::InvalidParameters("latin square order must be >= 1".into()));
    }
    // domains need at least two values, so order 1 forbids the spare value
    if size == 1 {
        return CspInstance::from_pairs(1, 2, vec![vec![(1, 1)]]);
    }
    let cell = |i: usize, j: usize| (i * size + j + 1) as Var;
    let mut nogoods = Vec::new();
    let mut push_pair = |a: Var, b: Var| {
        for c in 0..size as Value {
            nogoods.push(vec![(a, c), (b, c)]);
        }
    };
    for i in 0..size {
        for j in 0..size {
            // later cells in the same row, then later cells in the same column
            for j2 in j + 1..size {
                push_pair(cell(i, j), cell(i, j2));
            }
            for i2 in i + 1..size {
                push_pair(cell(i, j), cell(i2, j));
            }
        }
    }
    CspInstance::from_pairs(size * size, size as u32, nogoods)
}

/// N-queens with one variable per row holding the queen's column.
pub fn gen_nqueens(size: usize) -> Result<CspInstance> {
    if size == 0 {
        return Err(Error::InvalidParameters("board size must be >= 1".into()));
    }
    if size == 1 {
        return CspInstance::from_pairs(1, 2, vec![vec![(1, 1)]]);
    }
    let mut nogoods = Vec::new();
    for i in 0..size {
        for j in i + 1..size {
            let gap = j - i;
            for a in 0..size {
                for b in 0..size {
                    if a == b || a.abs_diff(b) == gap {
                        nogoods.push(vec![(i as Var + 1, a as Value), (j as Var + 1, b as Value)]);
                    }
                }
            }
        }
    }
    CspInstance::from_pairs(size, size as u32, nogoods)
}
