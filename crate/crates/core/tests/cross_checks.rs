use std::collections::HashMap;

use kcsp_core::corpus;
use kcsp_core::generators::{gen_coloring, gen_latin, gen_nqueens, gen_uniform};
use kcsp_core::instance::{CspInstance, PartialAssignment};
use kcsp_core::oracle::{enumerate_solutions, DEFAULT_CAP};
use kcsp_core::ppsz::{run_seeded_iteration, success_lower_bound, IterationScratch};
use kcsp_core::{solve_dpll, solve_ppsz, PpszOutcome, Value, Var};

fn count(inst: &CspInstance) -> usize {
    enumerate_solutions(inst, DEFAULT_CAP).unwrap().len()
}

/// Plain brute force, independent of the oracle module's enumeration.
fn brute_count(inst: &CspInstance) -> usize {
    let (n, d) = (inst.num_vars(), inst.domain_size());
    let total = (d as usize).pow(n as u32);
    (0..total)
        .filter(|&code| {
            let mut rest = code;
            let values: Vec<Value> = (0..n)
                .map(|_| {
                    let v = (rest % d as usize) as Value;
                    rest /= d as usize;
                    v
                })
                .collect();
            inst.is_satisfying(&PartialAssignment::from_values(&values)).unwrap()
        })
        .count()
}

#[test]
fn structured_solution_counts() {
    let tri = [(1, 2), (2, 3), (1, 3)];
    assert_eq!(count(&gen_coloring(&tri, 3, 3).unwrap()), 6);
    assert_eq!(count(&gen_coloring(&tri, 3, 2).unwrap()), 0);
    assert_eq!(count(&gen_coloring(&[(1, 2)], 2, 2).unwrap()), 2);
    assert_eq!(count(&gen_latin(1).unwrap()), 1);
    assert_eq!(count(&gen_latin(2).unwrap()), 2);
    assert_eq!(count(&gen_latin(3).unwrap()), 12);
    assert_eq!(count(&gen_nqueens(1).unwrap()), 1);
    assert_eq!(count(&gen_nqueens(2).unwrap()), 0);
    assert_eq!(count(&gen_nqueens(3).unwrap()), 0);
    assert_eq!(count(&gen_nqueens(4).unwrap()), 2);
    assert_eq!(count(&gen_nqueens(5).unwrap()), 10);
    assert_eq!(count(&gen_nqueens(6).unwrap()), 4);
    assert_eq!(count(&gen_uniform(3, 2, 2, 12, 8).unwrap()), 0);
    assert_eq!(count(&gen_uniform(3, 2, 2, 0, 8).unwrap()), 8);
}

#[test]
fn coloring_counts_match_chromatic_polynomial() {
    // cycle C5: (d-1)^5 - (d-1); K4: d(d-1)(d-2)(d-3)
    let c5 = [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)];
    let k4 = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
    for d in 2..=4u32 {
        let q = d as usize;
        assert_eq!(count(&gen_coloring(&c5, 5, d).unwrap()), (q - 1).pow(5) - (q - 1));
        let k4_count = (0..4).map(|i| q.saturating_sub(i)).product::<usize>();
        assert_eq!(count(&gen_coloring(&k4, 4, d).unwrap()), k4_count);
    }
}

#[test]
fn oracle_agrees_with_plain_brute_force() {
    for seed in 0..100 {
        let inst = gen_uniform(5, 3, 2 + (seed % 2) as usize, 20, seed).unwrap();
        assert_eq!(count(&inst), brute_count(&inst), "seed {seed}");
    }
}

#[test]
fn dpll_matches_oracle_on_random_and_structured() {
    let mut agree = 0;
    for seed in 0..300u64 {
        let n = 4 + (seed % 5) as usize;
        let d = 2 + (seed % 3) as u32;
        let k = 2 + (seed % 2) as usize;
        // ~ the satisfiability threshold
        let m = ((n as f64) * (d as f64).ln() * (d as f64).powi(k as i32)) as usize;
        let possible = (d as usize).pow(k as u32) * if k == 2 { n * (n - 1) / 2 } else { n * (n - 1) * (n - 2) / 6 };
        let m = m.min(possible * 3 / 4);
        let inst = gen_uniform(n, d, k, m, seed).unwrap();
        let truth = !enumerate_solutions(&inst, DEFAULT_CAP).unwrap().is_empty();
        let stats = solve_dpll(&inst);
        assert_eq!(stats.is_sat(), truth, "seed {seed}");
        agree += 1;
    }
    for entry in corpus::small_corpus(usize::MAX) {
        let truth = !enumerate_solutions(&entry.instance, DEFAULT_CAP).unwrap().is_empty();
        assert_eq!(solve_dpll(&entry.instance).is_sat(), truth, "{}", entry.name);
    }
    assert_eq!(agree, 300);
}

#[test]
fn ppsz_is_sound_on_corpus() {
    for entry in corpus::small_corpus(usize::MAX) {
        let sols = enumerate_solutions(&entry.instance, DEFAULT_CAP).unwrap();
        let stats = solve_ppsz(&entry.instance, Some(2000), 17).unwrap();
        match &stats.outcome {
            PpszOutcome::Sat(values) => assert!(sols.find(values).is_some(), "{}", entry.name),
            PpszOutcome::Failure => {}
        }
        if sols.is_empty() {
            assert_eq!(stats.outcome, PpszOutcome::Failure);
        }
    }
}

/// Exact probability that one iteration ends in a solution: average over
/// the next variable and over its narrowed domain, memoized on the partial
/// assignment. Written against the definition of narrow choice, not the
/// solver's code path.
fn exact_iteration_success(inst: &CspInstance) -> f64 {
    fn allowed(inst: &CspInstance, state: &[Option<Value>], y: usize) -> Vec<Value> {
        (0..inst.domain_size())
            .filter(|&a| {
                !inst.nogoods().iter().any(|ng| {
                    ng.pairs().iter().any(|&(v, b)| v as usize == y + 1 && b == a)
                        && ng
                            .pairs()
                            .iter()
                            .all(|&(v, b)| v as usize == y + 1 || state[v as usize - 1] == Some(b))
                })
            })
            .collect()
    }
    fn go(inst: &CspInstance, state: &mut Vec<Option<Value>>, memo: &mut HashMap<Vec<Option<Value>>, f64>) -> f64 {
        if let Some(&p) = memo.get(state) {
            return p;
        }
        let open: Vec<usize> = (0..state.len()).filter(|&i| state[i].is_none()).collect();
        let p = if open.is_empty() {
            let values: Vec<Value> = state.iter().map(|v| v.unwrap()).collect();
            if inst.satisfies_values(&values) { 1.0 } else { 0.0 }
        } else {
            let mut acc = 0.0;
            for &y in &open {
                let dom = allowed(inst, state, y);
                let mut inner = 0.0;
                for &a in &dom {
                    state[y] = Some(a);
                    inner += go(inst, state, memo);
                    state[y] = None;
                }
                if !dom.is_empty() {
                    acc += inner / dom.len() as f64;
                }
            }
            acc / open.len() as f64
        };
        memo.insert(state.clone(), p);
        p
    }
    go(inst, &mut vec![None; inst.num_vars()], &mut HashMap::new())
}

#[test]
fn exact_iteration_success_examples() {
    let tri: [(Var, Var); 3] = [(1, 2), (2, 3), (1, 3)];
    assert_eq!(exact_iteration_success(&gen_coloring(&tri, 3, 3).unwrap()), 1.0);
    assert_eq!(exact_iteration_success(&gen_coloring(&tri, 3, 2).unwrap()), 0.0);
    let forced = CspInstance::from_pairs(1, 2, vec![vec![(1, 0)]]).unwrap();
    assert_eq!(exact_iteration_success(&forced), 1.0);
    let free = CspInstance::from_pairs(3, 3, vec![]).unwrap();
    assert_eq!(exact_iteration_success(&free), 1.0);
}

/// The exact per-iteration success probability clears the floor on every
/// satisfiable small instance, and the sampled rate agrees with it.
#[test]
fn iteration_success_matches_exact_and_clears_floor() {
    let mut entries = corpus::small_corpus(6);
    entries.extend((0..12).map(|i| corpus::CorpusEntry {
        name: format!("u{i}"),
        instance: gen_uniform(5, 3, 2, 14, 100 + i).unwrap(),
    }));
    let mut tested = 0;
    for entry in entries {
        let inst = &entry.instance;
        if enumerate_solutions(inst, DEFAULT_CAP).unwrap().is_empty() {
            continue;
        }
        let exact = exact_iteration_success(inst);
        let k = inst.k_max().max(1) as u32;
        let bound = success_lower_bound(inst.num_vars() as u64, inst.domain_size(), k);
        assert!(exact >= bound, "{}: exact {exact} < bound {bound}", entry.name);

        let trials = 20_000u64;
        let mut scratch = IterationScratch::new(inst);
        let hits = (0..trials)
            .filter(|&i| run_seeded_iteration(inst, 31, i, &mut scratch).1)
            .count() as f64;
        let p_hat = hits / trials as f64;
        let se = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (p_hat - exact).abs() <= 5.0 * se + 1e-12,
            "{}: sampled {p_hat} vs exact {exact}",
            entry.name
        );
        tested += 1;
    }
    assert!(tested >= 20);
}
