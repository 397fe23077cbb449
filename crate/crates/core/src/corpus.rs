//! Named small instances used by the verification campaigns and tests.

use crate::generators::{gen_coloring, gen_latin, gen_nqueens, gen_uniform};
use crate::instance::CspInstance;

const TRIANGLE: [(u32, u32); 3] = [(1, 2), (2, 3), (1, 3)];
const K4: [(u32, u32); 6] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];
const PATH4: [(u32, u32); 3] = [(1, 2), (2, 3), (3, 4)];
const CYCLE5: [(u32, u32); 5] = [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)];

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub instance: CspInstance,
}

fn entry(name: impl Into<String>, instance: CspInstance) -> CorpusEntry {
    CorpusEntry {
        name: name.into(),
        instance,
    }
}

/// Colorings, Latin squares up to order 3 and queens up to 6.
pub fn structured() -> Vec<CorpusEntry> {
    let mut out = vec![
        entry("edge-d2", gen_coloring(&[(1, 2)], 2, 2).unwrap()),
        entry("triangle-k3-d2", gen_coloring(&TRIANGLE, 3, 2).unwrap()),
        entry("triangle-k3-d3", gen_coloring(&TRIANGLE, 3, 3).unwrap()),
        entry("k4-d3", gen_coloring(&K4, 4, 3).unwrap()),
        entry("k4-d4", gen_coloring(&K4, 4, 4).unwrap()),
        entry("path4-d2", gen_coloring(&PATH4, 4, 2).unwrap()),
        entry("cycle5-d2", gen_coloring(&CYCLE5, 5, 2).unwrap()),
        entry("cycle5-d3", gen_coloring(&CYCLE5, 5, 3).unwrap()),
    ];
    for size in 1..=3 {
        out.push(entry(format!("latin-{size}"), gen_latin(size).unwrap()));
    }
    for size in 1..=6 {
        out.push(entry(format!("queens-{size}"), gen_nqueens(size).unwrap()));
    }
    out
}

/// Hand-built edge cases: empty, unary, arity-0 and mixed-arity nogoods.
pub fn handmade() -> Vec<CorpusEntry> {
    vec![
        entry("free-n2-d2", CspInstance::from_pairs(2, 2, vec![]).unwrap()),
        entry("free-n3-d3", CspInstance::from_pairs(3, 3, vec![]).unwrap()),
        entry("unary-n1-d2", CspInstance::from_pairs(1, 2, vec![vec![(1, 0)]]).unwrap()),
        entry("falsum-n2-d2", CspInstance::from_pairs(2, 2, vec![vec![]]).unwrap()),
        entry(
            "two-nogood-n2-d2",
            CspInstance::from_pairs(2, 2, vec![vec![(1, 0)], vec![(1, 1), (2, 0)]]).unwrap(),
        ),
        entry(
            "mixed-n4-d3",
            CspInstance::from_pairs(
                4,
                3,
                vec![
                    vec![(2, 1)],
                    vec![(1, 0), (3, 2)],
                    vec![(1, 1), (2, 0), (4, 2)],
                    vec![(3, 0), (4, 0)],
                    vec![(2, 2), (3, 1), (4, 1)],
                ],
            )
            .unwrap(),
        ),
    ]
}

/// Seeded uniform instances with `n <= 7`, roughly half satisfiable.
pub fn random_small(count: usize, seed: u64) -> Vec<CorpusEntry> {
    let shapes = [(4, 2, 2, 10), (5, 2, 3, 26), (5, 3, 2, 45), (6, 2, 2, 14), (6, 3, 3, 170), (7, 2, 3, 36)];
    (0..count)
        .map(|i| {
            let (n, d, k, m) = shapes[i % shapes.len()];
            let s = crate::rng::derive_seed(seed, &[i as u64]);
            entry(
                format!("uniform-n{n}-d{d}-k{k}-m{m}-#{i}"),
                gen_uniform(n, d, k, m, s).unwrap(),
            )
        })
        .collect()
}

/// Everything above with `n <= max_vars`.
pub fn small_corpus(max_vars: usize) -> Vec<CorpusEntry> {
    structured()
        .into_iter()
        .chain(handmade())
        .chain(random_small(24, 0x5eed))
        .filter(|e| e.instance.num_vars() <= max_vars)
        .collect()
}
