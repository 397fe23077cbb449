//! Fixed benchmark fixtures shared by the criterion benches.

use kcsp_core::generators::{gen_coloring, gen_nqueens, gen_uniform};
use kcsp_core::CspInstance;

/// Named instances spanning SAT and UNSAT, binary and ternary nogoods.
pub fn fixtures() -> Vec<(&'static str, CspInstance)> {
    vec![
        ("k3-d3", gen_coloring(&[(1, 2), (2, 3), (1, 3)], 3, 3).unwrap()),
        ("queens-6", gen_nqueens(6).unwrap()),
        ("uniform-n12-d2-k2-m48", gen_uniform(12, 2, 2, 48, 1).unwrap()),
        ("uniform-n10-d3-k2-m60", gen_uniform(10, 3, 2, 60, 2).unwrap()),
        ("uniform-n10-d2-k3-m40", gen_uniform(10, 2, 3, 40, 3).unwrap()),
    ]
}
