//! Exact and randomized algorithms for constraint satisfaction problems
//! given as nogoods, with brute-force oracles for checking them.
//!
//! - [`instance`]: the problem model, text format and narrow-choice
//!   primitives.
//! - [`dpll`]: deterministic nogood-branching search.
//! - [`ppsz`]: randomized narrow-choice search and its iteration budget.
//! - [`analysis`]: characteristic roots and closed-form bounds.
//! - [`oracle`]: exhaustive enumeration, isolation degrees and the
//!   narrow-choice averages.
//! - [`generators`] and [`corpus`]: instance families.
//! - [`experiment`]: seeded experiment drivers producing JSON-ready results.

pub mod analysis;
pub mod corpus;
pub mod dpll;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod instance;
pub mod oracle;
pub mod ppsz;
pub mod rng;

pub use analysis::{char_root, RootResult};
pub use dpll::{count_nodes, solve_dpll, DpllOutcome, DpllStats};
pub use error::{Error, ParseError, Result};
pub use experiment::{ExperimentResult, Verdict};
pub use generators::GenSpec;
pub use instance::{
    nogood_status, parse_instance, serialize_instance, CspInstance, Nogood, NogoodStatus,
    PartialAssignment, Value, Var,
};
pub use oracle::{enumerate_solutions, PointSet, SolutionSet};
pub use ppsz::{repeat_count, solve_ppsz, success_lower_bound, PpszOutcome, PpszStats};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
