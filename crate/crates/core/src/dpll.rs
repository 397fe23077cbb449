//! Deterministic nogood-branching search.
//!
//! At every node the search picks an active nogood `(u1:a1, ..., ut:at)`
//! restricted to its unassigned pairs and splits on it: first `u1` takes
//! each value other than `a1`; once those subtrees fail, `u1` is fixed to
//! `a1` and `u2` is split the same way, and so on. The branch that would
//! set every `ui = ai` is never explored because it matches the nogood.
//! A node has at most `(d - 1) * t` children, which gives the recurrence
//! `T(n) <= (d - 1) (T(n-1) + ... + T(n-k))`.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::instance::{CspInstance, PartialAssignment, Value, Var};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "assignment", rename_all = "UPPERCASE")]
pub enum DpllOutcome {
    Sat(Vec<Value>),
    Unsat,
}

#[derive(Debug, Clone)]
pub struct DpllStats {
    pub outcome: DpllOutcome,
    /// Visits of the branching procedure, root included.
    pub nodes: u64,
    pub max_depth: usize,
    /// Largest number of children generated at a single node.
    pub max_branching: u64,
    pub elapsed: Duration,
}

impl DpllStats {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, DpllOutcome::Sat(_))
    }
}

enum NodeScan {
    Conflict,
    AllKilled,
    Branch(usize),
}

struct Search<'a> {
    instance: &'a CspInstance,
    pa: PartialAssignment,
    nodes: u64,
    max_depth: usize,
    max_branching: u64,
}

impl Search<'_> {
    /// Fails on a matched nogood; otherwise returns the active nogood with
    /// the fewest unassigned variables (lowest index on ties).
    fn scan(&self) -> NodeScan {
        let mut best: Option<(usize, usize)> = None;
        for (idx, ng) in self.instance.nogoods().iter().enumerate() {
            let mut open = 0;
            let mut killed = false;
            for &(v, a) in ng.pairs() {
                match self.pa.get(v) {
                    Some(b) if b != a => {
                        killed = true;
                        break;
                    }
                    Some(_) => {}
                    None => open += 1,
                }
            }
            if killed {
                continue;
            }
            if open == 0 {
                return NodeScan::Conflict;
            }
            if best.map_or(true, |(_, o)| open < o) {
                best = Some((idx, open));
            }
        }
        match best {
            Some((idx, _)) => NodeScan::Branch(idx),
            None => NodeScan::AllKilled,
        }
    }

    fn visit(&mut self, depth: usize) -> bool {
        self.nodes += 1;
        self.max_depth = self.max_depth.max(depth);
        let idx = match self.scan() {
            NodeScan::Conflict => return false,
            NodeScan::AllKilled => return true,
            NodeScan::Branch(idx) => idx,
        };
        let open: Vec<(Var, Value)> = self.instance.nogoods()[idx]
            .pairs()
            .iter()
            .copied()
            .filter(|&(v, _)| !self.pa.is_assigned(v))
            .collect();
        let d = self.instance.domain_size();
        let mut children = 0;
        let mut fixed = 0;
        let mut found = false;
        'split: for &(var, avoid) in &open {
            for value in (0..d).filter(|&b| b != avoid) {
                children += 1;
                self.pa.assign(var, value);
                if self.visit(depth + 1) {
                    found = true;
                    break 'split;
                }
                self.pa.unassign(var);
            }
            self.pa.assign(var, avoid);
            fixed += 1;
        }
        self.max_branching = self.max_branching.max(children);
        if found {
            return true;
        }
        for &(var, _) in &open[..fixed] {
            self.pa.unassign(var);
        }
        false
    }
}

/// Complete and sound: returns a satisfying assignment iff one exists.
pub fn solve_dpll(instance: &CspInstance) -> DpllStats {
    let start = Instant::now();
    let mut search = Search {
        instance,
        pa: PartialAssignment::new(instance.num_vars()),
        nodes: 0,
        max_depth: 0,
        max_branching: 0,
    };
    let outcome = if search.visit(0) {
        // every nogood is killed, so any completion works
        let mut pa = search.pa;
        for var in instance.variables() {
            if !pa.is_assigned(var) {
                pa.assign(var, 0);
            }
        }
        assert!(
            instance.is_satisfying(&pa).expect("assignment is total"),
            "search returned a non-satisfying assignment"
        );
        DpllOutcome::Sat(pa.to_values().expect("assignment is total"))
    } else {
        DpllOutcome::Unsat
    };
    DpllStats {
        outcome,
        nodes: search.nodes,
        max_depth: search.max_depth,
        max_branching: search.max_branching,
        elapsed: start.elapsed(),
    }
}

/// Size of the search tree: explored in full on UNSAT instances, up to the
/// first solution otherwise.
pub fn count_nodes(instance: &CspInstance) -> u64 {
    solve_dpll(instance).nodes
}
