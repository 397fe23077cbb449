//! Problem representation: an instance is `n` variables over the domain
//! `{0..d-1}` together with a set of nogoods. A nogood is a partial
//! assignment that must not be fully matched; a constraint of arity `k`
//! contributes one nogood per falsifying tuple.
//!
//! Variables are 1-indexed and values 0-indexed throughout the crate.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, ParseError, Result};

/// 1-indexed variable.
pub type Var = u32;
/// 0-indexed domain value.
pub type Value = u32;

/// A forbidden partial assignment, pairs sorted by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Nogood {
    pairs: Vec<(Var, Value)>,
}

impl Nogood {
    /// Sorts the pairs into canonical order. Fails on a repeated variable.
    pub fn new(mut pairs: Vec<(Var, Value)>) -> Result<Self> {
        pairs.sort_unstable();
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidInstance(format!(
                "variable {} repeated within one nogood",
                w[0].0
            )));
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(Var, Value)] {
        &self.pairs
    }

    pub fn arity(&self) -> usize {
        self.pairs.len()
    }

    /// The value this nogood demands of `var`, if it mentions it.
    pub fn value_of(&self, var: Var) -> Option<Value> {
        self.pairs
            .binary_search_by_key(&var, |&(v, _)| v)
            .ok()
            .map(|i| self.pairs[i].1)
    }
}

/// Classification of a nogood against a partial assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NogoodStatus {
    /// Some assigned variable disagrees with the nogood.
    Killed,
    /// Every pair is assigned and agrees: the nogood is violated.
    Matched,
    /// No disagreement yet; these variables are still unassigned.
    Active(Vec<Var>),
}

/// Per-variable value-or-unassigned map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    values: Vec<Option<Value>>,
    assigned: usize,
}

impl PartialAssignment {
    pub fn new(n: usize) -> Self {
        Self {
            values: vec![None; n],
            assigned: 0,
        }
    }

    /// A total assignment; `values[i]` is the value of variable `i + 1`.
    pub fn from_values(values: &[Value]) -> Self {
        Self {
            values: values.iter().copied().map(Some).collect(),
            assigned: values.len(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    pub fn assigned_count(&self) -> usize {
        self.assigned
    }

    pub fn is_total(&self) -> bool {
        self.assigned == self.values.len()
    }

    #[inline]
    pub fn get(&self, var: Var) -> Option<Value> {
        self.values[var as usize - 1]
    }

    #[inline]
    pub fn is_assigned(&self, var: Var) -> bool {
        self.values[var as usize - 1].is_some()
    }

    /// Assigns or overwrites `var`.
    pub fn assign(&mut self, var: Var, value: Value) {
        let slot = &mut self.values[var as usize - 1];
        if slot.is_none() {
            self.assigned += 1;
        }
        *slot = Some(value);
    }

    pub fn unassign(&mut self, var: Var) {
        let slot = &mut self.values[var as usize - 1];
        if slot.take().is_some() {
            self.assigned -= 1;
        }
    }

    pub fn clear(&mut self) {
        self.values.iter_mut().for_each(|v| *v = None);
        self.assigned = 0;
    }

    /// Value vector of a total assignment.
    pub fn to_values(&self) -> Option<Vec<Value>> {
        self.values.iter().copied().collect()
    }
}

/// Classifies `nogood` against `pa`.
pub fn nogood_status(nogood: &Nogood, pa: &PartialAssignment) -> NogoodStatus {
    let mut open = Vec::new();
    for &(var, value) in nogood.pairs() {
        match pa.get(var) {
            Some(v) if v != value => return NogoodStatus::Killed,
            Some(_) => {}
            None => open.push(var),
        }
    }
    if open.is_empty() {
        NogoodStatus::Matched
    } else {
        NogoodStatus::Active(open)
    }
}

/// An immutable, canonicalized CSP instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    n: usize,
    d: u32,
    nogoods: Vec<Nogood>,
    k_max: usize,
    // occurrences[v - 1] lists the indices of nogoods mentioning v
    occurrences: Vec<Vec<usize>>,
    has_empty_nogood: bool,
}

impl CspInstance {
    /// Validates and canonicalizes. Duplicate nogoods are dropped, keeping
    /// the first occurrence in input order.
    pub fn new(n: usize, d: u32, nogoods: Vec<Nogood>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("n must be positive".into()));
        }
        if d < 2 {
            return Err(Error::InvalidInstance("d must be at least 2".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidInstance("n too large".into()));
        }
        let mut seen = HashSet::with_capacity(nogoods.len());
        let mut kept = Vec::with_capacity(nogoods.len());
        for ng in nogoods {
            for &(var, value) in ng.pairs() {
                if var == 0 || var as usize > n {
                    return Err(Error::VariableOutOfRange { var, n });
                }
                if value >= d {
                    return Err(Error::InvalidInstance(format!(
                        "value {value} out of range 0..{d}"
                    )));
                }
            }
            if seen.insert(ng.clone()) {
                kept.push(ng);
            }
        }
        Ok(Self::build(n, d, kept))
    }

    /// Convenience constructor from raw pair lists.
    pub fn from_pairs(n: usize, d: u32, nogoods: Vec<Vec<(Var, Value)>>) -> Result<Self> {
        let nogoods = nogoods
            .into_iter()
            .map(Nogood::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, d, nogoods)
    }

    fn build(n: usize, d: u32, nogoods: Vec<Nogood>) -> Self {
        let mut occurrences = vec![Vec::new(); n];
        for (i, ng) in nogoods.iter().enumerate() {
            for &(var, _) in ng.pairs() {
                occurrences[var as usize - 1].push(i);
            }
        }
        Self {
            n,
            d,
            k_max: nogoods.iter().map(Nogood::arity).max().unwrap_or(0),
            has_empty_nogood: nogoods.iter().any(|ng| ng.arity() == 0),
            nogoods,
            occurrences,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn domain_size(&self) -> u32 {
        self.d
    }

    pub fn nogoods(&self) -> &[Nogood] {
        &self.nogoods
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Indices of the nogoods that mention `var`.
    pub fn occurrences(&self, var: Var) -> &[usize] {
        &self.occurrences[var as usize - 1]
    }

    pub fn variables(&self) -> impl Iterator<Item = Var> {
        1..=self.n as Var
    }

    /// `d^n`, saturating.
    pub fn search_space(&self) -> u128 {
        (self.d as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX)
    }

    fn check_var(&self, var: Var) -> Result<()> {
        if var == 0 || var as usize > self.n {
            Err(Error::VariableOutOfRange { var, n: self.n })
        } else {
            Ok(())
        }
    }

    /// True iff the total assignment `pa` matches no nogood.
    pub fn is_satisfying(&self, pa: &PartialAssignment) -> Result<bool> {
        if !pa.is_total() || pa.num_vars() != self.n {
            return Err(Error::NotTotal {
                assigned: pa.assigned_count(),
                n: self.n,
            });
        }
        Ok(self
            .nogoods
            .iter()
            .all(|ng| ng.pairs().iter().any(|&(v, a)| pa.get(v) != Some(a))))
    }

    /// Same check on a plain value vector (`values[i]` is variable `i + 1`).
    pub fn satisfies_values(&self, values: &[Value]) -> bool {
        debug_assert_eq!(values.len(), self.n);
        self.nogoods
            .iter()
            .all(|ng| ng.pairs().iter().any(|&(v, a)| values[v as usize - 1] != a))
    }

    /// Values of `y` still allowed after removing every value forbidden by
    /// a nogood whose other pairs are all assigned in agreement with `pa`.
    pub fn narrowed_domain(&self, pa: &PartialAssignment, y: Var) -> Result<Vec<Value>> {
        self.check_var(y)?;
        if pa.is_assigned(y) {
            return Err(Error::VariableAssigned(y));
        }
        let mut forbidden = Vec::new();
        self.forbidden_values(pa, y, &mut forbidden);
        Ok((0..self.d).filter(|&a| !forbidden[a as usize]).collect())
    }

    /// True iff the narrowed domain of `y` is a proper subset of the domain.
    pub fn is_narrowly_chosen(&self, pa: &PartialAssignment, y: Var) -> Result<bool> {
        self.check_var(y)?;
        if pa.is_assigned(y) {
            return Err(Error::VariableAssigned(y));
        }
        let mut forbidden = Vec::new();
        Ok(self.forbidden_values(pa, y, &mut forbidden) > 0)
    }

    /// Fills `forbidden[a]` for every value of the unassigned variable `y`
    /// and returns how many are forbidden. `forbidden` is a reusable buffer.
    pub(crate) fn forbidden_values(
        &self,
        pa: &PartialAssignment,
        y: Var,
        forbidden: &mut Vec<bool>,
    ) -> usize {
        forbidden.clear();
        let d = self.d as usize;
        if self.has_empty_nogood {
            forbidden.resize(d, true);
            return d;
        }
        forbidden.resize(d, false);
        let mut count = 0;
        for &idx in self.occurrences(y) {
            let ng = &self.nogoods[idx];
            let mut target = None;
            let applies = ng.pairs().iter().all(|&(v, a)| {
                if v == y {
                    target = Some(a);
                    true
                } else {
                    pa.get(v) == Some(a)
                }
            });
            if applies {
                let a = target.expect("nogood listed under y mentions y") as usize;
                if !forbidden[a] {
                    forbidden[a] = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// Canonical text serialization.
    pub fn to_text(&self) -> String {
        let mut out = format!("p csp {} {}\n", self.n, self.d);
        for ng in &self.nogoods {
            out.push_str("n ");
            write!(out, "{}", ng.arity()).unwrap();
            for &(v, a) in ng.pairs() {
                write!(out, " {v} {a}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Parses the instance text format.
///
/// ```text
/// # comment
/// p csp <n> <d>
/// n <arity> v1 a1 ... v_arity a_arity
/// ```
pub fn parse_instance(input: &[u8]) -> Result<CspInstance, ParseError> {
    let text = std::str::from_utf8(input).map_err(|_| ParseError::Encoding)?;
    let mut header: Option<(usize, u32)> = None;
    let mut nogoods = Vec::new();
    let mut seen = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        match tokens.next() {
            Some("p") => {
                if header.is_some() {
                    return Err(ParseError::DuplicateHeader { line });
                }
                let rest: Vec<&str> = tokens.collect();
                let parsed = match rest.as_slice() {
                    ["csp", n, d] => n.parse::<usize>().ok().zip(d.parse::<u32>().ok()),
                    _ => None,
                };
                match parsed {
                    Some((n, d)) if n >= 1 && n <= u32::MAX as usize && d >= 2 => {
                        header = Some((n, d))
                    }
                    _ => return Err(ParseError::MalformedHeader { line }),
                }
            }
            Some("n") => {
                let (n, d) = header.ok_or(ParseError::MissingHeader { line })?;
                let nums = tokens
                    .map(|t| t.parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ParseError::MalformedNogood {
                        line,
                        reason: e.to_string(),
                    })?;
                let Some((&arity, rest)) = nums.split_first() else {
                    return Err(ParseError::MalformedNogood {
                        line,
                        reason: "missing arity".into(),
                    });
                };
                if rest.len() as u64 != arity.saturating_mul(2) {
                    return Err(ParseError::MalformedNogood {
                        line,
                        reason: format!("arity {arity} but {} numbers follow", rest.len()),
                    });
                }
                let mut pairs = Vec::with_capacity(rest.len() / 2);
                for chunk in rest.chunks(2) {
                    let (var, value) = (chunk[0], chunk[1]);
                    if var == 0 || var > n as u64 {
                        return Err(ParseError::VariableOutOfRange { line, var, n });
                    }
                    if value >= d as u64 {
                        return Err(ParseError::ValueOutOfRange { line, value, d });
                    }
                    pairs.push((var as Var, value as Value));
                }
                pairs.sort_unstable();
                if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
                    return Err(ParseError::RepeatedVariable { line, var: w[0].0 });
                }
                let ng = Nogood { pairs };
                if seen.insert(ng.clone()) {
                    nogoods.push(ng);
                }
            }
            _ => return Err(ParseError::UnknownLine { line }),
        }
    }
    let (n, d) = header.ok_or(ParseError::NoHeader)?;
    Ok(CspInstance::build(n, d, nogoods))
}

/// Canonical serialization as bytes.
pub fn serialize_instance(instance: &CspInstance) -> Vec<u8> {
    instance.to_text().into_bytes()
}
