//! Exact Cover and CNF instances, assignments, and seeded random generators.
//!
//! Everything here is 0-indexed. The 1-indexed external form lives in
//! [`crate::formats`].

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle;

/// Universe `{0..m}` together with a family of subsets of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactCoverInstance {
    universe_size: usize,
    subsets: Vec<Vec<usize>>,
}

impl ExactCoverInstance {
    /// Builds an instance from 0-based subsets. Each subset is sorted; an
    /// empty subset, an out-of-range element, a repeated element or a
    /// repeated subset is rejected.
    pub fn new(universe_size: usize, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(subsets.len());
        let mut seen = BTreeSet::new();
        for (i, mut s) in subsets.into_iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInstance(format!("subset {} is empty", i + 1)));
            }
            s.sort_unstable();
            if let Some(&e) = s.iter().find(|&&e| e >= universe_size) {
                return Err(Error::InvalidInstance(format!(
                    "subset {} contains element {} outside 1..={}",
                    i + 1,
                    e + 1,
                    universe_size
                )));
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidInstance(format!("subset {} repeats an element", i + 1)));
            }
            if !seen.insert(s.clone()) {
                return Err(Error::InvalidInstance(format!("subset {} duplicates an earlier subset", i + 1)));
            }
            normalized.push(s);
        }
        Ok(Self { universe_size, subsets: normalized })
    }

    /// Same as [`new`](Self::new) but with 1-based element labels.
    pub fn from_one_based(universe_size: usize, subsets: &[Vec<usize>]) -> Result<Self> {
        let shifted = subsets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&e| {
                        e.checked_sub(1)
                            .ok_or_else(|| Error::InvalidInstance("element label 0 (labels are 1-based)".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(universe_size, shifted)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn num_subsets(&self) -> usize {
        self.subsets.len()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, i: usize) -> &[usize] {
        &self.subsets[i]
    }

    /// For each element, the ascending list of subsets containing it.
    pub fn occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.universe_size];
        for (i, s) in self.subsets.iter().enumerate() {
            for &e in s {
                occ[e].push(i);
            }
        }
        occ
    }

    /// First element that does not appear in exactly three subsets.
    pub fn ec3_violation(&self) -> Option<(usize, usize)> {
        self.occurrences().iter().enumerate().find(|(_, o)| o.len() != 3).map(|(e, o)| (e, o.len()))
    }

    /// True iff every element appears in exactly three subsets.
    pub fn is_ec3(&self) -> bool {
        self.ec3_violation().is_none()
    }

    pub fn total_size(&self) -> usize {
        self.subsets.iter().map(Vec::len).sum()
    }

    pub(crate) fn require_ec3(&self) -> Result<()> {
        match self.ec3_violation() {
            None => Ok(()),
            Some((element, count)) => Err(Error::NotEc3 { element, count }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    /// 1-based signed label, negative for a negated literal.
    pub fn to_signed(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn from_signed(label: i64) -> Result<Self> {
        if label == 0 {
            return Err(Error::InvalidFormula("literal 0 is not allowed".into()));
        }
        let var = (label.unsigned_abs() - 1) as usize;
        Ok(Self { var, negated: label < 0 })
    }

    pub fn complement(self) -> Self {
        Self { negated: !self.negated, ..self }
    }

    pub fn is_true(self, a: &Assignment) -> bool {
        a.get(self.var) != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "¬x{}", self.var + 1)
        } else {
            write!(f, "x{}", self.var + 1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semantics {
    /// Ordinary 3SAT: a clause needs at least one true literal.
    Sat3,
    /// Positive 1-in-3SAT: all literals positive, exactly one true per clause.
    Positive1In3,
}

impl Semantics {
    pub fn name(self) -> &'static str {
        match self {
            Semantics::Sat3 => "sat3",
            Semantics::Positive1In3 => "positive_1in3",
        }
    }
}

pub type Clause = [Literal; 3];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
    semantics: Semantics,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>, semantics: Semantics) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidFormula("a formula needs at least one variable".into()));
        }
        for (k, c) in clauses.iter().enumerate() {
            if let Some(l) = c.iter().find(|l| l.var >= num_vars) {
                return Err(Error::InvalidFormula(format!(
                    "clause {} uses variable {} outside 1..={}",
                    k + 1,
                    l.var + 1,
                    num_vars
                )));
            }
            if c[0].var == c[1].var || c[0].var == c[2].var || c[1].var == c[2].var {
                return Err(Error::InvalidFormula(format!("clause {} repeats a variable", k + 1)));
            }
            if semantics == Semantics::Positive1In3 && c.iter().any(|l| l.negated) {
                return Err(Error::InvalidFormula(format!(
                    "clause {} has a negative literal under positive 1-in-3 semantics",
                    k + 1
                )));
            }
        }
        Ok(Self { num_vars, clauses, semantics })
    }

    /// Positive 1-in-3 formula from 0-based variable triples.
    pub fn positive_1in3(num_vars: usize, triples: &[[usize; 3]]) -> Result<Self> {
        let clauses = triples.iter().map(|t| t.map(Literal::pos)).collect();
        Self::new(num_vars, clauses, Semantics::Positive1In3)
    }

    /// Formula from 1-based signed literal labels (DIMACS-style integers).
    pub fn from_signed(num_vars: usize, clauses: &[[i64; 3]], semantics: Semantics) -> Result<Self> {
        let clauses = clauses
            .iter()
            .map(|c| Ok([Literal::from_signed(c[0])?, Literal::from_signed(c[1])?, Literal::from_signed(c[2])?]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(num_vars, clauses, semantics)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn semantics(&self) -> Semantics {
        self.semantics
    }

    pub(crate) fn require(&self, semantics: Semantics) -> Result<()> {
        if self.semantics == semantics {
            Ok(())
        } else {
            Err(Error::WrongSemantics { expected: semantics.name(), found: self.semantics.name() })
        }
    }

    /// Number of true literals of clause `k` under `a`.
    pub fn true_literals(&self, k: usize, a: &Assignment) -> usize {
        self.clauses[k].iter().filter(|l| l.is_true(a)).count()
    }

    pub fn clause_satisfied(&self, k: usize, a: &Assignment) -> bool {
        let t = self.true_literals(k, a);
        match self.semantics {
            Semantics::Sat3 => t >= 1,
            Semantics::Positive1In3 => t == 1,
        }
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Evaluation> {
        if a.len() != self.num_vars {
            return Err(Error::LengthMismatch { expected: self.num_vars, actual: a.len() });
        }
        let violated = (0..self.clauses.len()).filter(|&k| !self.clause_satisfied(k, a)).count();
        Ok(Evaluation { satisfied: violated == 0, violated_clause_count: violated })
    }

    pub fn first_violated(&self, a: &Assignment) -> Option<usize> {
        (0..self.clauses.len()).find(|&k| !self.clause_satisfied(k, a))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub satisfied: bool,
    pub violated_clause_count: usize,
}

/// Evaluates `formula` at `a`. Free-function form of [`CnfFormula::evaluate`].
pub fn evaluate(formula: &CnfFormula, a: &Assignment) -> Result<Evaluation> {
    formula.evaluate(a)
}

/// Truth assignment `x ∈ {0,1}^n`.
///
/// The assignment index is `Σ x_i 2^i` with `x_0` as the least significant
/// bit. It is not the quantum basis label; see
/// [`crate::hamiltonian::basis_index`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    /// Assignment with exactly the listed 0-based variables set to 1.
    pub fn from_ones(n: usize, ones: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &i in ones {
            bits[i] = true;
        }
        Self { bits }
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        Self { bits: (0..n).map(|i| (index >> i) & 1 == 1).collect() }
    }

    pub fn index(&self) -> u64 {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| 1u64 << i).sum()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// 0-based indices of the variables set to 1.
    pub fn ones(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Knobs for [`gen_random_ec3_with`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ec3Options {
    /// Number of subsets; drawn uniformly from `[max(3, m), min(2m, 3m)]`
    /// on each attempt when `None`.
    pub num_subsets: Option<usize>,
    /// Keep only instances with exactly one exact cover.
    pub unique_solution: bool,
    pub max_retries: usize,
}

impl Default for Ec3Options {
    fn default() -> Self {
        Self { num_subsets: None, unique_solution: false, max_retries: 1000 }
    }
}

/// Random EC3 instance on `m` elements with default options.
pub fn gen_random_ec3(m: usize, seed: u64) -> Result<ExactCoverInstance> {
    gen_random_ec3_with(m, seed, &Ec3Options::default())
}

/// Random EC3 instance on `m` elements.
///
/// Each element contributes three occurrence tokens; every token is placed
/// in a uniformly chosen subset slot. Draws that leave a subset empty, put
/// two tokens of one element in the same subset, or produce two equal
/// subsets are discarded and redrawn, up to `max_retries` times.
pub fn gen_random_ec3_with(m: usize, seed: u64, opts: &Ec3Options) -> Result<ExactCoverInstance> {
    if m == 0 {
        return Err(Error::InvalidArgument("EC3 generation needs m >= 1".into()));
    }
    if let Some(n) = opts.num_subsets {
        if n < 3 || n > 3 * m {
            return Err(Error::InvalidArgument(format!(
                "{n} subsets cannot hold 3 distinct occurrences of {m} elements (need 3 <= n <= {})",
                3 * m
            )));
        }
    }
    let mut rng = crate::rng_from_seed(seed);
    let mut last_reason = String::from("no attempt made");
    for _ in 0..opts.max_retries {
        let n = match opts.num_subsets {
            Some(n) => n,
            None => {
                let lo = m.max(3);
                let hi = (2 * m).max(lo);
                rng.random_range(lo..=hi)
            }
        };
        let mut subsets = vec![Vec::new(); n];
        let mut clash = false;
        for e in 0..m {
            for _ in 0..3 {
                let slot = rng.random_range(0..n);
                if subsets[slot].last() == Some(&e) {
                    clash = true;
                }
                subsets[slot].push(e);
            }
        }
        if clash {
            last_reason = "an element landed twice in one subset".into();
            continue;
        }
        if subsets.iter().any(Vec::is_empty) {
            last_reason = "a subset stayed empty".into();
            continue;
        }
        let instance = match ExactCoverInstance::new(m, subsets) {
            Ok(inst) => inst,
            Err(_) => {
                last_reason = "two subsets coincide".into();
                continue;
            }
        };
        if opts.unique_solution && oracle::count_exact_covers(&instance) != 1 {
            last_reason = "exact cover is not unique".into();
            continue;
        }
        return Ok(instance);
    }
    Err(Error::GenerationFailed { attempts: opts.max_retries, reason: last_reason })
}

/// Random 3SAT formula: every clause draws three distinct variables and
/// independent fair polarities.
pub fn gen_random_3sat(n: usize, m: usize, seed: u64) -> Result<CnfFormula> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("3SAT generation needs n >= 3, got {n}")));
    }
    let mut rng = crate::rng_from_seed(seed);
    let clauses = (0..m)
        .map(|_| {
            let mut vars = sample(&mut rng, n, 3).into_vec();
            vars.sort_unstable();
            [0, 1, 2].map(|t| Literal { var: vars[t], negated: rng.random_bool(0.5) })
        })
        .collect();
    CnfFormula::new(n, clauses, Semantics::Sat3)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn small_cover() -> ExactCoverInstance {
        ExactCoverInstance::from_one_based(
            5,
            &[vec![1, 2, 4], vec![1, 2, 5], vec![1, 3, 4], vec![2, 3], vec![3], vec![4, 5], vec![5]],
        )
        .unwrap()
    }

    fn small_cover_formula() -> CnfFormula {
        CnfFormula::positive_1in3(7, &[[0, 1, 2], [0, 1, 3], [2, 3, 4], [0, 2, 5], [1, 5, 6]]).unwrap()
    }

    #[test]
    fn small_cover_is_ec3() {
        let ec = small_cover();
        assert!(ec.is_ec3());
        assert_eq!(ec.total_size(), 15);
        assert_eq!(ec.occurrences()[0], vec![0, 1, 2]);
    }

    #[test]
    fn instance_validation() {
        assert!(ExactCoverInstance::new(3, vec![vec![]]).is_err());
        assert!(ExactCoverInstance::new(3, vec![vec![3]]).is_err());
        assert!(ExactCoverInstance::new(3, vec![vec![1, 1]]).is_err());
        assert!(ExactCoverInstance::new(3, vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(ExactCoverInstance::from_one_based(3, &[vec![0]]).is_err());
        let empty = ExactCoverInstance::new(0, vec![]).unwrap();
        assert!(empty.is_ec3());
    }

    #[test]
    fn formula_validation() {
        assert!(CnfFormula::positive_1in3(3, &[[0, 0, 1]]).is_err());
        assert!(CnfFormula::positive_1in3(3, &[[0, 1, 3]]).is_err());
        assert!(CnfFormula::from_signed(3, &[[1, -2, 3]], Semantics::Positive1In3).is_err());
        assert!(CnfFormula::from_signed(3, &[[1, -2, 3]], Semantics::Sat3).is_ok());
        assert!(CnfFormula::from_signed(3, &[[1, 0, 3]], Semantics::Sat3).is_err());
    }

    #[test]
    fn evaluate_small_cover() {
        let f = small_cover_formula();
        let cover = Assignment::from_ones(7, &[0, 4, 6]);
        assert_eq!(f.evaluate(&cover).unwrap(), Evaluation { satisfied: true, violated_clause_count: 0 });
        let zero = Assignment::zeros(7);
        assert_eq!(f.evaluate(&zero).unwrap().violated_clause_count, 5);
        let bad = Assignment::from_ones(7, &[0, 1]);
        let e = f.evaluate(&bad).unwrap();
        assert!(!e.satisfied);
        assert!(!f.clause_satisfied(0, &bad));
        assert!(matches!(f.evaluate(&Assignment::zeros(6)), Err(Error::LengthMismatch { expected: 7, actual: 6 })));
    }

    #[test]
    fn assignment_index_round_trip() {
        let a = Assignment::from_ones(7, &[0, 4, 6]);
        assert_eq!(a.index(), 1 + 16 + 64);
        assert_eq!(Assignment::from_index(a.index(), 7), a);
        assert_eq!(a.to_string(), "1000101");
    }

    #[test]
    fn ec3_generator_rejects_m1() {
        assert!(matches!(gen_random_ec3(1, 0), Err(Error::GenerationFailed { .. })));
        assert!(gen_random_ec3(0, 0).is_err());
    }

    #[test]
    fn ec3_generator_m5() {
        let a = gen_random_ec3(5, 11).unwrap();
        assert!(a.is_ec3());
        assert_eq!(a.total_size(), 15);
        assert_eq!(a, gen_random_ec3(5, 11).unwrap());
    }

    #[test]
    fn ec3_generator_fixed_subset_count() {
        let opts = Ec3Options { num_subsets: Some(7), ..Default::default() };
        let a = gen_random_ec3_with(5, 3, &opts).unwrap();
        assert_eq!(a.num_subsets(), 7);
        let bad = Ec3Options { num_subsets: Some(2), ..Default::default() };
        assert!(gen_random_ec3_with(5, 3, &bad).is_err());
    }

    #[test]
    fn sat3_generator() {
        let f = gen_random_3sat(3, 1, 9).unwrap();
        let vars: Vec<_> = f.clauses()[0].iter().map(|l| l.var).collect();
        assert_eq!(vars, vec![0, 1, 2]);
        let g = gen_random_3sat(5, 4, 1).unwrap();
        assert_eq!(g.num_clauses(), 4);
        assert_eq!(g.semantics(), Semantics::Sat3);
        assert_eq!(g, gen_random_3sat(5, 4, 1).unwrap());
        assert!(gen_random_3sat(2, 1, 0).is_err());
    }
}
