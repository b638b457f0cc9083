//! Polynomial reductions to maximum-weight independent set, and back.
//!
//! Three reductions are provided:
//!
//! * EC3 → positive 1-in-3SAT: one variable per subset, one clause per
//!   element listing the three subsets that contain it.
//! * Exact Cover → MIS: one vertex per subset weighted by its size, an edge
//!   between overlapping subsets. An exact cover exists iff the maximum
//!   independent-set weight equals the universe size.
//! * 3SAT → MIS: a triangle per clause plus conflict edges between
//!   complementary literals; satisfiable iff there is an independent set of
//!   size equal to the clause count.
//!
//! Each reduction returns a [`SolutionMapping`] that translates solutions in
//! both directions and certifies infeasible inputs.

use std::collections::BTreeSet;

use crate::error::{Certificate, Error, Result};
use crate::instances::{Assignment, CnfFormula, ExactCoverInstance, Literal, Semantics};
use crate::scalar::Weight;
use crate::Rational;

/// Vertex-weighted simple undirected graph. Edges are stored as sorted
/// `(i, j)` pairs with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph<W> {
    weights: Vec<W>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl<W: Weight> WeightedGraph<W> {
    pub fn new(weights: Vec<W>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let n = weights.len();
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::InvalidGraph(format!("vertex {} has non-positive weight {}", i + 1, weights[i])));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", a + 1)));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge ({}, {}) outside 1..={n}", a + 1, b + 1)));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self { weights, edges, adjacency })
    }

    /// All-ones weights.
    pub fn unit(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(vec![W::one(); n], edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[W] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> &W {
        &self.weights[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency.get(a).is_some_and(|l| l.binary_search(&b).is_ok())
    }

    /// Ok if `set` is independent, otherwise the first offending edge.
    pub fn check_independent(&self, set: &[usize]) -> Result<(), Certificate> {
        let n = self.num_vertices();
        let mut chosen = vec![false; n];
        for &v in set {
            if v >= n {
                return Err(Certificate::OutOfRange(v));
            }
            chosen[v] = true;
        }
        for &(a, b) in &self.edges {
            if chosen[a] && chosen[b] {
                return Err(Certificate::Edge(a, b));
            }
        }
        Ok(())
    }

    pub fn is_independent(&self, set: &[usize]) -> bool {
        self.check_independent(set).is_ok()
    }

    pub fn set_weight(&self, set: &[usize]) -> W {
        set.iter().fold(W::zero(), |acc, &v| acc + self.weights[v].clone())
    }

    pub fn total_weight(&self) -> W {
        self.weights.iter().fold(W::zero(), |acc, w| acc + w.clone())
    }

    /// Same topology with weights mapped through `f`.
    pub fn map_weights<V: Weight>(&self, f: impl Fn(&W) -> V) -> Result<WeightedGraph<V>> {
        WeightedGraph::new(self.weights.iter().map(f).collect(), self.edges.iter().copied())
    }

    /// Vertex count and edge list equal; weights ignored.
    pub fn same_topology<V>(&self, other: &WeightedGraph<V>) -> bool {
        self.weights.len() == other.weights.len() && self.edges == other.edges
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    EcTo1In3,
    EcToMis,
    SatToMis,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::EcTo1In3 => "ec_to_1in3",
            ReductionKind::EcToMis => "ec_to_mis",
            ReductionKind::SatToMis => "sat_to_mis",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "ec_to_1in3" => Some(ReductionKind::EcTo1In3),
            "ec_to_mis" => Some(ReductionKind::EcToMis),
            "sat_to_mis" => Some(ReductionKind::SatToMis),
            _ => None,
        }
    }
}

/// A source instance of one of the reductions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceProblem {
    ExactCover(ExactCoverInstance),
    Formula(CnfFormula),
}

/// Solution of the source problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSolution {
    /// 0-based indices of the chosen subsets, ascending.
    Cover(Vec<usize>),
    Assignment(Assignment),
}

/// Solution of the reduced problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducedSolution {
    /// 0-based vertex indices.
    Vertices(Vec<usize>),
    Assignment(Assignment),
}

/// Result of decoding: the source-side object plus whether the reduced
/// solution reached the reduction's target (weight `m` or size `m`, or a
/// satisfying assignment). Only then is the decoded object guaranteed to be
/// a solution of the source instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub solution: SourceSolution,
    pub reaches_target: bool,
}

/// Translation tables between a source instance and its reduced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionMapping {
    kind: ReductionKind,
    source: SourceProblem,
    /// Target-side index → source label. Subset index for the Exact Cover
    /// reductions; `(clause, literal)` of the triangle vertex for 3SAT.
    vertex_labels: Vec<(usize, Literal)>,
    target: usize,
}

impl SolutionMapping {
    pub fn kind(&self) -> ReductionKind {
        self.kind
    }

    pub fn source(&self) -> &SourceProblem {
        &self.source
    }

    /// Required weight (Exact Cover → MIS) or size (3SAT → MIS) of an
    /// independent set; clause count for EC3 → 1-in-3SAT.
    pub fn target(&self) -> usize {
        self.target
    }

    /// `(clause, literal)` label of a 3SAT → MIS vertex.
    pub fn vertex_label(&self, v: usize) -> Option<(usize, Literal)> {
        match self.kind {
            ReductionKind::SatToMis => self.vertex_labels.get(v).copied(),
            _ => None,
        }
    }

    pub(crate) fn from_parts(kind: ReductionKind, source: SourceProblem) -> Result<Self> {
        match (kind, source) {
            (ReductionKind::EcTo1In3, SourceProblem::ExactCover(ec)) => Ok(ec3_to_1in3sat(&ec)?.1),
            (ReductionKind::EcToMis, SourceProblem::ExactCover(ec)) => Ok(exact_cover_to_mis(&ec)?.2),
            (ReductionKind::SatToMis, SourceProblem::Formula(f)) => Ok(sat3_to_mis(&f)?.2),
            (kind, _) => Err(Error::InvalidArgument(format!("source kind does not match reduction {}", kind.name()))),
        }
    }

    /// Maps a source solution to the reduced problem.
    ///
    /// For 3SAT → MIS the first true literal of every clause is chosen, so a
    /// satisfying assignment yields an independent set of size `m`.
    pub fn encode(&self, solution: &SourceSolution) -> Result<ReducedSolution> {
        match (&self.source, solution) {
            (SourceProblem::ExactCover(ec), SourceSolution::Cover(chosen)) => {
                if let Some(&i) = chosen.iter().find(|&&i| i >= ec.num_subsets()) {
                    return Err(Error::Infeasible(Certificate::OutOfRange(i)));
                }
                let mut chosen = chosen.clone();
                chosen.sort_unstable();
                chosen.dedup();
                Ok(match self.kind {
                    ReductionKind::EcTo1In3 => {
                        ReducedSolution::Assignment(Assignment::from_ones(ec.num_subsets(), &chosen))
                    }
                    _ => ReducedSolution::Vertices(chosen),
                })
            }
            (SourceProblem::Formula(f), SourceSolution::Assignment(a)) => {
                if a.len() != f.num_vars() {
                    return Err(Error::LengthMismatch { expected: f.num_vars(), actual: a.len() });
                }
                let mut vertices = Vec::with_capacity(f.num_clauses());
                for (k, clause) in f.clauses().iter().enumerate() {
                    match clause.iter().position(|l| l.is_true(a)) {
                        Some(t) => vertices.push(3 * k + t),
                        None => return Err(Error::Infeasible(Certificate::ViolatedClause(k))),
                    }
                }
                Ok(ReducedSolution::Vertices(vertices))
            }
            _ => Err(Error::InvalidArgument(format!("solution kind does not match reduction {}", self.kind.name()))),
        }
    }

    /// Maps a feasible reduced solution back to the source problem.
    pub fn decode(&self, solved: &ReducedSolution) -> Result<Decoded> {
        match (self.kind, &self.source, solved) {
            (ReductionKind::EcTo1In3, SourceProblem::ExactCover(_), ReducedSolution::Assignment(a)) => {
                let (formula, _) = ec3_to_1in3sat_unchecked(self.source_cover()?);
                if a.len() != formula.num_vars() {
                    return Err(Error::LengthMismatch { expected: formula.num_vars(), actual: a.len() });
                }
                if let Some(k) = formula.first_violated(a) {
                    return Err(Error::Infeasible(Certificate::ViolatedClause(k)));
                }
                Ok(Decoded { solution: SourceSolution::Cover(a.ones()), reaches_target: true })
            }
            (ReductionKind::EcToMis, SourceProblem::ExactCover(ec), ReducedSolution::Vertices(set)) => {
                let (graph, _, _) = exact_cover_to_mis(ec)?;
                graph.check_independent(set).map_err(Error::Infeasible)?;
                let mut cover = set.clone();
                cover.sort_unstable();
                cover.dedup();
                let weight = graph.set_weight(&cover);
                Ok(Decoded {
                    reaches_target: weight == Rational::from_integer(self.target as i64),
                    solution: SourceSolution::Cover(cover),
                })
            }
            (ReductionKind::SatToMis, SourceProblem::Formula(f), ReducedSolution::Vertices(set)) => {
                let (graph, _, _) = sat3_to_mis(f)?;
                graph.check_independent(set).map_err(Error::Infeasible)?;
                let mut forced: Vec<Option<bool>> = vec![None; f.num_vars()];
                let mut distinct = set.clone();
                distinct.sort_unstable();
                distinct.dedup();
                for &v in &distinct {
                    let (_, lit) = self.vertex_labels[v];
                    let value = !lit.negated;
                    match forced[lit.var] {
                        Some(prev) if prev != value => {
                            return Err(Error::Infeasible(Certificate::ConflictingVariable(lit.var)))
                        }
                        _ => forced[lit.var] = Some(value),
                    }
                }
                // unforced variables default to false
                let a = Assignment::new(forced.into_iter().map(|b| b.unwrap_or(false)).collect());
                Ok(Decoded { solution: SourceSolution::Assignment(a), reaches_target: distinct.len() == self.target })
            }
            _ => Err(Error::InvalidArgument(format!("solution kind does not match reduction {}", self.kind.name()))),
        }
    }

    fn source_cover(&self) -> Result<&ExactCoverInstance> {
        match &self.source {
            SourceProblem::ExactCover(ec) => Ok(ec),
            SourceProblem::Formula(_) => Err(Error::InvalidArgument("mapping source is not an exact cover".into())),
        }
    }
}

/// Free-function form of [`SolutionMapping::decode`].
pub fn decode_solution(mapping: &SolutionMapping, solved: &ReducedSolution) -> Result<Decoded> {
    mapping.decode(solved)
}

fn ec3_to_1in3sat_unchecked(ec: &ExactCoverInstance) -> (CnfFormula, usize) {
    let triples: Vec<[usize; 3]> = ec.occurrences().iter().map(|o| [o[0], o[1], o[2]]).collect();
    let n = ec.num_subsets().max(1);
    let f = CnfFormula::positive_1in3(n, &triples).expect("EC3 occurrences give distinct in-range triples");
    (f, triples.len())
}

/// EC3 → positive 1-in-3SAT.
pub fn ec3_to_1in3sat(ec: &ExactCoverInstance) -> Result<(CnfFormula, SolutionMapping)> {
    ec.require_ec3()?;
    if ec.num_subsets() == 0 {
        return Err(Error::InvalidInstance("an EC3 instance with no subsets has no formula".into()));
    }
    let (formula, m) = ec3_to_1in3sat_unchecked(ec);
    let mapping = SolutionMapping {
        kind: ReductionKind::EcTo1In3,
        source: SourceProblem::ExactCover(ec.clone()),
        vertex_labels: (0..ec.num_subsets()).map(|i| (i, Literal::pos(i))).collect(),
        target: m,
    };
    Ok((formula, mapping))
}

/// Exact Cover → weighted MIS. Returns the overlap graph `G_M` with
/// `weight(i) = |S_i|`, the target weight `m`, and the mapping.
pub fn exact_cover_to_mis(ec: &ExactCoverInstance) -> Result<(WeightedGraph<Rational>, usize, SolutionMapping)> {
    let n = ec.num_subsets();
    let weights = ec.subsets().iter().map(|s| Rational::from_integer(s.len() as i64)).collect();
    let mut edges = BTreeSet::new();
    for occ in ec.occurrences() {
        for (a, &i) in occ.iter().enumerate() {
            for &j in &occ[a + 1..] {
                edges.insert((i, j));
            }
        }
    }
    let graph = WeightedGraph::new(weights, edges)?;
    let mapping = SolutionMapping {
        kind: ReductionKind::EcToMis,
        source: SourceProblem::ExactCover(ec.clone()),
        vertex_labels: (0..n).map(|i| (i, Literal::pos(i))).collect(),
        target: ec.universe_size(),
    };
    Ok((graph, ec.universe_size(), mapping))
}

/// 3SAT → unweighted MIS. Vertex `3k + t` is literal `t` of clause `k`.
pub fn sat3_to_mis(f: &CnfFormula) -> Result<(WeightedGraph<Rational>, usize, SolutionMapping)> {
    f.require(Semantics::Sat3)?;
    let m = f.num_clauses();
    let labels: Vec<(usize, Literal)> =
        f.clauses().iter().enumerate().flat_map(|(k, c)| c.iter().map(move |&l| (k, l))).collect();
    let mut edges = Vec::new();
    for k in 0..m {
        let b = 3 * k;
        edges.extend([(b, b + 1), (b, b + 2), (b + 1, b + 2)]);
    }
    for u in 0..labels.len() {
        for v in u + 1..labels.len() {
            let ((cu, lu), (cv, lv)) = (labels[u], labels[v]);
            if cu != cv && lu == lv.complement() {
                edges.push((u, v));
            }
        }
    }
    let graph = WeightedGraph::unit(3 * m, edges)?;
    let mapping = SolutionMapping {
        kind: ReductionKind::SatToMis,
        source: SourceProblem::Formula(f.clone()),
        vertex_labels: labels,
        target: m,
    };
    Ok((graph, m, mapping))
}

/// Variable co-occurrence graph `G_EC` of a formula: an edge between two
/// variables that appear together in some clause.
pub fn co_occurrence_edges(f: &CnfFormula) -> Vec<(usize, usize)> {
    let mut edges = BTreeSet::new();
    for c in f.clauses() {
        for a in 0..3 {
            for b in a + 1..3 {
                let (i, j) = (c[a].var, c[b].var);
                edges.insert((i.min(j), i.max(j)));
            }
        }
    }
    edges.into_iter().collect()
}

/// Checks that the co-occurrence graph of the EC3 → 1-in-3SAT formula and
/// the overlap graph of the Exact Cover → MIS reduction coincide (vertices
/// and edges; weights are not compared).
pub fn graphs_identical(ec: &ExactCoverInstance) -> Result<bool> {
    let (formula, _) = ec3_to_1in3sat(ec)?;
    let (gm, _, _) = exact_cover_to_mis(ec)?;
    let gec: WeightedGraph<Rational> = WeightedGraph::unit(formula.num_vars(), co_occurrence_edges(&formula))?;
    Ok(gec.same_topology(&gm))
}
