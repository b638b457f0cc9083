//! Classical brute-force ground truth.
//!
//! Nothing here touches floating point: weights are compared exactly in
//! whatever [`Weight`] the graph carries.

use crate::error::{Error, Result};
use crate::instances::{Assignment, CnfFormula, ExactCoverInstance};
use crate::reductions::WeightedGraph;
use crate::scalar::Weight;

pub const MIS_MAX_VERTICES: usize = 30;
pub const NAIVE_MIS_MAX_VERTICES: usize = 20;
pub const SAT_MAX_VARS: usize = 24;

/// Maximum independent-set weight and every maximizing vertex set.
#[derive(Debug, Clone, PartialEq)]
pub struct MisSolution<W> {
    pub max_weight: W,
    /// Sorted vertex lists, in lexicographic order.
    pub maximizers: Vec<Vec<usize>>,
}

/// Exact maximum-weight independent sets by branch and bound.
///
/// Vertices are branched in order of decreasing degree. A branch is cut
/// when its weight plus the weight of every still-selectable vertex is
/// strictly below the best weight found, so ties survive and every
/// maximizer is reported.
pub fn brute_force_mis<W: Weight>(g: &WeightedGraph<W>) -> Result<MisSolution<W>> {
    let n = g.num_vertices();
    if n > MIS_MAX_VERTICES {
        return Err(Error::SizeCap { what: "MIS oracle graph", size: n, cap: MIS_MAX_VERTICES });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
    let masks: Vec<u32> = (0..n).map(|v| g.neighbors(v).iter().fold(0u32, |m, &u| m | (1 << u))).collect();
    let mut search = Search { g, order, masks, best: W::zero(), found: Vec::new() };
    search.recurse(0, 0, 0, W::zero());
    let mut maximizers: Vec<Vec<usize>> =
        search.found.into_iter().map(|mask| (0..n).filter(|&v| mask >> v & 1 == 1).collect()).collect();
    maximizers.sort();
    maximizers.dedup();
    Ok(MisSolution { max_weight: search.best, maximizers })
}

struct Search<'a, W> {
    g: &'a WeightedGraph<W>,
    order: Vec<usize>,
    masks: Vec<u32>,
    best: W,
    found: Vec<u32>,
}

impl<W: Weight> Search<'_, W> {
    fn recurse(&mut self, depth: usize, chosen: u32, blocked: u32, weight: W) {
        if depth == self.order.len() {
            if weight > self.best {
                self.best = weight;
                self.found.clear();
                self.found.push(chosen);
            } else if weight == self.best {
                self.found.push(chosen);
            }
            return;
        }
        let available = self.order[depth..]
            .iter()
            .filter(|&&v| blocked >> v & 1 == 0)
            .fold(W::zero(), |acc, &v| acc + self.g.weight(v).clone());
        if weight.clone() + available < self.best {
            return;
        }
        let v = self.order[depth];
        if blocked >> v & 1 == 0 {
            let w = weight.clone() + self.g.weight(v).clone();
            self.recurse(depth + 1, chosen | 1 << v, blocked | self.masks[v] | 1 << v, w);
        }
        self.recurse(depth + 1, chosen, blocked | 1 << v, weight);
    }
}

/// Reference path: every subset of vertices, no pruning.
pub fn naive_mis<W: Weight>(g: &WeightedGraph<W>) -> Result<MisSolution<W>> {
    let n = g.num_vertices();
    if n > NAIVE_MIS_MAX_VERTICES {
        return Err(Error::SizeCap { what: "naive MIS graph", size: n, cap: NAIVE_MIS_MAX_VERTICES });
    }
    let mut best = W::zero();
    let mut found: Vec<Vec<usize>> = vec![Vec::new()];
    for mask in 1u64..(1u64 << n) {
        let set: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        if !g.is_independent(&set) {
            continue;
        }
        let w = g.set_weight(&set);
        if w > best {
            best = w;
            found = vec![set];
        } else if w == best {
            found.push(set);
        }
    }
    found.sort();
    Ok(MisSolution { max_weight: best, maximizers: found })
}

/// Every assignment satisfying `f` under its semantics, in increasing
/// assignment index.
pub fn enumerate_satisfying(f: &CnfFormula) -> Result<Vec<Assignment>> {
    let n = f.num_vars();
    if n > SAT_MAX_VARS {
        return Err(Error::SizeCap { what: "formula variable count", size: n, cap: SAT_MAX_VARS });
    }
    let clauses = ClauseMasks::new(f);
    Ok((0..1u64 << n).filter(|&x| clauses.satisfied(x)).map(|x| Assignment::from_index(x, n)).collect())
}

/// Number of satisfying assignments; same enumeration as
/// [`enumerate_satisfying`] without materializing them.
pub fn count_satisfying(f: &CnfFormula) -> Result<usize> {
    let n = f.num_vars();
    if n > SAT_MAX_VARS {
        return Err(Error::SizeCap { what: "formula variable count", size: n, cap: SAT_MAX_VARS });
    }
    let clauses = ClauseMasks::new(f);
    Ok((0..1u64 << n).filter(|&x| clauses.satisfied(x)).count())
}

struct ClauseMasks {
    exactly_one: bool,
    /// (mask of variables, mask of literals that are true when the bit is 1)
    clauses: Vec<(u64, u64)>,
}

impl ClauseMasks {
    fn new(f: &CnfFormula) -> Self {
        let clauses = f
            .clauses()
            .iter()
            .map(|c| {
                let vars = c.iter().fold(0u64, |m, l| m | 1 << l.var);
                let positive = c.iter().filter(|l| !l.negated).fold(0u64, |m, l| m | 1 << l.var);
                (vars, positive)
            })
            .collect();
        Self { exactly_one: f.semantics() == crate::instances::Semantics::Positive1In3, clauses }
    }

    fn satisfied(&self, x: u64) -> bool {
        self.clauses.iter().all(|&(vars, positive)| {
            // bits where the literal is true
            let true_lits = (!(x ^ positive)) & vars;
            if self.exactly_one {
                true_lits.count_ones() == 1
            } else {
                true_lits != 0
            }
        })
    }
}

/// True iff the chosen subsets are pairwise disjoint and cover the
/// universe. Out-of-range indices make the selection invalid; repeated
/// indices count once.
pub fn check_exact_cover(ec: &ExactCoverInstance, chosen: &[usize]) -> bool {
    let mut covered = vec![false; ec.universe_size()];
    let mut distinct = chosen.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for &i in &distinct {
        if i >= ec.num_subsets() {
            return false;
        }
        for &e in ec.subset(i) {
            if covered[e] {
                return false;
            }
            covered[e] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

/// All exact covers, found by backtracking on the lowest uncovered element.
pub fn exact_covers(ec: &ExactCoverInstance) -> Vec<Vec<usize>> {
    let occ = ec.occurrences();
    let mut out = Vec::new();
    let mut covered = vec![false; ec.universe_size()];
    let mut chosen = Vec::new();
    cover_rec(ec, &occ, &mut covered, &mut chosen, &mut out);
    for c in &mut out {
        c.sort_unstable();
    }
    out.sort();
    out
}

/// Number of exact covers.
pub fn count_exact_covers(ec: &ExactCoverInstance) -> usize {
    exact_covers(ec).len()
}

fn cover_rec(
    ec: &ExactCoverInstance,
    occ: &[Vec<usize>],
    covered: &mut [bool],
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some(e) = covered.iter().position(|&c| !c) else {
        out.push(chosen.clone());
        return;
    };
    for &s in &occ[e] {
        if ec.subset(s).iter().any(|&x| covered[x]) {
            continue;
        }
        for &x in ec.subset(s) {
            covered[x] = true;
        }
        chosen.push(s);
        cover_rec(ec, occ, covered, chosen, out);
        chosen.pop();
        for &x in ec.subset(s) {
            covered[x] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_random_ec3, Semantics};
    use crate::reductions::{ec3_to_1in3sat, exact_cover_to_mis};
    use crate::Rational;
    use num_traits::One;

    fn small_cover() -> ExactCoverInstance {
        ExactCoverInstance::from_one_based(
            5,
            &[vec![1, 2, 4], vec![1, 2, 5], vec![1, 3, 4], vec![2, 3], vec![3], vec![4, 5], vec![5]],
        )
        .unwrap()
    }

    #[test]
    fn small_cover_mis() {
        let (g, _, _) = exact_cover_to_mis(&small_cover()).unwrap();
        let sol = brute_force_mis(&g).unwrap();
        assert_eq!(sol.max_weight, Rational::from_integer(5));
        assert!(sol.maximizers.contains(&vec![0, 4, 6]));
        assert_eq!(sol, naive_mis(&g).unwrap());
    }

    #[test]
    fn edgeless_and_complete() {
        let w: Vec<Rational> = [1, 2, 3].iter().map(|&x| Rational::from_integer(x)).collect();
        let g = WeightedGraph::new(w, []).unwrap();
        let sol = brute_force_mis(&g).unwrap();
        assert_eq!(sol.max_weight, Rational::from_integer(6));
        assert_eq!(sol.maximizers, vec![vec![0, 1, 2]]);

        let k4: WeightedGraph<Rational> =
            WeightedGraph::unit(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let sol = brute_force_mis(&k4).unwrap();
        assert_eq!(sol.max_weight, Rational::one());
        assert_eq!(sol.maximizers.len(), 4);
    }

    #[test]
    fn cap_enforced() {
        let g: WeightedGraph<Rational> = WeightedGraph::unit(31, []).unwrap();
        assert!(matches!(brute_force_mis(&g), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn small_cover_satisfying() {
        let (f, _) = ec3_to_1in3sat(&small_cover()).unwrap();
        let sols = enumerate_satisfying(&f).unwrap();
        assert!(sols.contains(&Assignment::from_ones(7, &[0, 4, 6])));
        assert_eq!(sols.len(), count_satisfying(&f).unwrap());
        assert_eq!(exact_covers(&small_cover()), vec![vec![0, 4, 6]]);
    }

    #[test]
    fn single_positive_clause_has_three_solutions() {
        let f = CnfFormula::positive_1in3(3, &[[0, 1, 2]]).unwrap();
        let sols = enumerate_satisfying(&f).unwrap();
        assert_eq!(sols.iter().map(Assignment::index).collect::<Vec<_>>(), vec![1, 2, 4]);
    }

    #[test]
    fn unsatisfiable_positive_fixture() {
        // x2 = x3 = 0 forces x4 = x5 = 1 (clauses 3, 4), breaking clause 2;
        // otherwise x4 = x5 = 0, clause 2 forces x1 and clause 1 breaks.
        let f = CnfFormula::positive_1in3(5, &[[0, 1, 2], [0, 3, 4], [1, 2, 3], [1, 2, 4], [0, 1, 3]]).unwrap();
        assert!(enumerate_satisfying(&f).unwrap().is_empty());
    }

    #[test]
    fn sat3_enumeration() {
        let f = CnfFormula::from_signed(3, &[[1, 2, 3], [-1, -2, -3]], Semantics::Sat3).unwrap();
        assert_eq!(enumerate_satisfying(&f).unwrap().len(), 6);
    }

    #[test]
    fn exact_cover_checks() {
        let ec = small_cover();
        assert!(check_exact_cover(&ec, &[0, 4, 6]));
        assert!(!check_exact_cover(&ec, &[0, 1]));
        assert!(!check_exact_cover(&ec, &[]));
        assert!(!check_exact_cover(&ec, &[9]));
        assert!(check_exact_cover(&ExactCoverInstance::new(0, vec![]).unwrap(), &[]));
    }

    #[test]
    fn cover_count_matches_formula_enumeration() {
        for seed in 0..30 {
            let ec = gen_random_ec3(5, seed).unwrap();
            let (f, _) = ec3_to_1in3sat(&ec).unwrap();
            let by_formula: Vec<Vec<usize>> = enumerate_satisfying(&f).unwrap().iter().map(|a| a.ones()).collect();
            let mut by_formula = by_formula;
            by_formula.sort();
            assert_eq!(exact_covers(&ec), by_formula, "seed {seed}");
        }
    }
}
