#![allow(dead_code)]

use aqolab::instances::{gen_random_ec3_with, Ec3Options};
use aqolab::{CnfFormula, ExactCoverInstance, Semantics};

/// Five elements, seven subsets; the exact cover is {S1, S5, S7}.
pub fn small_cover() -> ExactCoverInstance {
    ExactCoverInstance::from_one_based(
        5,
        &[vec![1, 2, 4], vec![1, 2, 5], vec![1, 3, 4], vec![2, 3], vec![3], vec![4, 5], vec![5]],
    )
    .unwrap()
}

/// Clauses of the positive 1-in-3 formula derived from [`small_cover`], 1-based.
pub const SMALL_COVER_CLAUSES: [[i64; 3]; 5] = [[1, 2, 3], [1, 2, 4], [3, 4, 5], [1, 3, 6], [2, 6, 7]];

/// Four clauses over five variables with a size-4 independent set.
pub fn small_sat() -> CnfFormula {
    CnfFormula::from_signed(5, &[[1, 2, -3], [2, 3, -5], [-1, 4, 5], [1, -3, -5]], Semantics::Sat3).unwrap()
}

/// Random EC3 instances with at most `max_subsets` subsets, `m` cycling
/// through `ms`.
pub fn ec3_batch(count: usize, ms: &[usize], max_subsets: usize, unique: bool, seed: u64) -> Vec<ExactCoverInstance> {
    let mut out = Vec::with_capacity(count);
    let mut s = seed;
    while out.len() < count {
        let m = ms[out.len() % ms.len()];
        let n = m + (s as usize % (m + 1)).min(max_subsets - m);
        let opts = Ec3Options { num_subsets: Some(n.max(3)), unique_solution: unique, max_retries: 5000 };
        if let Ok(ec) = gen_random_ec3_with(m, s, &opts) {
            out.push(ec);
        }
        s += 1;
    }
    out
}
