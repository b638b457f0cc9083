mod common;

use std::collections::BTreeSet;

use aqolab::analysis::{monotone_fraction, Direction};
use aqolab::hamiltonian::{assignment_of_basis, e_psi_prime, eval_y, ham_c, mis_to_ising, ClauseStats, DRule, EdgeMap};
use aqolab::instances::{gen_random_3sat, gen_random_ec3};
use aqolab::oracle::{
    brute_force_mis, check_exact_cover, count_satisfying, enumerate_satisfying, exact_covers, naive_mis,
};
use aqolab::reductions::{ec3_to_1in3sat, exact_cover_to_mis, graphs_identical, ReducedSolution, SourceSolution};
use aqolab::spectrum::lowest_eigs;
use aqolab::{Assignment, EigenOptions, ExactGraph, ExactMisParams, IsingModel, Rational, SolverKind, System64};
use num_complex::Complex;
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = ExactGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let m = pairs.len();
        (prop::collection::vec(1i64..=12, n), prop::collection::vec(any::<bool>(), m)).prop_map(move |(w, keep)| {
            let edges: Vec<_> = pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
            ExactGraph::new(w.into_iter().map(|x| Rational::new(x, 3)).collect(), edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pruned_mis_matches_naive(g in graph_strategy(10)) {
        let fast = brute_force_mis(&g).unwrap();
        let slow = naive_mis(&g).unwrap();
        prop_assert_eq!(&fast, &slow);
        let distinct: BTreeSet<_> = fast.maximizers.iter().collect();
        prop_assert_eq!(distinct.len(), fast.maximizers.len());
        for set in &fast.maximizers {
            prop_assert!(g.is_independent(set));
            prop_assert_eq!(g.set_weight(set), fast.max_weight);
        }
    }

    #[test]
    fn mis_ising_energy_is_minus_four_y(g in graph_strategy(8), idx in any::<u64>()) {
        let p = ExactMisParams::default_for(&g);
        let model = mis_to_ising(&g, &p).unwrap();
        let n = g.num_vertices();
        let x = Assignment::from_index(idx % (1 << n), n);
        let y = eval_y(&g, &p, &x).unwrap();
        prop_assert_eq!(model.energy_assignment(&x).unwrap(), y * Rational::from_integer(-4));
    }

    #[test]
    fn three_way_oracle_agreement(m in 3usize..=6, seed in any::<u64>()) {
        let Ok(ec) = gen_random_ec3(m, seed) else { return Ok(()) };
        let (f, _) = ec3_to_1in3sat(&ec).unwrap();
        let (g, target, mapping) = exact_cover_to_mis(&ec).unwrap();
        let mis = brute_force_mis(&g).unwrap();
        let covers = exact_covers(&ec);
        let sat = enumerate_satisfying(&f).unwrap();
        let reaches = mis.max_weight == Rational::from_integer(target as i64);
        prop_assert_eq!(reaches, !covers.is_empty());
        prop_assert_eq!(sat.len(), covers.len());
        for cover in &covers {
            prop_assert!(check_exact_cover(&ec, cover));
            prop_assert!(sat.contains(&Assignment::from_ones(ec.num_subsets(), cover)));
        }
        if reaches {
            for set in &mis.maximizers {
                let d = mapping.decode(&ReducedSolution::Vertices(set.clone())).unwrap();
                let SourceSolution::Cover(c) = d.solution else { unreachable!() };
                prop_assert!(check_exact_cover(&ec, &c));
            }
        }
        prop_assert!(graphs_identical(&ec).unwrap());
    }

    #[test]
    fn clause_stats_identity(m in 3usize..=8, seed in any::<u64>()) {
        let Ok(ec) = gen_random_ec3(m, seed) else { return Ok(()) };
        let (f, _) = ec3_to_1in3sat(&ec).unwrap();
        prop_assert!(ClauseStats::from_formula(&f).satisfies_identity());
    }

    #[test]
    fn ham_c_is_mis_ising_on_overlap_graph(m in 3usize..=7, seed in any::<u64>(), extra in 1i64..=8) {
        let Ok(ec) = gen_random_ec3(m, seed) else { return Ok(()) };
        let (f, _) = ec3_to_1in3sat(&ec).unwrap();
        let stats = ClauseStats::from_formula(&f);
        let d: EdgeMap<Rational> = DRule::JMargin(Rational::new(extra, 2)).values(&stats);
        let Ok(c) = ham_c(&f, &d) else { return Ok(()) };
        let (gm, _, _) = exact_cover_to_mis(&ec).unwrap();
        let j: EdgeMap<Rational> =
            d.iter().map(|(&(a, b), v)| ((a, b), Rational::from_integer(2 * stats.i(a, b) as i64) + v)).collect();
        let mis = mis_to_ising(&gm, &ExactMisParams::new(&gm, j).unwrap()).unwrap();
        prop_assert_eq!(c, mis.shifted(Rational::from_integer(4 * m as i64)));
    }

    #[test]
    fn satisfying_count_matches_enumeration(n in 3usize..=9, m in 1usize..=12, seed in any::<u64>()) {
        let f = gen_random_3sat(n, m, seed).unwrap();
        let all = enumerate_satisfying(&f).unwrap();
        prop_assert_eq!(all.len(), count_satisfying(&f).unwrap());
        prop_assert!(all.windows(2).all(|w| w[0].index() < w[1].index()));
    }

    #[test]
    fn monotone_fraction_flip_symmetry(n in 1usize..=6, values in prop::collection::vec(-5i64..=5, 64)) {
        let table: Vec<i64> = values[..1 << n].to_vec();
        let mask = (1usize << n) - 1;
        let flipped: Vec<i64> = (0..1usize << n).map(|x| table[x ^ mask]).collect();
        for dir in [Direction::Increasing, Direction::Decreasing] {
            let a = monotone_fraction(&table, n, dir).unwrap();
            let b = monotone_fraction(&flipped, n, dir.reversed()).unwrap();
            prop_assert_eq!(a.violating_vertices, b.violating_vertices);
        }
    }

    #[test]
    fn apply_h_is_hermitian(
        h in prop::collection::vec(-3.0f64..3.0, 4),
        jv in prop::collection::vec(-2.0f64..2.0, 6),
        delta in prop::collection::vec(0.1f64..2.0, 4),
        s in 0.0f64..=1.0,
        u in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
    ) {
        let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let model = IsingModel::new(h, pairs.into_iter().zip(jv), 0.5).unwrap();
        let spec = System64::new(model, delta).unwrap();
        let u: Vec<Complex<f64>> = u.into_iter().map(|(a, b)| Complex::new(a, b)).collect();
        let v: Vec<Complex<f64>> = v.into_iter().map(|(a, b)| Complex::new(a, b)).collect();
        let inner = |a: &[Complex<f64>], b: &[Complex<f64>]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex<f64>>();
        let hv = spec.apply_h(s, &v).unwrap();
        let hu = spec.apply_h(s, &u).unwrap();
        prop_assert!((inner(&u, &hv) - inner(&v, &hu).conj()).norm() < 1e-12);
    }
}

#[test]
fn tiny_universes_cannot_be_generated() {
    // one or two elements always force a repeated or empty subset
    for m in [1, 2] {
        assert!(gen_random_ec3(m, 0).is_err(), "m={m}");
    }
}

#[test]
fn ground_configurations_do_not_depend_on_d() {
    for seed in 0..20 {
        let ec = gen_random_ec3(5, seed).unwrap();
        let (f, _) = ec3_to_1in3sat(&ec).unwrap();
        let stats = ClauseStats::from_formula(&f);
        let n = f.num_vars();
        let zero_set = |d: &EdgeMap<Rational>| -> BTreeSet<Assignment> {
            (0..1u64 << n)
                .map(|i| Assignment::from_index(i, n))
                .filter(|x| e_psi_prime(&f, d, x).unwrap() == Rational::from_integer(0))
                .collect()
        };
        let reference = zero_set(&DRule::Default.values(&stats));
        for rule in [DRule::Constant(Rational::from_integer(7)), DRule::JMargin(Rational::new(1, 3))] {
            let d = rule.values(&stats);
            if ham_c(&f, &d).is_ok() {
                assert_eq!(zero_set(&d), reference, "seed {seed}, {}", rule.describe());
            }
        }
        let oracle: BTreeSet<Assignment> = enumerate_satisfying(&f).unwrap().into_iter().collect();
        assert_eq!(reference, oracle);
    }
}

#[test]
fn dense_and_lanczos_agree_up_to_ten_qubits() {
    for (m, seed) in [(4, 1), (5, 2), (6, 3), (7, 4)] {
        let ec = gen_random_ec3(m, seed).unwrap();
        let (f, _) = ec3_to_1in3sat(&ec).unwrap();
        if f.num_vars() > 10 {
            continue;
        }
        let model: aqolab::ExactIsing = ham_c(&f, &DRule::Default.values(&ClauseStats::from_formula(&f))).unwrap();
        let spec = System64::from_model(&model, vec![1.0; f.num_vars()]).unwrap();
        let dense = EigenOptions { solver: SolverKind::Dense, ..Default::default() };
        let lanczos = EigenOptions { solver: SolverKind::Lanczos, ..Default::default() };
        for s in [0.0, 0.3, 0.6, 0.95] {
            let a = lowest_eigs(&spec, s, 3, false, &dense).unwrap();
            let b = lowest_eigs(&spec, s, 3, false, &lanczos).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() < 1e-8, "n={} s={s}: {:?} vs {:?}", f.num_vars(), a.values, b.values);
            }
        }
    }
}

#[test]
fn ground_state_at_end_is_an_oracle_optimum() {
    for seed in 0..10 {
        let ec = gen_random_ec3(4, seed).unwrap();
        let (g, _, _) = exact_cover_to_mis(&ec).unwrap();
        let model = mis_to_ising(&g, &ExactMisParams::default_for(&g)).unwrap();
        let spec = System64::from_model(&model, vec![1.0; g.num_vertices()]).unwrap();
        let e = lowest_eigs(&spec, 1.0, 1, true, &EigenOptions::default()).unwrap();
        let v = &e.vectors.unwrap()[0];
        let b = v.iter().position(|&a| a == 1.0).unwrap();
        let selected = assignment_of_basis(b, g.num_vertices()).ones();
        assert!(brute_force_mis(&g).unwrap().maximizers.contains(&selected), "seed {seed}");
    }
}
