//! Monotonicity classification of cost functions on the hypercube and the
//! clause-violation vs MIS-based Hamiltonian comparison.

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{assignment_of_basis, ham_a, ham_c, ClauseStats, DRule, IsingModel};
use crate::instances::{Assignment, ExactCoverInstance};
use crate::oracle::enumerate_satisfying;
use crate::reductions::ec3_to_1in3sat;
use crate::scalar::Weight;
use crate::spectrum::{ground_space, scan_gap, EigenOptions, ScanOptions, SpectrumScan};
use crate::Rational;

/// Largest `n` accepted by [`monotone_fraction`].
pub const MONOTONE_MAX_VARS: usize = 20;
/// Witness pairs kept per report.
pub const MAX_WITNESSES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `x ⪯ y ⇒ f(x) ≤ f(y)`.
    Increasing,
    /// `x ⪯ y ⇒ f(x) ≥ f(y)`.
    Decreasing,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }

    fn violates<T: PartialOrd>(self, lower: &T, upper: &T) -> bool {
        match self {
            Direction::Increasing => lower > upper,
            Direction::Decreasing => lower < upper,
        }
    }
}

/// Covering pair `lower ⪯ upper`, differing in one bit, that breaks the
/// requested direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness<T> {
    #[serde(serialize_with = "ser_assignment")]
    pub lower: Assignment,
    #[serde(serialize_with = "ser_assignment")]
    pub upper: Assignment,
    pub f_lower: T,
    pub f_upper: T,
}

fn ser_assignment<S: serde::Serializer>(a: &Assignment, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(a)
}

/// Violations per Hamming weight of the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LayerCount {
    pub weight: usize,
    pub violating: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneReport<T> {
    pub direction: Direction,
    pub n: usize,
    pub violating_vertices: usize,
    /// `violating_vertices / 2^n`.
    pub fraction: f64,
    /// Up to [`MAX_WITNESSES`] pairs, ordered by the index of `lower`, then
    /// by the flipped bit.
    pub witnesses: Vec<Witness<T>>,
    /// Where the violations sit. The fraction itself ignores layers.
    pub layers: Vec<LayerCount>,
}

/// Value table indexed by assignment index `Σ x_i 2^i`.
pub fn cost_table<T: Send>(n: usize, f: impl Fn(&Assignment) -> T + Sync) -> Result<Vec<T>> {
    if n > MONOTONE_MAX_VARS {
        return Err(Error::SizeCap { what: "variables", size: n, cap: MONOTONE_MAX_VARS });
    }
    Ok((0..1u64 << n).into_par_iter().map(|i| f(&Assignment::from_index(i, n))).collect())
}

/// Checks monotonicity of a value table over covering pairs `(x, x + e_i)`.
/// Any comparable pair `x ⪯ y` is joined by a chain of covering pairs, so a
/// violation on it implies one on some covering pair.
pub fn monotone_fraction<T: Weight>(table: &[T], n: usize, direction: Direction) -> Result<MonotoneReport<T>> {
    if n > MONOTONE_MAX_VARS {
        return Err(Error::SizeCap { what: "variables", size: n, cap: MONOTONE_MAX_VARS });
    }
    let size = 1usize << n;
    if table.len() != size {
        return Err(Error::LengthMismatch { expected: size, actual: table.len() });
    }
    let mut incident = vec![false; size];
    let mut witnesses = Vec::new();
    for x in 0..size {
        for bit in 0..n {
            let y = x | 1 << bit;
            if y == x || !direction.violates(&table[x], &table[y]) {
                continue;
            }
            incident[x] = true;
            incident[y] = true;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(Witness {
                    lower: Assignment::from_index(x as u64, n),
                    upper: Assignment::from_index(y as u64, n),
                    f_lower: table[x].clone(),
                    f_upper: table[y].clone(),
                });
            }
        }
    }
    let mut layers: Vec<LayerCount> = (0..=n).map(|weight| LayerCount { weight, violating: 0, total: 0 }).collect();
    for (x, &hit) in incident.iter().enumerate() {
        let layer = &mut layers[x.count_ones() as usize];
        layer.total += 1;
        layer.violating += hit as usize;
    }
    let violating_vertices = incident.iter().filter(|&&b| b).count();
    Ok(MonotoneReport {
        direction,
        n,
        violating_vertices,
        fraction: violating_vertices as f64 / size as f64,
        witnesses,
        layers,
    })
}

/// Settings shared by every row of a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub d_rule: DRule<Rational>,
    pub delta: f64,
    pub scan: ScanOptions,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            d_rule: DRule::Default,
            delta: 1.0,
            scan: ScanOptions { eigen: EigenOptions::default(), ..Default::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub id: String,
    /// Number of subsets, i.e. qubits.
    pub n: usize,
    /// Universe size, i.e. clauses.
    pub m: usize,
    pub num_solutions: usize,
    pub gmin_a: f64,
    pub s_star_a: f64,
    pub gmin_c: f64,
    pub s_star_c: f64,
    /// `gmin_c / gmin_a`.
    pub gmin_ratio: f64,
    pub degenerate_a: bool,
    pub degenerate_c: bool,
    /// Both `s = 1` ground spaces decode to exactly the oracle's solutions.
    pub decodes_agree: bool,
}

/// Scans both Hamiltonians for every instance. Rows come back in input
/// order; a failing instance yields an error in its slot and the rest of the
/// batch still runs.
pub fn compare_hamiltonians(
    batch: &[(String, ExactCoverInstance)],
    cfg: &CompareConfig,
) -> Vec<(String, Result<ComparisonRow>)> {
    batch.par_iter().map(|(id, ec)| (id.clone(), compare_one(id, ec, cfg))).collect()
}

fn compare_one(id: &str, ec: &ExactCoverInstance, cfg: &CompareConfig) -> Result<ComparisonRow> {
    let (formula, _) = ec3_to_1in3sat(ec)?;
    let solutions: BTreeSet<Assignment> = enumerate_satisfying(&formula)?.into_iter().collect();
    let stats = ClauseStats::from_formula(&formula);
    let model_a: IsingModel<Rational> = ham_a(&formula)?;
    let model_c: IsingModel<Rational> = ham_c(&formula, &cfg.d_rule.values(&stats))?;
    let run = |model: &IsingModel<Rational>| -> Result<(SpectrumScan<f64>, bool)> {
        let spec = crate::spectrum::SystemSpec::from_model(model, vec![cfg.delta; model.n_qubits()])?;
        let scan = scan_gap(&spec, &cfg.scan)?;
        let (_, ground) = ground_space(&spec);
        let decoded: BTreeSet<Assignment> =
            ground.into_iter().map(|b| assignment_of_basis(b, spec.n_qubits())).collect();
        Ok((scan, decoded == solutions))
    };
    let (scan_a, agree_a) = run(&model_a)?;
    let (scan_c, agree_c) = run(&model_c)?;
    Ok(ComparisonRow {
        id: id.to_string(),
        n: ec.num_subsets(),
        m: ec.universe_size(),
        num_solutions: solutions.len(),
        gmin_a: scan_a.gmin,
        s_star_a: scan_a.s_star,
        gmin_c: scan_c.gmin,
        s_star_c: scan_c.s_star,
        gmin_ratio: scan_c.gmin / scan_a.gmin,
        degenerate_a: scan_a.degenerate_at_end,
        degenerate_c: scan_c.degenerate_at_end,
        decodes_agree: agree_a && agree_c && !solutions.is_empty(),
    })
}

/// CSV with columns `id,n,m,num_solutions,gmin_A,s_star_A,gmin_C,s_star_C,gmin_ratio`.
pub fn write_comparison_csv<W: Write>(rows: &[ComparisonRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "id,n,m,num_solutions,gmin_A,s_star_A,gmin_C,s_star_C,gmin_ratio")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.id, r.n, r.m, r.num_solutions, r.gmin_a, r.s_star_a, r.gmin_c, r.s_star_c, r.gmin_ratio
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_sum_is_increasing() {
        let table = cost_table(4, |x| x.weight() as i64).unwrap();
        let r = monotone_fraction(&table, 4, Direction::Increasing).unwrap();
        assert_eq!(r.fraction, 0.0);
        assert!(r.witnesses.is_empty());
        let d = monotone_fraction(&table, 4, Direction::Decreasing).unwrap();
        assert_eq!(d.fraction, 1.0);
        assert_eq!(d.witnesses.len(), MAX_WITNESSES);
        assert_eq!(d.layers.iter().map(|l| l.total).sum::<usize>(), 16);
    }

    #[test]
    fn table_size_checked() {
        assert!(matches!(monotone_fraction(&[0i64; 3], 2, Direction::Increasing), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn empty_batch() {
        assert!(compare_hamiltonians(&[], &CompareConfig::default()).is_empty());
    }
}
