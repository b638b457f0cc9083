//! Cost functions and diagonal Ising problem Hamiltonians.
//!
//! Spin convention, fixed crate-wide: qubit `i` of a basis label `b` is bit
//! `i` of `b`; bit 0 is spin `s = +1` which is `x = 1` (vertex selected).
//! Hence `x_i = (1 + s_i) / 2` and the selected set of a basis state is the
//! set of its 0 bits.
//!
//! Offsets are exact, so every model reproduces a fixed multiple of its cost
//! function value, not just the cost up to a constant:
//!
//! | model            | energy at the spin image of `x` |
//! |------------------|---------------------------------|
//! | [`mis_to_ising`] | `-4 · Y(x)`                     |
//! | [`ham_a`]        | `2 · E_Ψ(x)`                    |
//! | [`ham_c`]        | `4 · E′_Ψ(x)`                   |
//!
//! The factors are those implied by the coefficient formulas
//! `h_i = Σ_j J_ij − 2 c_i`, `(h, J) = (B, I)` and `H_C = 2 H_A + D-terms`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instances::{Assignment, CnfFormula, Semantics};
use crate::reductions::{co_occurrence_edges, WeightedGraph};
use crate::scalar::{weight_to_real, Real, Weight};

/// Multiplier between [`mis_to_ising`] energies and `Y`.
pub const MIS_ENERGY_SCALE: i64 = -4;
/// Multiplier between [`ham_a`] energies and `E_Ψ`.
pub const HAM_A_ENERGY_SCALE: i64 = 2;
/// Multiplier between [`ham_c`] energies and `E′_Ψ`.
pub const HAM_C_ENERGY_SCALE: i64 = 4;

/// Name of the bit/spin convention, written into Ising documents.
pub const CONVENTION: &str = "bit0_is_spin_plus1";

pub type EdgeMap<T> = BTreeMap<(usize, usize), T>;

/// `E = offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j` over `s ∈ {−1, +1}^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T> {
    h: Vec<T>,
    couplings: EdgeMap<T>,
    offset: T,
}

impl<T: Weight> IsingModel<T> {
    /// Coupling keys are normalized to `(min, max)`; self-couplings,
    /// out-of-range qubits and a pair given twice are rejected.
    pub fn new(h: Vec<T>, couplings: impl IntoIterator<Item = ((usize, usize), T)>, offset: T) -> Result<Self> {
        let n = h.len();
        if n == 0 {
            return Err(Error::InvalidArgument("an Ising model needs at least one qubit".into()));
        }
        let mut map = EdgeMap::new();
        for ((a, b), j) in couplings {
            if a == b {
                return Err(Error::InvalidArgument(format!("self-coupling on qubit {}", a + 1)));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!("coupling ({}, {}) outside 1..={n}", a + 1, b + 1)));
            }
            if map.insert((a.min(b), a.max(b)), j).is_some() {
                return Err(Error::InvalidArgument(format!("coupling ({}, {}) given twice", a + 1, b + 1)));
            }
        }
        Ok(Self { h, couplings: map, offset })
    }

    pub fn n_qubits(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[T] {
        &self.h
    }

    pub fn couplings(&self) -> &EdgeMap<T> {
        &self.couplings
    }

    pub fn coupling(&self, a: usize, b: usize) -> Option<&T> {
        self.couplings.get(&(a.min(b), a.max(b)))
    }

    pub fn offset(&self) -> &T {
        &self.offset
    }

    /// Energy of a spin vector with entries ±1.
    pub fn energy_spins(&self, s: &[i8]) -> Result<T> {
        if s.len() != self.h.len() {
            return Err(Error::LengthMismatch { expected: self.h.len(), actual: s.len() });
        }
        Ok(self.energy_with(|i| s[i] > 0))
    }

    /// Energy at the spin image `s = 2x − 1` of an assignment.
    pub fn energy_assignment(&self, x: &Assignment) -> Result<T> {
        if x.len() != self.h.len() {
            return Err(Error::LengthMismatch { expected: self.h.len(), actual: x.len() });
        }
        Ok(self.energy_with(|i| x.get(i)))
    }

    /// Energy of computational basis state `b`.
    pub fn energy_basis(&self, b: usize) -> T {
        self.energy_with(|i| b >> i & 1 == 0)
    }

    fn energy_with(&self, up: impl Fn(usize) -> bool) -> T {
        let signed = |v: &T, plus: bool| if plus { v.clone() } else { T::zero() - v.clone() };
        let mut e = self.offset.clone();
        for (i, hi) in self.h.iter().enumerate() {
            e = e + signed(hi, up(i));
        }
        for (&(a, b), j) in &self.couplings {
            e = e + signed(j, up(a) == up(b));
        }
        e
    }

    /// Same model with every energy shifted by `delta`.
    pub fn shifted(&self, delta: T) -> Self {
        Self { offset: self.offset.clone() + delta, ..self.clone() }
    }

    /// Coefficientwise (and offset) multiple.
    pub fn scaled(&self, k: T) -> Self {
        Self {
            h: self.h.iter().map(|v| v.clone() * k.clone()).collect(),
            couplings: self.couplings.iter().map(|(&e, v)| (e, v.clone() * k.clone())).collect(),
            offset: self.offset.clone() * k,
        }
    }

    /// Coefficientwise sum; couplings absent on one side count as zero.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::LengthMismatch { expected: self.n_qubits(), actual: other.n_qubits() });
        }
        let mut couplings = self.couplings.clone();
        for (&e, v) in &other.couplings {
            let entry = couplings.entry(e).or_insert_with(T::zero);
            *entry = entry.clone() + v.clone();
        }
        Ok(Self {
            h: self.h.iter().zip(&other.h).map(|(a, b)| a.clone() + b.clone()).collect(),
            couplings,
            offset: self.offset.clone() + other.offset.clone(),
        })
    }

    /// Same model in floating point.
    pub fn to_real<F: Real>(&self) -> IsingModel<F> {
        IsingModel {
            h: self.h.iter().map(weight_to_real).collect(),
            couplings: self.couplings.iter().map(|(&e, v)| (e, weight_to_real(v))).collect(),
            offset: weight_to_real(&self.offset),
        }
    }
}

/// Basis label of the state encoding assignment `x`: bit `i` is `1 − x_i`.
pub fn basis_index(x: &Assignment) -> usize {
    (0..x.len()).filter(|&i| !x.get(i)).map(|i| 1usize << i).sum()
}

/// Inverse of [`basis_index`].
pub fn assignment_of_basis(b: usize, n: usize) -> Assignment {
    Assignment::new((0..n).map(|i| b >> i & 1 == 0).collect())
}

/// Diagonal of the problem Hamiltonian in the computational basis, using
/// the active [`crate::qubit_cap`].
pub fn diagonal_energies<T: Weight>(model: &IsingModel<T>) -> Result<Vec<T>> {
    diagonal_energies_capped(model, crate::qubit_cap())
}

pub fn diagonal_energies_capped<T: Weight>(model: &IsingModel<T>, cap: usize) -> Result<Vec<T>> {
    let n = model.n_qubits();
    if n > cap {
        return Err(Error::SizeCap { what: "qubit count", size: n, cap });
    }
    Ok((0..1usize << n).into_par_iter().with_min_len(1 << 10).map(|b| model.energy_basis(b)).collect())
}

/// Per-edge couplings `J_ij` for the MIS pseudo-boolean function.
#[derive(Debug, Clone, PartialEq)]
pub struct MisParams<W> {
    couplings: EdgeMap<W>,
}

impl<W: Weight> MisParams<W> {
    /// Validates that `couplings` covers exactly the edges of `g` and that
    /// `J_ij > min(c_i, c_j)` on every edge.
    pub fn new(g: &WeightedGraph<W>, couplings: EdgeMap<W>) -> Result<Self> {
        let params = Self { couplings };
        params.validate(g)?;
        Ok(params)
    }

    /// `J_ij = min(c_i, c_j) + 1`.
    pub fn default_for(g: &WeightedGraph<W>) -> Self {
        Self::min_plus(g, W::one())
    }

    /// `J_ij = min(c_i, c_j) + margin`; valid for any positive margin.
    pub fn min_plus(g: &WeightedGraph<W>, margin: W) -> Self {
        let couplings =
            g.edges().iter().map(|&(a, b)| ((a, b), W::min_of(g.weight(a), g.weight(b)) + margin.clone())).collect();
        Self { couplings }
    }

    pub fn couplings(&self) -> &EdgeMap<W> {
        &self.couplings
    }

    pub fn coupling(&self, a: usize, b: usize) -> &W {
        &self.couplings[&(a.min(b), a.max(b))]
    }

    pub fn validate(&self, g: &WeightedGraph<W>) -> Result<()> {
        if self.couplings.len() != g.edges().len() || g.edges().iter().any(|e| !self.couplings.contains_key(e)) {
            return Err(Error::InvalidArgument("couplings must be given on exactly the graph's edges".into()));
        }
        for (&(a, b), j) in &self.couplings {
            let bound = W::min_of(g.weight(a), g.weight(b));
            if *j <= bound {
                return Err(Error::InvalidCoupling {
                    edge: (a, b),
                    constraint: format!("J = {j} > min(c_i, c_j) = {bound}"),
                });
            }
        }
        Ok(())
    }
}

/// `Y(x) = Σ c_i x_i − Σ_{ij ∈ E} J_ij x_i x_j`.
pub fn eval_y<W: Weight>(g: &WeightedGraph<W>, p: &MisParams<W>, x: &Assignment) -> Result<W> {
    if x.len() != g.num_vertices() {
        return Err(Error::LengthMismatch { expected: g.num_vertices(), actual: x.len() });
    }
    let linear = (0..x.len()).filter(|&i| x.get(i)).fold(W::zero(), |acc, i| acc + g.weight(i).clone());
    let penalty =
        p.couplings.iter().filter(|(&(a, b), _)| x.get(a) && x.get(b)).fold(W::zero(), |acc, (_, j)| acc + j.clone());
    Ok(linear - penalty)
}

/// Ising form of `−4·Y`: `h_i = Σ_{j ∈ nbr(i)} J_ij − 2 c_i`, couplings
/// `J_ij`, offset `Σ J_ij − 2 Σ c_i`. Ground states are maximum-weight
/// independent sets.
pub fn mis_to_ising<W: Weight>(g: &WeightedGraph<W>, p: &MisParams<W>) -> Result<IsingModel<W>> {
    p.validate(g)?;
    let two = W::from_count(2);
    let mut h: Vec<W> = g.weights().iter().map(|c| W::zero() - two.clone() * c.clone()).collect();
    let mut offset = W::zero() - two.clone() * g.total_weight();
    for (&(a, b), j) in &p.couplings {
        h[a] = h[a].clone() + j.clone();
        h[b] = h[b].clone() + j.clone();
        offset = offset + j.clone();
    }
    IsingModel::new(h, p.couplings.clone(), offset)
}

/// Clause statistics of a positive 1-in-3 formula: `B_i` counts the clauses
/// containing `x_i`, `I_ij` the clauses containing both `x_i` and `x_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseStats {
    b: Vec<usize>,
    pairs: EdgeMap<usize>,
}

impl ClauseStats {
    pub fn from_formula(f: &CnfFormula) -> Self {
        let mut b = vec![0; f.num_vars()];
        let mut pairs = EdgeMap::new();
        for c in f.clauses() {
            for l in c {
                b[l.var] += 1;
            }
            for s in 0..3 {
                for t in s + 1..3 {
                    let (i, j) = (c[s].var, c[t].var);
                    *pairs.entry((i.min(j), i.max(j))).or_insert(0) += 1;
                }
            }
        }
        Self { b, pairs }
    }

    pub fn b(&self) -> &[usize] {
        &self.b
    }

    pub fn pair_counts(&self) -> &EdgeMap<usize> {
        &self.pairs
    }

    pub fn i(&self, a: usize, b: usize) -> usize {
        self.pairs.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }

    /// Edges of the co-occurrence graph `G_EC`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.keys().copied()
    }

    /// `2 B_i = Σ_{j ∈ nbr(i)} I_ij` for every variable.
    pub fn satisfies_identity(&self) -> bool {
        let mut sums = vec![0; self.b.len()];
        for (&(a, b), &c) in &self.pairs {
            sums[a] += c;
            sums[b] += c;
        }
        sums.iter().zip(&self.b).all(|(&s, &b)| s == 2 * b)
    }
}

/// How to pick the free couplings `D_ij` of [`ham_c`].
#[derive(Debug, Clone, PartialEq)]
pub enum DRule<W> {
    /// `D_ij = max(1, min(B_i, B_j) − 2 I_ij + 1)`.
    Default,
    /// The same `D` on every edge.
    Constant(W),
    /// `J_ij = min(B_i, B_j) + margin`, i.e. `D_ij = J_ij − 2 I_ij`.
    JMargin(W),
}

impl<W: Weight> DRule<W> {
    pub fn values(&self, stats: &ClauseStats) -> EdgeMap<W> {
        stats
            .pair_counts()
            .iter()
            .map(|(&(a, b), &i)| {
                let min_b = stats.b[a].min(stats.b[b]);
                let d = match self {
                    DRule::Default => {
                        let raw = min_b as i64 - 2 * i as i64 + 1;
                        W::from_i64(raw.max(1)).expect("small integer")
                    }
                    DRule::Constant(d) => d.clone(),
                    DRule::JMargin(margin) => W::from_count(min_b) + margin.clone() - W::from_count(2 * i),
                };
                ((a, b), d)
            })
            .collect()
    }

    pub fn describe(&self) -> String {
        match self {
            DRule::Default => "default: D = max(1, min(B_i,B_j) - 2 I_ij + 1)".into(),
            DRule::Constant(d) => format!("constant: D = {d}"),
            DRule::JMargin(m) => format!("j_margin: J = min(B_i,B_j) + {m}"),
        }
    }
}

/// `E_Ψ(x) = Σ_clauses (x_a + x_b + x_c − 1)²`.
pub fn e_psi(f: &CnfFormula, x: &Assignment) -> Result<usize> {
    f.require(Semantics::Positive1In3)?;
    if x.len() != f.num_vars() {
        return Err(Error::LengthMismatch { expected: f.num_vars(), actual: x.len() });
    }
    Ok((0..f.num_clauses())
        .map(|k| {
            let t = f.true_literals(k, x) as i64 - 1;
            (t * t) as usize
        })
        .sum())
}

/// `E′_Ψ(x) = E_Ψ(x) + Σ_{ij ∈ E(G_EC)} D_ij x_i x_j`.
pub fn e_psi_prime<W: Weight>(f: &CnfFormula, d: &EdgeMap<W>, x: &Assignment) -> Result<W> {
    let base = W::from_count(e_psi(f, x)?);
    Ok(d.iter().filter(|(&(a, b), _)| x.get(a) && x.get(b)).fold(base, |acc, (_, v)| acc + v.clone()))
}

/// Clause-violation Hamiltonian: `h_i = B_i`, `J_ij = I_ij` on `G_EC`,
/// offset `2m − Σ B_i + Σ I_ij`, so the energy is `2·E_Ψ`.
pub fn ham_a<W: Weight>(f: &CnfFormula) -> Result<IsingModel<W>> {
    f.require(Semantics::Positive1In3)?;
    let stats = ClauseStats::from_formula(f);
    debug_assert!(stats.satisfies_identity());
    let h: Vec<W> = stats.b.iter().map(|&b| W::from_count(b)).collect();
    let sum_b: usize = stats.b.iter().sum();
    let sum_i: usize = stats.pairs.values().sum();
    let offset = W::from_count(2 * f.num_clauses() + sum_i) - W::from_count(sum_b);
    IsingModel::new(h, stats.pairs.iter().map(|(&e, &i)| (e, W::from_count(i))), offset)
}

/// The `D`-terms of `H_C = 2 H_A + Σ_i Σ_{j ∈ nbr(i)} D_ij σ^z_i + Σ D_ij σ^z_i σ^z_j`,
/// as a model with zero offset.
pub fn d_terms<W: Weight>(n: usize, d: &EdgeMap<W>) -> Result<IsingModel<W>> {
    let mut h = vec![W::zero(); n];
    for (&(a, b), v) in d {
        h[a] = h[a].clone() + v.clone();
        h[b] = h[b].clone() + v.clone();
    }
    IsingModel::new(h, d.iter().map(|(&e, v)| (e, v.clone())), W::zero())
}

/// MIS-based Hamiltonian for a positive 1-in-3 formula with free couplings
/// `D_ij`: `J_ij = 2 I_ij + D_ij`, `h_i = Σ_{j ∈ nbr(i)} J_ij − 2 B_i`,
/// energy `4·E′_Ψ`.
///
/// Every `D_ij` must be positive and satisfy `2 I_ij + D_ij > min(B_i, B_j)`.
pub fn ham_c<W: Weight>(f: &CnfFormula, d: &EdgeMap<W>) -> Result<IsingModel<W>> {
    f.require(Semantics::Positive1In3)?;
    let stats = ClauseStats::from_formula(f);
    if d.len() != stats.pairs.len() || stats.edges().any(|e| !d.contains_key(&e)) {
        return Err(Error::InvalidArgument("D must be given on exactly the co-occurrence edges".into()));
    }
    let two = W::from_count(2);
    let mut h: Vec<W> = stats.b.iter().map(|&b| W::zero() - W::from_count(2 * b)).collect();
    let mut couplings = EdgeMap::new();
    let mut sum_j = W::zero();
    for (&(a, b), dv) in d {
        if !dv.is_positive() {
            return Err(Error::InvalidCoupling { edge: (a, b), constraint: format!("D = {dv} > 0") });
        }
        let j = two.clone() * W::from_count(stats.i(a, b)) + dv.clone();
        let min_b = W::from_count(stats.b[a].min(stats.b[b]));
        if j <= min_b {
            return Err(Error::InvalidCoupling {
                edge: (a, b),
                constraint: format!("J = 2 I + D = {j} > min(B_i, B_j) = {min_b}"),
            });
        }
        h[a] = h[a].clone() + j.clone();
        h[b] = h[b].clone() + j.clone();
        sum_j = sum_j + j.clone();
        couplings.insert((a, b), j);
    }
    let sum_b: usize = stats.b.iter().sum();
    let offset = sum_j + W::from_count(4 * f.num_clauses()) - W::from_count(2 * sum_b);
    IsingModel::new(h, couplings, offset)
}

/// Co-occurrence graph of `f` weighted by `B_i`. For an EC3-derived formula
/// this is `G_M` with `c_i = |S_i| = B_i`.
pub fn clause_weighted_graph<W: Weight>(f: &CnfFormula) -> Result<WeightedGraph<W>> {
    let stats = ClauseStats::from_formula(f);
    WeightedGraph::new(stats.b.iter().map(|&b| W::from_count(b)).collect(), co_occurrence_edges(f))
}

/// Floating-point diagonal for a spectrum computation; energies are
/// evaluated in `W` and converted entrywise.
pub fn real_diagonal<W: Weight, F: Real>(model: &IsingModel<W>) -> Result<Vec<F>> {
    Ok(diagonal_energies(model)?.iter().map(weight_to_real).collect())
}
