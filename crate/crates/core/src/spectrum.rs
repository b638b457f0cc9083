//! The interpolated Hamiltonian `H(s) = (1 − s) H_init + s H_problem` with
//! `H_init = −Σ Δ_i σ^x_i`, and its low-lying spectrum.
//!
//! `H(s)` is real symmetric in the computational basis, so eigenproblems
//! are solved in real arithmetic; [`SystemSpec::apply_h`] also accepts
//! complex amplitudes for time evolution.

use std::io::Write;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{diagonal_energies, real_diagonal, IsingModel};
use crate::linalg::{dense_lowest, lanczos_lowest, lanczos_lowest_verified, LanczosConfig};
use crate::scalar::{lit, to_f64, Real, Weight};

/// Relative threshold below which two levels count as degenerate.
pub const DEGENERACY_REL: f64 = 1e-9;
/// Width in `s` to which the minimum-gap location is refined.
pub const REFINE_TOL_S: f64 = 1e-6;

const PAR_MIN_LEN: usize = 1 << 12;

/// Interpolation schedule `s(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// `s(t) = t / T`.
    #[default]
    Linear,
}

impl Schedule {
    /// `s` at fraction `t / T` of the run.
    pub fn s_at<F: Real>(self, fraction: F) -> F {
        match self {
            Schedule::Linear => fraction,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Schedule::Linear => "linear",
        }
    }
}

/// Something `H(s)` can act on: real or complex amplitudes over `F`.
pub trait Amplitude<F>: Copy + Send + Sync + Zero + Add<Output = Self> + Mul<F, Output = Self> {}

impl<F: Real> Amplitude<F> for F {}
impl<F: Real> Amplitude<F> for Complex<F> {}

/// Problem diagonal plus transverse fields.
#[derive(Debug, Clone)]
pub struct SystemSpec<F> {
    problem: IsingModel<F>,
    diagonal: Vec<F>,
    transverse: Vec<F>,
    schedule: Schedule,
}

impl<F: Real> SystemSpec<F> {
    pub fn new(problem: IsingModel<F>, transverse: Vec<F>) -> Result<Self> {
        let diagonal = diagonal_energies(&problem)?;
        Self::from_parts(problem, diagonal, transverse)
    }

    /// Uniform field `Δ_i = delta`.
    pub fn with_uniform_field(problem: IsingModel<F>, delta: F) -> Result<Self> {
        let n = problem.n_qubits();
        Self::new(problem, vec![delta; n])
    }

    /// From a model with exact (or any) coefficients. The diagonal is
    /// evaluated in `W`, offset included, and converted afterwards.
    pub fn from_model<W: Weight>(model: &IsingModel<W>, transverse: Vec<F>) -> Result<Self> {
        let diagonal = real_diagonal::<W, F>(model)?;
        Self::from_parts(model.to_real(), diagonal, transverse)
    }

    fn from_parts(problem: IsingModel<F>, diagonal: Vec<F>, transverse: Vec<F>) -> Result<Self> {
        if transverse.len() != problem.n_qubits() {
            return Err(Error::LengthMismatch { expected: problem.n_qubits(), actual: transverse.len() });
        }
        if let Some(i) = transverse.iter().position(|d| !(*d > F::zero())) {
            return Err(Error::InvalidArgument(format!("transverse field on qubit {} must be positive", i + 1)));
        }
        Ok(Self { problem, diagonal, transverse, schedule: Schedule::Linear })
    }

    pub fn problem(&self) -> &IsingModel<F> {
        &self.problem
    }

    /// Problem energies by basis index.
    pub fn diagonal(&self) -> &[F] {
        &self.diagonal
    }

    pub fn transverse(&self) -> &[F] {
        &self.transverse
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn n_qubits(&self) -> usize {
        self.transverse.len()
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// `max |E_b| + Σ Δ_i`, an upper bound on `‖H(s)‖`.
    pub fn spectral_scale(&self) -> F {
        let max_diag = self.diagonal.iter().fold(F::zero(), |m, &e| m.max(e.abs()));
        self.transverse.iter().fold(max_diag, |acc, &d| acc + d)
    }

    /// `out = H(s) v`.
    pub fn apply_into<T: Amplitude<F>>(&self, s: F, v: &[T], out: &mut [T]) -> Result<()> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, actual: v.len() });
        }
        if out.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, actual: out.len() });
        }
        let fields: Vec<(usize, F)> =
            self.transverse.iter().enumerate().map(|(i, &d)| (1usize << i, -(F::one() - s) * d)).collect();
        out.par_iter_mut().with_min_len(PAR_MIN_LEN).enumerate().for_each(|(b, o)| {
            let mut acc = v[b] * (s * self.diagonal[b]);
            for &(mask, c) in &fields {
                acc = acc + v[b ^ mask] * c;
            }
            *o = acc;
        });
        Ok(())
    }

    /// `H(s) v`.
    pub fn apply_h<T: Amplitude<F>>(&self, s: F, v: &[T]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.dim()];
        self.apply_into(s, v, &mut out)?;
        Ok(out)
    }

    /// Dense matrix of `H(s)`.
    pub fn dense_matrix(&self, s: F) -> DMatrix<F> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b, b)] = s * self.diagonal[b];
            for (i, &d) in self.transverse.iter().enumerate() {
                m[(b, b ^ (1 << i))] = -(F::one() - s) * d;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    /// Dense up to [`EigenOptions::dense_max_qubits`], Lanczos above.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Auto => "auto",
            SolverKind::Dense => "dense",
            SolverKind::Lanczos => "lanczos",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "auto" => Some(SolverKind::Auto),
            "dense" => Some(SolverKind::Dense),
            "lanczos" => Some(SolverKind::Lanczos),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenOptions {
    pub solver: SolverKind,
    pub dense_max_qubits: usize,
    /// Residual tolerance of the iterative path, relative to the spectral
    /// scale.
    pub tol: f64,
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Run a deflated search for missed (degenerate) levels after Lanczos.
    pub verify: bool,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            solver: SolverKind::Auto,
            dense_max_qubits: 8,
            tol: 1e-10,
            max_basis: 64,
            max_restarts: 500,
            verify: true,
            seed: 0,
        }
    }
}

impl EigenOptions {
    /// The concrete path used for `n` qubits.
    pub fn resolve(&self, n: usize) -> SolverKind {
        match self.solver {
            SolverKind::Auto if n <= self.dense_max_qubits => SolverKind::Dense,
            SolverKind::Auto => SolverKind::Lanczos,
            other => other,
        }
    }
}

/// Lowest eigenvalues (ascending) and, if requested, unit eigenvectors.
#[derive(Debug, Clone)]
pub struct Eigs<F> {
    pub values: Vec<F>,
    pub vectors: Option<Vec<Vec<F>>>,
    pub solver: SolverKind,
    /// Residual norms `‖H y − λ y‖` (zero for dense and diagonal solves).
    pub residuals: Vec<F>,
}

/// The `k` smallest eigenvalues of `H(s)`.
///
/// At `s = 1` the matrix is diagonal and the sorted diagonal is returned
/// exactly, with basis vectors as eigenvectors.
pub fn lowest_eigs<F: Real>(
    spec: &SystemSpec<F>,
    s: F,
    k: usize,
    want_vectors: bool,
    opts: &EigenOptions,
) -> Result<Eigs<F>> {
    lowest_eigs_warm(spec, s, k, want_vectors, opts, None)
}

fn check_s<F: Real>(s: F) -> Result<()> {
    if s >= F::zero() && s <= F::one() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("s = {s} outside [0, 1]")))
    }
}

fn lowest_eigs_warm<F: Real>(
    spec: &SystemSpec<F>,
    s: F,
    k: usize,
    want_vectors: bool,
    opts: &EigenOptions,
    warm: Option<&[Vec<F>]>,
) -> Result<Eigs<F>> {
    check_s(s)?;
    let dim = spec.dim();
    let k = k.min(dim);
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one level".into()));
    }
    let solver = opts.resolve(spec.n_qubits());
    if s == F::one() {
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| {
            spec.diagonal[a].partial_cmp(&spec.diagonal[b]).expect("finite energies").then(a.cmp(&b))
        });
        order.truncate(k);
        let vectors = want_vectors.then(|| {
            order
                .iter()
                .map(|&b| {
                    let mut e = vec![F::zero(); dim];
                    e[b] = F::one();
                    e
                })
                .collect()
        });
        return Ok(Eigs {
            values: order.iter().map(|&b| spec.diagonal[b]).collect(),
            vectors,
            solver,
            residuals: vec![F::zero(); k],
        });
    }
    match solver {
        SolverKind::Dense | SolverKind::Auto => {
            let pairs = dense_lowest(spec.dense_matrix(s), k);
            Ok(Eigs {
                values: pairs.values,
                vectors: want_vectors.then_some(pairs.vectors),
                solver,
                residuals: pairs.residuals,
            })
        }
        SolverKind::Lanczos => {
            let scale = spec.spectral_scale();
            let eps_floor = F::default_epsilon() * lit(100.0);
            let cfg = LanczosConfig {
                max_basis: opts.max_basis,
                max_restarts: opts.max_restarts,
                tol: scale * lit::<F>(opts.tol).max(eps_floor),
                seed: opts.seed,
            };
            let start = warm.map(|vs| warm_start(vs, dim, opts.seed));
            let matvec = |x: &[F], y: &mut [F]| {
                spec.apply_into(s, x, y).expect("dimensions fixed by spec");
            };
            let pairs = if opts.verify {
                lanczos_lowest_verified(dim, k, &matvec, start, &cfg)?
            } else {
                lanczos_lowest(dim, k, &matvec, start, &[], &cfg)?
            };
            Ok(Eigs {
                values: pairs.values,
                vectors: want_vectors.then_some(pairs.vectors),
                solver,
                residuals: pairs.residuals,
            })
        }
    }
}

/// Sum of the previous eigenvectors plus a small random component, so that
/// no symmetry sector of the new operator is missed.
fn warm_start<F: Real>(previous: &[Vec<F>], dim: usize, seed: u64) -> Vec<F> {
    let mut rng = crate::rng_from_seed(seed ^ 0x5eed);
    let mut v: Vec<F> = (0..dim).map(|_| lit(1e-2 * (rng.random::<f64>() - 0.5) / (dim as f64).sqrt())).collect();
    for p in previous.iter().filter(|p| p.len() == dim) {
        for (a, &b) in v.iter_mut().zip(p) {
            *a += b;
        }
    }
    v
}

/// Ground energy of the problem Hamiltonian and every basis index within
/// the degeneracy threshold of it, ascending.
pub fn ground_space<F: Real>(spec: &SystemSpec<F>) -> (F, Vec<usize>) {
    let e0 = spec.diagonal.iter().copied().fold(F::max_value().expect("bounded float"), |m, e| m.min(e));
    let thr = spec.spectral_scale() * lit(DEGENERACY_REL);
    let states = (0..spec.dim()).filter(|&b| spec.diagonal[b] - e0 <= thr).collect();
    (e0, states)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub grid_points: usize,
    pub refine: bool,
    /// Number of levels recorded per grid point; at least 2.
    pub k: usize,
    pub eigen: EigenOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { grid_points: 101, refine: true, k: 2, eigen: EigenOptions::default() }
    }
}

/// How the minimum-gap location was refined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineMethod {
    None,
    GoldenSection,
    /// Golden section found a non-unimodal bracket and recursive grid
    /// subdivision took over.
    Subdivision,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumScan<F> {
    pub s_grid: Vec<F>,
    /// Lowest `k` eigenvalues at each grid point.
    pub levels: Vec<Vec<F>>,
    /// `E1 − E0` per grid point, clamped at zero.
    pub gaps: Vec<F>,
    pub gmin: F,
    pub s_star: F,
    pub degenerate_at_end: bool,
    pub solver: SolverKind,
    pub refine: RefineMethod,
    pub spectral_scale: F,
    pub options: ScanOptions,
}

impl<F: Real> SpectrumScan<F> {
    pub fn k(&self) -> usize {
        self.options.k
    }

    /// CSV with columns `s,E0,...,E{k-1},gap`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = String::from("s");
        for i in 0..self.k() {
            header.push_str(&format!(",E{i}"));
        }
        writeln!(w, "{header},gap")?;
        for ((s, levels), gap) in self.s_grid.iter().zip(&self.levels).zip(&self.gaps) {
            write!(w, "{}", to_f64(*s))?;
            for e in levels {
                write!(w, ",{}", to_f64(*e))?;
            }
            writeln!(w, ",{}", to_f64(*gap))?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "gmin": to_f64(self.gmin),
            "s_star": to_f64(self.s_star),
            "degenerate_at_end": self.degenerate_at_end,
            "solver": self.solver.name(),
            "refine": self.refine,
            "grid_points": self.s_grid.len(),
            "k": self.k(),
            "spectral_scale": to_f64(self.spectral_scale),
            "tolerances": {
                "eigen_rel": self.options.eigen.tol,
                "refine_s": REFINE_TOL_S,
                "degeneracy_rel": DEGENERACY_REL,
            },
            "eigen": self.options.eigen,
        })
    }
}

/// Gap scan over a uniform grid `s_j = j / (N − 1)` with optional
/// refinement of the minimum.
pub fn scan_gap<F: Real>(spec: &SystemSpec<F>, opts: &ScanOptions) -> Result<SpectrumScan<F>> {
    if opts.grid_points < 3 {
        return Err(Error::InvalidArgument(format!("grid_points = {} < 3", opts.grid_points)));
    }
    if opts.k < 2 || opts.k > spec.dim() {
        return Err(Error::InvalidArgument(format!("k = {} must lie in 2..={}", opts.k, spec.dim())));
    }
    let n = opts.grid_points;
    let s_grid: Vec<F> = (0..n).map(|j| lit::<F>(j as f64) / lit((n - 1) as f64)).collect();
    let solver = opts.eigen.resolve(spec.n_qubits());
    let levels: Vec<Vec<F>> = match solver {
        SolverKind::Lanczos => {
            // ordered pipeline: each point starts from the previous vectors
            let mut out = Vec::with_capacity(n);
            let mut warm: Option<Vec<Vec<F>>> = None;
            for &s in &s_grid {
                let e = lowest_eigs_warm(spec, s, opts.k, true, &opts.eigen, warm.as_deref())?;
                warm = e.vectors;
                out.push(e.values);
            }
            out
        }
        _ => s_grid
            .par_iter()
            .map(|&s| lowest_eigs(spec, s, opts.k, false, &opts.eigen).map(|e| e.values))
            .collect::<Result<_>>()?,
    };
    let gaps: Vec<F> = levels.iter().map(|l| (l[1] - l[0]).max(F::zero())).collect();
    let scale = spec.spectral_scale();
    let degenerate_at_end = gaps[n - 1] < scale * lit(DEGENERACY_REL);

    let j = (0..n).fold(0, |best, i| if gaps[i] < gaps[best] { i } else { best });
    let (mut gmin, mut s_star) = (gaps[j], s_grid[j]);
    let mut refine = RefineMethod::None;
    if opts.refine && gaps[j] > F::zero() {
        let gap_at = |s: F| -> Result<F> {
            let e = lowest_eigs(spec, s, 2, false, &opts.eigen)?;
            Ok((e.values[1] - e.values[0]).max(F::zero()))
        };
        let (lo, hi) = (j.saturating_sub(1), (j + 1).min(n - 1));
        let mut best = Best { s: s_star, g: gmin };
        refine = refine_minimum(&gap_at, (s_grid[lo], gaps[lo]), (s_grid[hi], gaps[hi]), &mut best)?;
        gmin = best.g;
        s_star = best.s;
    }
    Ok(SpectrumScan {
        s_grid,
        levels,
        gaps,
        gmin,
        s_star,
        degenerate_at_end,
        solver,
        refine,
        spectral_scale: scale,
        options: *opts,
    })
}

struct Best<F> {
    s: F,
    g: F,
}

impl<F: Real> Best<F> {
    fn offer(&mut self, s: F, g: F) {
        if g < self.g {
            self.s = s;
            self.g = g;
        }
    }
}

fn refine_minimum<F: Real>(
    gap_at: &dyn Fn(F) -> Result<F>,
    (mut a, mut ga): (F, F),
    (mut b, mut gb): (F, F),
    best: &mut Best<F>,
) -> Result<RefineMethod> {
    let tol: F = lit(REFINE_TOL_S);
    let inv_phi: F = lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - (b - a) * inv_phi;
    let mut d = a + (b - a) * inv_phi;
    let mut gc = gap_at(c)?;
    let mut gd = gap_at(d)?;
    best.offer(c, gc);
    best.offer(d, gd);
    while b - a > tol {
        if (gc > ga && gc > gb) || (gd > ga && gd > gb) {
            subdivide(gap_at, a, b, best)?;
            return Ok(RefineMethod::Subdivision);
        }
        if gc <= gd {
            b = d;
            gb = gd;
            d = c;
            gd = gc;
            c = b - (b - a) * inv_phi;
            gc = gap_at(c)?;
            best.offer(c, gc);
        } else {
            a = c;
            ga = gc;
            c = d;
            gc = gd;
            d = a + (b - a) * inv_phi;
            gd = gap_at(d)?;
            best.offer(d, gd);
        }
    }
    Ok(RefineMethod::GoldenSection)
}

/// Nine-point grid on `[a, b]`, recursing into the neighborhood of the
/// smallest value until the bracket is narrower than the tolerance.
fn subdivide<F: Real>(gap_at: &dyn Fn(F) -> Result<F>, mut a: F, mut b: F, best: &mut Best<F>) -> Result<()> {
    const POINTS: usize = 9;
    let tol: F = lit(REFINE_TOL_S);
    while b - a > tol {
        let step = (b - a) / lit((POINTS - 1) as f64);
        let mut arg = 0;
        let mut low = F::max_value().expect("bounded float");
        for i in 0..POINTS {
            let s = a + step * lit(i as f64);
            let g = gap_at(s)?;
            best.offer(s, g);
            if g < low {
                low = g;
                arg = i;
            }
        }
        let base = a;
        a = base + step * lit(arg.saturating_sub(1) as f64);
        b = base + step * lit((arg + 1).min(POINTS - 1) as f64);
    }
    Ok(())
}
