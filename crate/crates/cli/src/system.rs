//! Turning an input document plus Hamiltonian flags into a simulated system.

use anyhow::{anyhow, bail, Context, Result};
use aqolab::formats::{parse_rational, Document};
use aqolab::hamiltonian::{ham_a, ham_c, mis_to_ising, EdgeMap};
use aqolab::reductions::{ec3_to_1in3sat, exact_cover_to_mis, sat3_to_mis};
use aqolab::spectrum::ScanOptions;
use aqolab::{
    ClauseStats, CnfFormula, DRule, EigenOptions, ExactGraph, ExactIsing, ExactMisParams, Rational, Semantics,
    SolverKind, System64,
};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HamKind {
    /// Clause-violation Hamiltonian of the 1-in-3 formula.
    A,
    /// Clause-violation Hamiltonian with the extra D couplings.
    C,
    /// MIS Hamiltonian of a weighted graph.
    Mis,
}

impl HamKind {
    fn name(self) -> &'static str {
        match self {
            HamKind::A => "a",
            HamKind::C => "c",
            HamKind::Mis => "mis",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct HamArgs {
    /// Problem Hamiltonian. Required unless the input is an Ising document.
    #[arg(long, value_enum)]
    pub ham: Option<HamKind>,
    /// D rule for `--ham c`: `default`, `const:X` or `margin:X` (J = min(B_i,B_j) + X).
    #[arg(long)]
    pub d_rule: Option<String>,
    /// Per-edge D override for `--ham c`, 1-based: `I,J=X`. Repeatable.
    #[arg(long = "set-d", value_name = "I,J=X")]
    pub set_d: Vec<String>,
    /// J = min(c_i, c_j) + X on every edge for `--ham mis`.
    #[arg(long)]
    pub j_margin: Option<String>,
    /// Per-edge J override for `--ham mis`, 1-based: `I,J=X`. Repeatable.
    #[arg(long = "set-j", value_name = "I,J=X")]
    pub set_j: Vec<String>,
    /// Transverse field strength on every qubit.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EigenArgs {
    #[arg(long, default_value = "auto", value_parser = ["auto", "dense", "lanczos"])]
    pub solver: String,
    /// Largest qubit count handled densely by `--solver auto`.
    #[arg(long, default_value_t = 8)]
    pub dense_max_qubits: usize,
    /// Lanczos residual tolerance relative to the spectral scale.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Seed of the Lanczos start vector.
    #[arg(long, default_value_t = 0)]
    pub lanczos_seed: u64,
}

impl EigenArgs {
    pub fn options(&self) -> EigenOptions {
        EigenOptions {
            solver: SolverKind::from_name(&self.solver).expect("validated by clap"),
            dense_max_qubits: self.dense_max_qubits,
            tol: self.tol,
            seed: self.lanczos_seed,
            ..EigenOptions::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Uniform grid points on [0, 1].
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Levels recorded per grid point.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Skip refinement of the minimum-gap location.
    #[arg(long)]
    pub no_refine: bool,
}

impl ScanArgs {
    pub fn options(&self, eigen: EigenOptions) -> ScanOptions {
        ScanOptions { grid_points: self.grid, refine: !self.no_refine, k: self.k, eigen }
    }
}

/// A system ready for the solvers plus a record of how it was built.
pub struct Built {
    pub system: System64,
    pub config: Value,
}

pub fn parse_d_rule(text: &str) -> Result<DRule<Rational>> {
    match text.split_once(':') {
        None if text == "default" => Ok(DRule::Default),
        Some(("const", x)) => Ok(DRule::Constant(parse_rational(x)?)),
        Some(("margin", x)) => Ok(DRule::JMargin(parse_rational(x)?)),
        _ => bail!("invalid D rule {text:?}; expected default, const:X or margin:X"),
    }
}

/// Parses `I,J=X` with 1-based vertices into a 0-based ordered edge.
fn parse_edge_value(text: &str) -> Result<((usize, usize), Rational)> {
    let bad = || anyhow!("invalid edge override {text:?}; expected I,J=X with 1-based I and J");
    let (edge, value) = text.split_once('=').ok_or_else(bad)?;
    let (a, b) = edge.split_once(',').ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 || a == b {
        return Err(bad());
    }
    Ok(((a.min(b) - 1, a.max(b) - 1), parse_rational(value)?))
}

fn apply_overrides(map: &mut EdgeMap<Rational>, overrides: &[String], what: &str) -> Result<()> {
    for text in overrides {
        let (edge, value) = parse_edge_value(text)?;
        match map.get_mut(&edge) {
            Some(slot) => *slot = value,
            None => bail!("({}, {}) is not an edge that carries a {what} coupling", edge.0 + 1, edge.1 + 1),
        }
    }
    Ok(())
}

fn edge_list(map: &EdgeMap<Rational>) -> Value {
    Value::Array(map.iter().map(|(&(a, b), v)| json!([a + 1, b + 1, v.to_string()])).collect())
}

pub fn build(doc: &Document, args: &HamArgs) -> Result<Built> {
    if !(args.delta > 0.0 && args.delta.is_finite()) {
        bail!("--delta must be positive and finite, got {}", args.delta);
    }
    let kind = doc.kind();
    let valid: &[HamKind] = match doc {
        Document::ExactCover { .. } => &[HamKind::A, HamKind::C, HamKind::Mis],
        Document::Cnf { semantics, .. } if semantics == Semantics::Sat3.name() => &[HamKind::Mis],
        Document::Cnf { .. } => &[HamKind::A, HamKind::C],
        Document::WeightedGraph { .. } => &[HamKind::Mis],
        Document::Ising { .. } => &[],
        Document::Mapping { .. } => {
            bail!("a mapping document is not a Hamiltonian input; pass the instance it came from")
        }
    };
    let names = || valid.iter().map(|h| h.name()).collect::<Vec<_>>().join(", ");
    let ham = match (args.ham, valid.is_empty()) {
        (None, true) => None,
        (Some(_), true) => bail!("ising input is used as given; drop --ham"),
        (None, false) => bail!("--ham is required for {kind} input; valid: {}", names()),
        (Some(h), false) if !valid.contains(&h) => {
            bail!("--ham {} does not apply to {kind} input; valid: {}", h.name(), names())
        }
        (Some(h), false) => Some(h),
    };
    if ham != Some(HamKind::C) && (args.d_rule.is_some() || !args.set_d.is_empty()) {
        bail!("--d-rule and --set-d only apply to --ham c");
    }
    if ham != Some(HamKind::Mis) && (args.j_margin.is_some() || !args.set_j.is_empty()) {
        bail!("--j-margin and --set-j only apply to --ham mis");
    }

    let mut config =
        json!({ "input_kind": kind, "ham": ham.map(HamKind::name).unwrap_or("ising"), "delta": args.delta });
    let model: ExactIsing = match ham {
        None => {
            let model = doc.to_ising()?;
            let system = System64::with_uniform_field(model, args.delta)?;
            return Ok(Built { system, config });
        }
        Some(HamKind::A) => ham_a(&formula_of(doc)?)?,
        Some(HamKind::C) => {
            let f = formula_of(doc)?;
            let rule = parse_d_rule(args.d_rule.as_deref().unwrap_or("default"))?;
            let mut d = rule.values(&ClauseStats::from_formula(&f));
            apply_overrides(&mut d, &args.set_d, "D")?;
            config["d_rule"] = json!(rule.describe());
            config["d"] = edge_list(&d);
            ham_c(&f, &d).context("building ham C")?
        }
        Some(HamKind::Mis) => {
            let g = graph_of(doc)?;
            let margin = parse_rational(args.j_margin.as_deref().unwrap_or("1"))?;
            let mut j = ExactMisParams::min_plus(&g, margin).couplings().clone();
            apply_overrides(&mut j, &args.set_j, "J")?;
            let params = ExactMisParams::new(&g, j)?;
            config["j_margin"] = json!(margin.to_string());
            config["j"] = edge_list(params.couplings());
            mis_to_ising(&g, &params)?
        }
    };
    let system = System64::from_model(&model, vec![args.delta; model.n_qubits()])?;
    Ok(Built { system, config })
}

fn formula_of(doc: &Document) -> Result<CnfFormula> {
    match doc {
        Document::ExactCover { .. } => Ok(ec3_to_1in3sat(&doc.to_exact_cover()?)?.0),
        _ => Ok(doc.to_cnf()?),
    }
}

fn graph_of(doc: &Document) -> Result<ExactGraph> {
    match doc {
        Document::ExactCover { .. } => Ok(exact_cover_to_mis(&doc.to_exact_cover()?)?.0),
        Document::Cnf { .. } => Ok(sat3_to_mis(&doc.to_cnf()?)?.0),
        _ => Ok(doc.to_graph()?),
    }
}
