//! JSON documents for instances, graphs, Ising models and reduction
//! mappings. Indices in documents are 1-based; in memory they are 0-based.
//!
//! Weights are strings holding an exact rational (`"3"`, `"5/2"`); plain
//! decimals (`"2.5"`) are accepted on input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{IsingModel, CONVENTION};
use crate::instances::{CnfFormula, ExactCoverInstance, Semantics};
use crate::reductions::{ReductionKind, SolutionMapping, SourceProblem, WeightedGraph};
use crate::scalar::Weight;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Document {
    ExactCover {
        m: usize,
        subsets: Vec<Vec<usize>>,
    },
    Cnf {
        semantics: String,
        n: usize,
        clauses: Vec<[i64; 3]>,
    },
    WeightedGraph {
        n: usize,
        weights: Vec<String>,
        edges: Vec<[usize; 2]>,
    },
    Ising {
        n: usize,
        h: Vec<f64>,
        #[serde(rename = "J")]
        couplings: Vec<(usize, usize, f64)>,
        offset: f64,
        convention: String,
    },
    Mapping {
        reduction: String,
        target: usize,
        source: Box<Document>,
    },
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::ExactCover { .. } => "exact_cover",
            Document::Cnf { .. } => "cnf",
            Document::WeightedGraph { .. } => "weighted_graph",
            Document::Ising { .. } => "ising",
            Document::Mapping { .. } => "mapping",
        }
    }

    /// Parses a document; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Compact JSON followed by a newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_exact_cover(ec: &ExactCoverInstance) -> Self {
        Document::ExactCover {
            m: ec.universe_size(),
            subsets: ec.subsets().iter().map(|s| s.iter().map(|&e| e + 1).collect()).collect(),
        }
    }

    pub fn to_exact_cover(&self) -> Result<ExactCoverInstance> {
        match self {
            Document::ExactCover { m, subsets } => ExactCoverInstance::from_one_based(*m, subsets),
            other => Err(wrong_kind("exact_cover", other)),
        }
    }

    pub fn from_cnf(f: &CnfFormula) -> Self {
        Document::Cnf {
            semantics: f.semantics().name().to_string(),
            n: f.num_vars(),
            clauses: f.clauses().iter().map(|c| c.map(|l| l.to_signed())).collect(),
        }
    }

    pub fn to_cnf(&self) -> Result<CnfFormula> {
        match self {
            Document::Cnf { semantics, n, clauses } => {
                CnfFormula::from_signed(*n, clauses, parse_semantics(semantics)?)
            }
            other => Err(wrong_kind("cnf", other)),
        }
    }

    pub fn from_graph<W: Weight>(g: &WeightedGraph<W>) -> Self {
        Document::WeightedGraph {
            n: g.num_vertices(),
            weights: g.weights().iter().map(|w| w.to_string()).collect(),
            edges: g.edges().iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<WeightedGraph<Rational>> {
        match self {
            Document::WeightedGraph { n, weights, edges } => {
                if weights.len() != *n {
                    return Err(Error::LengthMismatch { expected: *n, actual: weights.len() });
                }
                let weights = weights.iter().map(|w| parse_rational(w)).collect::<Result<Vec<_>>>()?;
                let edges = edges
                    .iter()
                    .map(|&[a, b]| {
                        if a == 0 || b == 0 {
                            Err(Error::Parse(format!("vertex 0 in edge [{a}, {b}]; vertices are 1-based")))
                        } else {
                            Ok((a - 1, b - 1))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                WeightedGraph::new(weights, edges)
            }
            other => Err(wrong_kind("weighted_graph", other)),
        }
    }

    pub fn from_ising<W: Weight>(model: &IsingModel<W>) -> Self {
        Document::Ising {
            n: model.n_qubits(),
            h: model.h().iter().map(Weight::to_f64_lossy).collect(),
            couplings: model.couplings().iter().map(|(&(a, b), j)| (a + 1, b + 1, j.to_f64_lossy())).collect(),
            offset: model.offset().to_f64_lossy(),
            convention: CONVENTION.to_string(),
        }
    }

    pub fn to_ising(&self) -> Result<IsingModel<f64>> {
        match self {
            Document::Ising { n, h, couplings, offset, convention } => {
                if convention != CONVENTION {
                    return Err(Error::Parse(format!(
                        "unsupported convention {convention:?}, expected {CONVENTION:?}"
                    )));
                }
                if h.len() != *n {
                    return Err(Error::LengthMismatch { expected: *n, actual: h.len() });
                }
                let mut js = Vec::with_capacity(couplings.len());
                for &(a, b, j) in couplings {
                    if a == 0 || b == 0 {
                        return Err(Error::Parse(format!("qubit 0 in coupling [{a}, {b}]; qubits are 1-based")));
                    }
                    js.push(((a - 1, b - 1), j));
                }
                IsingModel::new(h.clone(), js, *offset)
            }
            other => Err(wrong_kind("ising", other)),
        }
    }

    pub fn from_mapping(mapping: &SolutionMapping) -> Self {
        let source = match mapping.source() {
            SourceProblem::ExactCover(ec) => Document::from_exact_cover(ec),
            SourceProblem::Formula(f) => Document::from_cnf(f),
        };
        Document::Mapping {
            reduction: mapping.kind().name().to_string(),
            target: mapping.target(),
            source: Box::new(source),
        }
    }

    /// Rebuilds the mapping by re-running the reduction on the stored
    /// source, and checks the recorded target.
    pub fn to_mapping(&self) -> Result<SolutionMapping> {
        match self {
            Document::Mapping { reduction, target, source } => {
                let kind = ReductionKind::from_name(reduction)
                    .ok_or_else(|| Error::Parse(format!("unknown reduction {reduction:?}")))?;
                let problem = match source.as_ref() {
                    d @ Document::ExactCover { .. } => SourceProblem::ExactCover(d.to_exact_cover()?),
                    d @ Document::Cnf { .. } => SourceProblem::Formula(d.to_cnf()?),
                    other => return Err(wrong_kind("exact_cover or cnf", other)),
                };
                let mapping = SolutionMapping::from_parts(kind, problem)?;
                if mapping.target() != *target {
                    return Err(Error::Parse(format!(
                        "mapping target {target} does not match source ({})",
                        mapping.target()
                    )));
                }
                Ok(mapping)
            }
            other => Err(wrong_kind("mapping", other)),
        }
    }
}

fn wrong_kind(expected: &str, found: &Document) -> Error {
    Error::Parse(format!("expected a {expected} document, found {}", found.kind()))
}

pub fn parse_semantics(name: &str) -> Result<Semantics> {
    match name {
        "sat3" => Ok(Semantics::Sat3),
        "positive_1in3" => Ok(Semantics::Positive1In3),
        other => Err(Error::Parse(format!("unknown semantics {other:?}; expected sat3 or positive_1in3"))),
    }
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"-2.75"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("invalid rational weight {text:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let whole: i64 = match int.trim_start_matches(['-', '+']) {
            "" => 0,
            digits => digits.parse().map_err(|_| bad())?,
        };
        let denom = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        let numer = whole.checked_mul(denom).and_then(|w| w.checked_add(frac.parse::<i64>().ok()?)).ok_or_else(bad)?;
        return Ok(Rational::new(if negative { -numer } else { numer }, denom));
    }
    t.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}
