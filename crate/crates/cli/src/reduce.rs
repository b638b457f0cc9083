use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use aqolab::formats::Document;
use aqolab::oracle::{brute_force_mis, check_exact_cover, enumerate_satisfying};
use aqolab::reductions::{
    ec3_to_1in3sat, exact_cover_to_mis, sat3_to_mis, Decoded, ReducedSolution, ReductionKind, SourceProblem,
    SourceSolution,
};
use aqolab::{Assignment, Semantics, SolutionMapping};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use crate::output::{config_header, read_document, strip_json, suffixed, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// Positive 1-in-3SAT.
    #[value(name = "1in3sat")]
    OneInThree,
    /// Weighted maximum independent set.
    Mis,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::OneInThree => "1in3sat",
            Target::Mis => "mis",
        }
    }
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub target: Target,
    /// Reduced instance. The mapping goes next to it as `<stem>.mapping.json`.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn reduce(args: &ReduceArgs, out: Outputs) -> Result<()> {
    let doc = read_document(&args.input)?;
    let valid: &[Target] = match &doc {
        Document::ExactCover { .. } => &[Target::OneInThree, Target::Mis],
        Document::Cnf { semantics, .. } if semantics == Semantics::Sat3.name() => &[Target::Mis],
        _ => &[],
    };
    if !valid.contains(&args.target) {
        let names: Vec<&str> = valid.iter().map(|t| t.name()).collect();
        let hint = if names.is_empty() {
            "none; reducible inputs are exact_cover and sat3 cnf".into()
        } else {
            names.join(", ")
        };
        bail!("cannot reduce {} input to {}; valid targets: {hint}", describe(&doc), args.target.name());
    }
    let (reduced, mapping) = match (&doc, args.target) {
        (Document::ExactCover { .. }, Target::OneInThree) => {
            let (f, mapping) = ec3_to_1in3sat(&doc.to_exact_cover()?)?;
            (Document::from_cnf(&f), mapping)
        }
        (Document::ExactCover { .. }, Target::Mis) => {
            let (g, _, mapping) = exact_cover_to_mis(&doc.to_exact_cover()?)?;
            (Document::from_graph(&g), mapping)
        }
        _ => {
            let (g, _, mapping) = sat3_to_mis(&doc.to_cnf()?)?;
            (Document::from_graph(&g), mapping)
        }
    };
    let stem = strip_json(&args.out);
    let mapping_path = suffixed(&stem, ".mapping.json");
    let config_path = suffixed(&stem, ".config.json");
    out.claim(&[args.out.clone(), mapping_path.clone(), config_path.clone()])?;
    out.write_str(&args.out, &reduced.to_json())?;
    out.write_str(&mapping_path, &Document::from_mapping(&mapping).to_json())?;
    let mut config = config_header("reduce");
    config.insert("input".into(), json!(args.input));
    config.insert("target".into(), json!(args.target.name()));
    config.insert("reduction".into(), json!(mapping.kind().name()));
    config.insert("reduction_target".into(), json!(mapping.target()));
    config.insert("out".into(), json!(args.out));
    config.insert("mapping".into(), json!(mapping_path));
    out.write_json(&config_path, &Value::Object(config))
}

fn describe(doc: &Document) -> String {
    match doc {
        Document::Cnf { semantics, .. } => format!("cnf ({semantics})"),
        other => other.kind().to_string(),
    }
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    /// Mapping file written by `reduce`.
    #[arg(long)]
    pub mapping: PathBuf,
    /// Independent set of the reduced graph, 1-based and comma separated.
    #[arg(long, value_delimiter = ',', required_unless_present_any = ["assignment", "oracle"], conflicts_with_all = ["assignment", "oracle"])]
    pub vertices: Option<Vec<usize>>,
    /// Assignment of the reduced formula as a bit string `x1 x2 ...`.
    #[arg(long, conflicts_with = "oracle")]
    pub assignment: Option<String>,
    /// Solve the reduced problem exhaustively and decode every optimum.
    #[arg(long)]
    pub oracle: bool,
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn decode(args: &DecodeArgs, out: Outputs) -> Result<()> {
    let mapping =
        read_document(&args.mapping)?.to_mapping().with_context(|| format!("loading {}", args.mapping.display()))?;
    let solved: Vec<ReducedSolution> = if let Some(vertices) = &args.vertices {
        if vertices.contains(&0) {
            bail!("vertices are 1-based");
        }
        vec![ReducedSolution::Vertices(vertices.iter().map(|v| v - 1).collect())]
    } else if let Some(bits) = &args.assignment {
        vec![ReducedSolution::Assignment(parse_bits(bits)?)]
    } else {
        oracle_solutions(&mapping)?
    };
    let decoded =
        solved.iter().map(|s| Ok(describe_decoded(&mapping, &mapping.decode(s)?))).collect::<Result<Vec<_>>>()?;
    let result = json!({
        "reduction": mapping.kind().name(),
        "target": mapping.target(),
        "decoded": decoded,
    });
    match &args.out {
        Some(path) => {
            out.claim(std::slice::from_ref(path))?;
            out.write_json(path, &result)
        }
        None => {
            let text = serde_json::to_string_pretty(&result)?;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn parse_bits(bits: &str) -> Result<Assignment> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => bail!("assignment must be a string of 0 and 1, got {bits:?}"),
        })
        .collect::<Result<Vec<_>>>()
        .map(Assignment::new)
}

fn oracle_solutions(mapping: &SolutionMapping) -> Result<Vec<ReducedSolution>> {
    Ok(match (mapping.kind(), mapping.source()) {
        (ReductionKind::EcTo1In3, SourceProblem::ExactCover(ec)) => {
            let (f, _) = ec3_to_1in3sat(ec)?;
            enumerate_satisfying(&f)?.into_iter().map(ReducedSolution::Assignment).collect()
        }
        (ReductionKind::EcToMis, SourceProblem::ExactCover(ec)) => {
            let (g, _, _) = exact_cover_to_mis(ec)?;
            brute_force_mis(&g)?.maximizers.into_iter().map(ReducedSolution::Vertices).collect()
        }
        (_, SourceProblem::Formula(f)) => {
            let (g, _, _) = sat3_to_mis(f)?;
            brute_force_mis(&g)?.maximizers.into_iter().map(ReducedSolution::Vertices).collect()
        }
        (kind, _) => bail!("mapping {} has a mismatched source", kind.name()),
    })
}

/// Source-side solution with a validity check against the source instance.
fn describe_decoded(mapping: &SolutionMapping, d: &Decoded) -> Value {
    match (&d.solution, mapping.source()) {
        (SourceSolution::Cover(c), SourceProblem::ExactCover(ec)) => json!({
            "cover": c.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "reaches_target": d.reaches_target,
            "exact_cover": check_exact_cover(ec, c),
        }),
        (SourceSolution::Assignment(a), SourceProblem::Formula(f)) => json!({
            "assignment": a.to_string(),
            "reaches_target": d.reaches_target,
            "satisfies": f.evaluate(a).map(|e| e.satisfied).unwrap_or(false),
        }),
        (solution, _) => json!({ "unmatched": format!("{solution:?}") }),
    }
}
