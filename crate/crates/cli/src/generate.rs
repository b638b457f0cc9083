use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Result};
use aqolab::formats::Document;
use aqolab::instances::{gen_random_3sat, gen_random_ec3_with, Ec3Options};
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::output::{config_header, Outputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceKind {
    /// Exact Cover with every element in exactly three subsets.
    Ec3,
    /// Random 3SAT.
    #[value(name = "3sat")]
    Sat3,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: InstanceKind,
    /// Elements (ec3) or clauses (3sat).
    #[arg(long)]
    pub m: usize,
    /// Subsets (ec3, drawn per attempt when omitted) or variables (3sat, required).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Instance i uses seed + i.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep only ec3 instances with exactly one exact cover.
    #[arg(long)]
    pub unique: bool,
    /// Rejected draws allowed per ec3 instance.
    #[arg(long, default_value_t = 1000)]
    pub max_retries: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Returns the number of instances that failed to generate.
pub fn run(args: &GenerateArgs, out: Outputs) -> Result<usize> {
    let prefix = match args.kind {
        InstanceKind::Ec3 => "ec3",
        InstanceKind::Sat3 => "3sat",
    };
    if args.kind == InstanceKind::Sat3 {
        if args.n.is_none() {
            bail!("--n (variable count) is required for --kind 3sat");
        }
        if args.unique {
            bail!("--unique only applies to --kind ec3");
        }
    }
    if args.out_dir.exists() && !out.force && fs::read_dir(&args.out_dir)?.next().is_some() {
        bail!("{} already exists and is not empty; pass --force to overwrite", args.out_dir.display());
    }
    let ec3 = Ec3Options { num_subsets: args.n, unique_solution: args.unique, max_retries: args.max_retries };

    let results: Vec<(usize, u64, Result<Document>)> = (0..args.count)
        .into_par_iter()
        .map(|i| {
            let seed = args.seed.wrapping_add(i as u64);
            let doc = match args.kind {
                InstanceKind::Ec3 => gen_random_ec3_with(args.m, seed, &ec3).map(|ec| Document::from_exact_cover(&ec)),
                InstanceKind::Sat3 => {
                    gen_random_3sat(args.n.unwrap_or(0), args.m, seed).map(|f| Document::from_cnf(&f))
                }
            };
            (i, seed, doc.map_err(Into::into))
        })
        .collect();

    let mut instances = Vec::new();
    let mut failures = Vec::new();
    for (i, seed, doc) in results {
        match doc {
            Ok(doc) => {
                let file = format!("{prefix}_{i:04}.json");
                out.write_str(&args.out_dir.join(&file), &doc.to_json())?;
                instances.push(json!({ "index": i, "file": file, "seed": seed }));
            }
            Err(e) => {
                eprintln!("instance {i} (seed {seed}): {e:#}");
                failures.push(json!({ "index": i, "seed": seed, "error": format!("{e:#}") }));
            }
        }
    }

    let mut manifest = config_header("generate");
    manifest.insert("kind".into(), json!(prefix));
    manifest.insert("m".into(), json!(args.m));
    manifest.insert("n".into(), json!(args.n));
    manifest.insert("count".into(), json!(args.count));
    manifest.insert("seed".into(), json!(args.seed));
    manifest.insert("unique".into(), json!(args.unique));
    manifest.insert("max_retries".into(), json!(args.max_retries));
    manifest.insert("instances".into(), Value::Array(instances));
    let failed = failures.len();
    manifest.insert("failures".into(), Value::Array(failures));
    out.write_json(&args.out_dir.join("manifest.json"), &Value::Object(manifest))?;
    Ok(failed)
}
