use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use aqolab::analysis::{compare_hamiltonians, write_comparison_csv, CompareConfig};
use aqolab::ExactCoverInstance;
use clap::Args;
use serde_json::{json, Value};

use crate::output::{config_header, read_document, suffixed, Outputs};
use crate::system::{parse_d_rule, EigenArgs, ScanArgs};

#[derive(Debug, Args)]
pub struct CompareCmd {
    /// Directory of exact_cover JSON files. `manifest.json` and sidecars are skipped.
    #[arg(long)]
    pub dir: PathBuf,
    /// D rule for ham C: `default`, `const:X` or `margin:X`.
    #[arg(long, default_value = "default")]
    pub d_rule: String,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub eigen: EigenArgs,
    /// Comparison CSV. Failed instances go to `<stem>.errors.csv`.
    #[arg(long)]
    pub out: PathBuf,
    /// Exit nonzero if any instance fails.
    #[arg(long)]
    pub strict: bool,
}

fn is_instance_file(path: &Path) -> bool {
    let Some(name) = path.file_name().and_then(|n| n.to_str()) else { return false };
    name.ends_with(".json")
        && name != "manifest.json"
        && !name.ends_with(".config.json")
        && !name.ends_with(".mapping.json")
        && !name.ends_with(".summary.json")
}

fn load(path: &Path) -> Result<ExactCoverInstance> {
    Ok(read_document(path)?.to_exact_cover()?)
}

/// Returns the number of failed instances.
pub fn compare(args: &CompareCmd, out: Outputs) -> Result<usize> {
    let stem = strip_csv(&args.out);
    let errors_path = suffixed(&stem, ".errors.csv");
    let config_path = suffixed(&stem, ".config.json");
    out.claim(&[args.out.clone(), errors_path.clone(), config_path.clone()])?;

    let d_rule = parse_d_rule(&args.d_rule)?;
    let cfg = CompareConfig { d_rule, delta: args.delta, scan: args.scan.options(args.eigen.options()) };

    let mut files: Vec<PathBuf> = fs::read_dir(&args.dir)
        .with_context(|| format!("listing {}", args.dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file() && is_instance_file(p));
    files.sort();

    let mut errors: Vec<(String, String)> = Vec::new();
    let mut batch = Vec::new();
    for path in &files {
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        match load(path) {
            Ok(ec) => batch.push((id, ec)),
            Err(e) => errors.push((id, format!("{e:#}"))),
        }
    }
    let mut rows = Vec::new();
    for (id, row) in compare_hamiltonians(&batch, &cfg) {
        match row {
            Ok(row) => rows.push(row),
            Err(e) => errors.push((id, e.to_string())),
        }
    }
    errors.sort();
    for (id, e) in &errors {
        eprintln!("{id}: {e}");
    }

    out.write_with(&args.out, |w| write_comparison_csv(&rows, w))?;
    out.write_with(&errors_path, |w| {
        writeln!(w, "id,error")?;
        for (id, e) in &errors {
            writeln!(w, "{id},\"{}\"", e.replace('"', "\"\""))?;
        }
        Ok(())
    })?;
    let mut config = config_header("compare");
    config.insert("dir".into(), json!(args.dir));
    config.insert("d_rule".into(), json!(cfg.d_rule.describe()));
    config.insert("delta".into(), json!(cfg.delta));
    config.insert("scan".into(), serde_json::to_value(cfg.scan)?);
    config.insert("instances".into(), json!(files.len()));
    config.insert("failed".into(), json!(errors.iter().map(|(id, _)| id).collect::<Vec<_>>()));
    config.insert("strict".into(), json!(args.strict));
    out.write_json(&config_path, &Value::Object(config))?;
    Ok(errors.len())
}

fn strip_csv(path: &Path) -> PathBuf {
    match path.extension() {
        Some(ext) if ext == "csv" => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}
