use std::path::PathBuf;

use anyhow::Result;
use aqolab::evolution::{success_curve, write_curve_csv, write_trace_csv, DtRule, EvolveOptions};
use aqolab::hamiltonian::assignment_of_basis;
use aqolab::spectrum::{ground_space, scan_gap};
use clap::Args;
use serde_json::{json, Value};

use crate::output::{config_header, read_document, suffixed, Outputs};
use crate::system::{build, EigenArgs, HamArgs, ScanArgs};

#[derive(Debug, Args)]
pub struct ScanCmd {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub ham: HamArgs,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub eigen: EigenArgs,
    /// Writes `<prefix>.csv`, `<prefix>.summary.json` and `<prefix>.config.json`.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

pub fn scan(args: &ScanCmd, out: Outputs) -> Result<()> {
    let csv = suffixed(&args.out_prefix, ".csv");
    let summary_path = suffixed(&args.out_prefix, ".summary.json");
    let config_path = suffixed(&args.out_prefix, ".config.json");
    out.claim(&[csv.clone(), summary_path.clone(), config_path.clone()])?;

    let doc = read_document(&args.input)?;
    let built = build(&doc, &args.ham)?;
    let opts = args.scan.options(args.eigen.options());
    let result = scan_gap(&built.system, &opts)?;

    let (energy, ground) = ground_space(&built.system);
    let n = built.system.n_qubits();
    let states: Vec<Value> = ground
        .iter()
        .map(|&b| {
            let x = assignment_of_basis(b, n);
            json!({ "basis_index": b, "assignment": x.to_string(), "selected": x.ones().iter().map(|i| i + 1).collect::<Vec<_>>() })
        })
        .collect();
    let mut summary = result.summary_json();
    summary["ground_energy"] = json!(energy);
    summary["ground_states"] = Value::Array(states);

    let mut config = config_header("scan");
    config.insert("input".into(), json!(args.input));
    config.insert("system".into(), built.config);
    config.insert("scan".into(), serde_json::to_value(opts)?);
    config.insert("outputs".into(), json!([csv, summary_path]));

    out.write_with(&csv, |w| result.write_csv(w))?;
    out.write_json(&summary_path, &summary)?;
    out.write_json(&config_path, &Value::Object(config))
}

#[derive(Debug, Args)]
pub struct EvolveCmd {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub ham: HamArgs,
    #[command(flatten)]
    pub eigen: EigenArgs,
    /// Total sweep times, strictly increasing; comma separated or repeated.
    #[arg(long = "t", value_name = "T", required = true, value_delimiter = ',')]
    pub times: Vec<f64>,
    /// Fixed time step; default min(0.01, 0.1 / spectral scale).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Largest accepted dt times the spectral scale.
    #[arg(long, default_value_t = 1.0)]
    pub max_phase: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub norm_bound: f64,
    /// Overlap samples per run; 0 writes no trace files.
    #[arg(long, default_value_t = 100)]
    pub trace_samples: usize,
    /// Writes `<prefix>.curve.csv`, `<prefix>.trace.T<T>.csv` per time and `<prefix>.config.json`.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

pub fn evolve(args: &EvolveCmd, out: Outputs) -> Result<()> {
    let curve_path = suffixed(&args.out_prefix, ".curve.csv");
    let config_path = suffixed(&args.out_prefix, ".config.json");
    let trace_paths: Vec<PathBuf> = if args.trace_samples == 0 {
        Vec::new()
    } else {
        args.times.iter().map(|t| suffixed(&args.out_prefix, &format!(".trace.T{t}.csv"))).collect()
    };
    let mut planned = vec![curve_path.clone(), config_path.clone()];
    planned.extend(trace_paths.iter().cloned());
    out.claim(&planned)?;

    let doc = read_document(&args.input)?;
    let built = build(&doc, &args.ham)?;
    let opts = EvolveOptions {
        dt: args.dt.map_or(DtRule::Default, DtRule::Fixed),
        max_phase_per_step: args.max_phase,
        norm_bound: args.norm_bound,
        trace_samples: args.trace_samples,
        eigen: args.eigen.options(),
    };
    let results = success_curve(&built.system, &args.times, &opts)?;

    out.write_with(&curve_path, |w| write_curve_csv(&results, w))?;
    for (r, path) in results.iter().zip(&trace_paths) {
        out.write_with(path, |w| write_trace_csv(r, w))?;
    }
    let runs: Vec<Value> = results
        .iter()
        .enumerate()
        .map(|(i, r)| {
            json!({
                "T": r.total_time,
                "dt": r.dt,
                "steps": r.steps,
                "success_probability": r.success_probability,
                "norm_drift": r.norm_drift,
                "trace": trace_paths.get(i),
            })
        })
        .collect();
    let mut config = config_header("evolve");
    config.insert("input".into(), json!(args.input));
    config.insert("system".into(), built.config);
    config.insert("spectral_scale".into(), json!(built.system.spectral_scale()));
    config.insert("evolve".into(), serde_json::to_value(opts)?);
    config.insert("curve".into(), json!(curve_path));
    config.insert("runs".into(), Value::Array(runs));
    out.write_json(&config_path, &Value::Object(config))
}
