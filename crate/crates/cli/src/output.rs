//! Output files: overwrite guard, atomic writes, sidecar naming.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use aqolab::formats::Document;
use serde_json::{json, Value};

/// Every output goes through here so `--force` is honored uniformly.
#[derive(Debug, Clone, Copy)]
pub struct Outputs {
    pub force: bool,
}

impl Outputs {
    /// Refuses up front if any planned output already exists, so a refused
    /// run writes nothing.
    pub fn claim(&self, paths: &[PathBuf]) -> Result<()> {
        if self.force {
            return Ok(());
        }
        for p in paths {
            if p.exists() {
                bail!("{} already exists; pass --force to overwrite", p.display());
            }
        }
        Ok(())
    }

    /// Writes through a temporary file in the target directory, then renames.
    pub fn write_with(&self, path: &Path, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut tmp = tempfile::NamedTempFile::new_in(dir)
            .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
        {
            let mut w = BufWriter::new(tmp.as_file_mut());
            body(&mut w).with_context(|| format!("writing {}", path.display()))?;
            w.flush()?;
        }
        tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
        Ok(())
    }

    pub fn write_str(&self, path: &Path, text: &str) -> Result<()> {
        self.write_with(path, |w| w.write_all(text.as_bytes()))
    }

    pub fn write_json(&self, path: &Path, value: &Value) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_str(path, &text)
    }
}

/// `prefix` with `suffix` appended to its file name: `out/run` + `.csv`.
pub fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

/// `out/g.json` → `out/g`; other names are kept whole.
pub fn strip_json(path: &Path) -> PathBuf {
    match path.extension() {
        Some(ext) if ext == "json" => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

pub fn read_document(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Document::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Fields shared by every configuration sidecar.
pub fn config_header(command: &str) -> serde_json::Map<String, Value> {
    let header = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "rng": aqolab::RNG_ALGORITHM,
        "qubit_cap": aqolab::qubit_cap(),
        "jobs": rayon::current_num_threads(),
    });
    match header {
        Value::Object(map) => map,
        _ => unreachable!(),
    }
}
