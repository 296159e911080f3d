//! CSV and manifest emission. Every file is written to a temporary name
//! in the target directory and renamed into place, so readers never see
//! partial output. Floats use 17 significant digits for lossless
//! round-trips into plotting tools.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::CliError;

pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let finish = |r: std::io::Result<()>, what: &str| {
        r.map_err(|e| CliError::Usage(format!("cannot write {what}: {e}")))
    };
    let mut f = std::fs::File::create(&tmp)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", tmp.display())))?;
    finish(f.write_all(contents.as_bytes()), name)?;
    finish(f.sync_all(), name)?;
    drop(f);
    std::fs::rename(&tmp, dir.join(name))
        .map_err(|e| CliError::Usage(format!("cannot finalize {name}: {e}")))
}

/// Header plus rows, one CSV cell per string, no quoting (all output
/// cells are numeric or boolean).
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(format!("{:x}", h.finalize()))
}

/// Reproducibility record written next to every command's outputs.
pub struct Manifest {
    pub command: &'static str,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub input: PathBuf,
    pub outputs: Vec<&'static str>,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let body = serde_json::json!({
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "input_sha256": sha256_hex(&self.input)?,
            "outputs": self.outputs,
        });
        let text = serde_json::to_string_pretty(&body).expect("manifest serializes");
        write_atomic(dir, "manifest.json", &format!("{text}\n"))
    }
}
