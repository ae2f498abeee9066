//! Output directory handling and the run manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::domain::{hex, DomainSpec};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub command: String,
    pub domain: String,
    pub domain_hash: String,
    pub config: Value,
    pub tool_version: String,
    pub seed: u64,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<String>,
}

/// Collects the files written by one command. Artifacts carry the run id
/// and the manifest file name; the manifest is written last.
pub struct Run {
    out_dir: PathBuf,
    manifest: RunManifest,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl Run {
    pub fn new(out_dir: &Path, command: &str, domain_name: &str, domain: &DomainSpec, config: Value, seed: u64) -> anyhow::Result<Self> {
        Self::with_hash(out_dir, command, domain_name, domain.hash(), config, seed)
    }

    /// For commands whose input is not a domain; `domain_hash` then identifies that input.
    pub fn with_hash(
        out_dir: &Path,
        command: &str,
        domain_name: &str,
        domain_hash: String,
        config: Value,
        seed: u64,
    ) -> anyhow::Result<Self> {
        std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
        // the id depends on inputs only, so reruns produce identical artifacts
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update(domain_hash.as_bytes());
        h.update(serde_json::to_vec(&config)?);
        h.update(seed.to_le_bytes());
        h.update(TOOL_VERSION.as_bytes());
        let run_id = hex(&h.finalize()[..8]);
        Ok(Run {
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest {
                run_id,
                command: command.to_string(),
                domain: domain_name.to_string(),
                domain_hash,
                config,
                tool_version: TOOL_VERSION.to_string(),
                seed,
                started_unix: now(),
                finished_unix: 0.0,
                outputs: Vec::new(),
            },
        })
    }

    pub fn manifest_name(&self) -> String {
        format!("{}.manifest.json", self.manifest.command)
    }

    fn record(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.out_dir.join(name)
    }

    /// Writes `{"kind", "run_id", "manifest", "data"}`.
    pub fn write_json<T: Serialize>(&mut self, name: &str, kind: &str, data: &T) -> anyhow::Result<PathBuf> {
        let doc = json!({
            "kind": kind,
            "run_id": self.manifest.run_id,
            "manifest": self.manifest_name(),
            "data": data,
        });
        let path = self.record(name);
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// CSV with a leading `# run <id> <manifest>` comment line.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<PathBuf> {
        let mut buf = format!("# run {} {}\n", self.manifest.run_id, self.manifest_name()).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r)?;
            }
            w.flush()?;
        }
        let path = self.record(name);
        std::fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn write_svg(&mut self, name: &str, svg: crate::svg::Svg) -> anyhow::Result<PathBuf> {
        let comment = format!("run {} {}", self.manifest.run_id, self.manifest_name());
        let path = self.record(name);
        std::fs::write(&path, svg.finish(&comment)).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn finish(mut self) -> anyhow::Result<RunManifest> {
        self.manifest.finished_unix = now();
        let path = self.out_dir.join(self.manifest_name());
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(self.manifest)
    }
}

/// `f64` as CSV field; shortest round-trip form.
pub fn num(x: f64) -> String {
    format!("{x}")
}
