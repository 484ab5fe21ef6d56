//! Run directories and their manifests.

use std::fs;
use std::path::{Path, PathBuf};

use maglab_core::diagnostics::content_hash;
use maglab_core::field_model::FieldModelConfig;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{HarnessError, HarnessResult};
use crate::plot::Plot;

pub const MANIFEST: &str = "manifest.json";
pub const RECORDS: &str = "records.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Subcommand arguments, including seed and trial count.
    pub args: Value,
    pub config: Option<Value>,
    pub config_hash: Option<String>,
    pub seed: u64,
    pub code_version: String,
    /// Hash of everything above; identical hashes reproduce identical outputs.
    pub run_hash: String,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
}

pub fn config_hash(config: &FieldModelConfig) -> String {
    content_hash(&serde_json::to_value(config).expect("config serializes"))
}

/// An open run directory. Files are written as they are produced; the
/// manifest goes last.
pub struct Run {
    pub dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    pub fn create(
        out: &Path,
        command: &str,
        args: Value,
        config: Option<&FieldModelConfig>,
        seed: u64,
    ) -> HarnessResult<Self> {
        let config_value = config.map(|c| serde_json::to_value(c).expect("config serializes"));
        let code_version = env!("CARGO_PKG_VERSION").to_string();
        let run_hash = content_hash(&json!({
            "command": command,
            "args": args,
            "config": config_value,
            "seed": seed,
            "code_version": code_version,
        }));
        let now = chrono::Utc::now();
        let stamp = now.format("%Y%m%dT%H%M%S%.3fZ");
        let dir = out.join(format!("{}-{}-{stamp}", command, &run_hash[..12]));
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            manifest: RunManifest {
                command: command.to_string(),
                args,
                config_hash: config.map(config_hash),
                config: config_value,
                seed,
                code_version,
                run_hash,
                started: now.to_rfc3339(),
                finished: String::new(),
                outputs: Vec::new(),
            },
        })
    }

    pub fn hash(&self) -> &str {
        &self.manifest.run_hash
    }

    pub fn config_hash(&self) -> &str {
        self.manifest.config_hash.as_deref().unwrap_or("")
    }

    fn track(&mut self, name: &str) -> PathBuf {
        self.manifest.outputs.push(name.to_string());
        self.dir.join(name)
    }

    /// CSV table whose first line names the run.
    pub fn write_csv<S: AsRef<str>>(&mut self, name: &str, header: &[&str], rows: &[Vec<S>]) -> HarnessResult<()> {
        let mut buf = format!("# run {}\n", self.manifest.run_hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header)?;
            for r in rows {
                w.write_record(r.iter().map(|s| s.as_ref()))?;
            }
            w.flush()?;
        }
        fs::write(self.track(name), buf)?;
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> HarnessResult<()> {
        let doc = json!({ "run": self.manifest.run_hash, "data": value });
        let text = serde_json::to_string_pretty(&doc)?;
        fs::write(self.track(name), text + "\n")?;
        Ok(())
    }

    /// Free-form text; `comment` prefixes the run line (e.g. `%` for Matrix Market).
    pub fn write_text(&mut self, name: &str, comment: &str, body: &[u8]) -> HarnessResult<()> {
        let mut buf = format!("{comment} run {}\n", self.manifest.run_hash).into_bytes();
        buf.extend_from_slice(body);
        fs::write(self.track(name), buf)?;
        Ok(())
    }

    /// A document that already embeds [`Run::hash`] itself.
    pub fn write_document(&mut self, name: &str, text: &str) -> HarnessResult<()> {
        debug_assert!(text.contains(&self.manifest.run_hash));
        fs::write(self.track(name), text)?;
        Ok(())
    }

    pub fn write_svg(&mut self, name: &str, plot: &Plot) -> HarnessResult<()> {
        let text = plot.render(&self.manifest.run_hash);
        fs::write(self.track(name), text)?;
        Ok(())
    }

    pub fn finish(mut self) -> HarnessResult<PathBuf> {
        self.manifest.finished = chrono::Utc::now().to_rfc3339();
        let text = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(self.dir.join(MANIFEST), text + "\n")?;
        Ok(self.dir)
    }
}

pub fn read_manifest(dir: &Path) -> HarnessResult<RunManifest> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path)
        .map_err(|e| HarnessError::User(format!("{}: missing manifest ({e})", dir.display())))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::User(format!("{}: {e}", path.display())))
}
