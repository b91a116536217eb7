//! Artifact writers. Every file a command emits carries a
//! reproducibility header — the subcommand, the effective seed, the
//! thread request, and the full parsed config — so any output can be
//! traced back to the run that produced it and replayed. Numbers are
//! written in shortest round-trip form, which makes repeat runs
//! byte-identical.

use crate::errors::CliError;
use serde_json::{json, Value};
use std::path::Path;

/// The provenance block embedded in every artifact.
#[derive(Debug, Clone)]
pub struct Repro {
    pub command: &'static str,
    pub seed: u64,
    /// Thread count requested on the command line; absent means the
    /// runtime default. Results never depend on it.
    pub threads_requested: Option<usize>,
    pub config: Value,
}

impl Repro {
    pub fn value(&self) -> Value {
        json!({
            "command": self.command,
            "seed": self.seed,
            "threads_requested": self.threads_requested,
            "config": self.config,
        })
    }

    /// Comment lines prepended to CSV artifacts.
    pub fn csv_preamble(&self) -> String {
        let threads = match self.threads_requested {
            Some(n) => n.to_string(),
            None => "default".into(),
        };
        format!(
            "# command: {}\n# seed: {}\n# threads: {}\n# config: {}\n",
            self.command, self.seed, threads, self.config
        )
    }
}

pub fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

/// Writes a JSON artifact with the reproducibility block attached
/// under the `reproducibility` key.
pub fn write_json(path: &Path, mut body: Value, repro: &Repro) -> Result<(), CliError> {
    if let Value::Object(map) = &mut body {
        map.insert("reproducibility".into(), repro.value());
    }
    let text = serde_json::to_string_pretty(&body)
        .map_err(|e| CliError::Io(format!("serializing {}: {e}", path.display())))?;
    write_text(path, &(text + "\n"))
}
