//! Run configuration and NDJSON reports.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub enum Mode {
    T,
    Tstar,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct Budgets {
    pub bfs_radius: usize,
    pub oracle_depth: usize,
    pub kmax: usize,
    pub sample_count: usize,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    pub budgets: Budgets,
    pub mode: Mode,
}

/// What a command produced, before it is wrapped into a report.
pub struct Outcome {
    pub output: Value,
    /// Human-readable lines for the non-JSON output.
    pub summary: Vec<String>,
    pub inconclusive: bool,
}

pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub input: Value,
    pub output: Value,
}

impl Report {
    /// SHA-256 of the command, configuration and inputs.
    pub fn config_hash(&self) -> String {
        let v = json!({ "command": self.command, "config": self.config, "input": self.input });
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    /// The report line. Keys are sorted, so equal runs give equal bytes.
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "config": self.config,
            "configHash": self.config_hash(),
            "input": self.input,
            "output": self.output,
            "version": ptolemy::VERSION,
        })
    }
}
