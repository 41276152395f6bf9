//! Run manifests: what produced an output, and with which budgets.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// SHA-256 of the canonical source document, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source_digest: Option<String>,
    /// Every parameter that influences the output.
    pub budgets: Value,
    /// Only recorded on request, so that replays stay byte-identical.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
    pub tainted: bool,
}

impl RunManifest {
    pub fn new(command: &str, source_digest: Option<String>, budgets: Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            source_digest,
            budgets,
            wall_time_ms: None,
            tainted: false,
        }
    }

    pub fn finish(&mut self, started: Option<Instant>, tainted: bool) {
        self.wall_time_ms = started.map(|t| t.elapsed().as_millis() as u64);
        self.tainted = tainted;
    }
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("outputs serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

/// `{"manifest": …, "result": …}`.
pub fn with_manifest<T: Serialize>(manifest: &RunManifest, result: &T) -> String {
    to_sorted_json(&serde_json::json!({
        "manifest": manifest,
        "result": result,
    }))
}
