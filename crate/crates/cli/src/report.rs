//! Report assembly and rendering.

use serde::Serialize;
use serde_json::{json, Value};

use crate::dispatch::Outcome;
use crate::job::Params;

pub const TOOL: &str = "exalg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub params: Option<Params>,
    pub status: &'static str,
    pub verdict: String,
    pub result: Value,
    pub certificates: Vec<Value>,
    pub error: Option<Value>,
    /// Wall-clock time, only present when explicitly requested (it breaks byte identity).
    pub timing: Option<Value>,
}

impl Report {
    pub fn success(command: &str, params: Params, outcome: Outcome) -> Self {
        Report {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            seed: params.seed,
            params: Some(params),
            status: if outcome.negative { "negative" } else { "ok" },
            verdict: outcome.verdict,
            result: outcome.result,
            certificates: outcome.certificates,
            error: None,
            timing: None,
        }
    }

    pub fn failure(command: &str, params: Option<Params>, kind: &str, message: String, path: Option<String>) -> Self {
        Report {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            seed: params.map_or(0, |p| p.seed),
            params,
            status: "error",
            verdict: format!("error: {message}"),
            result: Value::Null,
            certificates: Vec::new(),
            error: Some(json!({ "kind": kind, "message": message, "path": path })),
            timing: None,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            "ok" => 0,
            "negative" => 2,
            _ => 1,
        }
    }

    /// Pretty JSON with keys in lexicographic order and a trailing newline.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("# {} report: {}\n\n", self.tool, self.command);
        out.push_str(&format!("**Verdict:** {}\n\n", self.verdict));
        out.push_str(&format!("- status: {}\n- version: {}\n- seed: {}\n", self.status, self.version, self.seed));
        if let Some(p) = &self.params {
            out.push_str(&format!(
                "- length bound: {}\n- degree bound: {}\n- budget: {}\n- weight bound: {}\n",
                p.length_bound, p.degree_bound, p.budget, p.weight_bound
            ));
        }
        let block = |v: &Value| serde_json::to_string_pretty(v).expect("value serializes");
        if let Some(e) = &self.error {
            out.push_str(&format!("\n## Error\n\n```json\n{}\n```\n", block(e)));
        }
        out.push_str(&format!("\n## Result\n\n```json\n{}\n```\n", block(&self.result)));
        out.push_str(&format!("\n## Certificates\n\n```json\n{}\n```\n", block(&Value::Array(self.certificates.clone()))));
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Markdown => self.to_markdown(),
        }
    }
}
