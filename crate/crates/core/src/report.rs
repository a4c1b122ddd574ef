//! Command reports: JSON (`blockop-report/1`) and aligned text.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::numeric::Settings;
use crate::trace::ProofTrace;

pub const SCHEMA: &str = "blockop-report/1";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// How a command ended, in exit-code terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// A computation with nothing to decide.
    Info,
    Proved,
    Unknown,
    Refuted,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Info => "info",
            Outcome::Proved => "proved",
            Outcome::Unknown => "unknown",
            Outcome::Refuted => "refuted",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandReport {
    pub command: String,
    pub outcome: Outcome,
    /// One-line verdict.
    pub verdict: String,
    /// Ordered `key: value` lines.
    pub details: Vec<(String, String)>,
    pub trace: ProofTrace,
    /// Numeric tables; `domain_blind` marks evidence that cannot see domains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<serde_json::Value>,
    /// Nested reports (used by `examples`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<CommandReport>,
}

impl CommandReport {
    pub fn new(command: impl Into<String>, outcome: Outcome, verdict: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            outcome,
            verdict: verdict.into(),
            details: Vec::new(),
            trace: ProofTrace::new(),
            numeric: None,
            children: Vec::new(),
        }
    }

    pub fn detail(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.details.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.details.push((key.into(), value.to_string()));
    }

    pub fn with_trace(mut self, trace: ProofTrace) -> Self {
        self.trace = trace;
        self
    }

    fn render(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let _ = writeln!(out, "{pad}== {} ==", self.command);
        let _ = writeln!(out, "{pad}verdict: {}  [{}]", self.verdict, self.outcome.label());
        let width = self.details.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        for (k, v) in &self.details {
            let gap = width - k.chars().count();
            let _ = writeln!(out, "{pad}  {k}:{} {v}", " ".repeat(gap));
        }
        if let Some(n) = &self.numeric {
            let _ = writeln!(out, "{pad}  numeric:");
            if let Some(obj) = n.as_object() {
                let w = obj.keys().map(|k| k.chars().count()).max().unwrap_or(0);
                for (k, v) in obj {
                    let _ = writeln!(out, "{pad}    {k}:{} {}", " ".repeat(w - k.chars().count()), fmt_json(v));
                }
            }
        }
        if !self.trace.is_empty() {
            let _ = writeln!(out, "{pad}  trace:");
            for line in self.trace.to_string().lines() {
                let _ = writeln!(out, "{pad}    {line}");
            }
        }
        for c in &self.children {
            out.push('\n');
            c.render(out, depth + 1);
        }
    }
}

fn fmt_json(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.3e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub settings: Settings,
    pub results: Vec<CommandReport>,
}

impl Report {
    pub fn new(settings: Settings, results: Vec<CommandReport>) -> Self {
        Self { schema: SCHEMA.into(), version: VERSION.into(), settings, results }
    }

    /// Worst outcome over all commands, nested ones included.
    pub fn outcome(&self) -> Outcome {
        fn worst(r: &CommandReport) -> Outcome {
            r.children.iter().map(worst).fold(r.outcome, Outcome::max)
        }
        self.results.iter().map(worst).fold(Outcome::Info, Outcome::max)
    }

    /// 0 for proved or informational, 1 if anything is refuted, 2 if anything is unknown.
    pub fn exit_code(&self) -> i32 {
        match self.outcome() {
            Outcome::Info | Outcome::Proved => 0,
            Outcome::Refuted => 1,
            Outcome::Unknown => 2,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "blockop {}  schema {}  seed {}  galerkin {}  quad-nodes {}  tol-pairing {:e}  tol-resolvent {:e}\n",
            self.version,
            self.schema,
            self.settings.seed,
            self.settings.galerkin,
            self.settings.quad_nodes,
            self.settings.tol_pairing,
            self.settings.tol_resolvent
        );
        for r in &self.results {
            out.push('\n');
            r.render(&mut out, 0);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::Rule;

    fn sample() -> Report {
        let mut t = ProofTrace::new();
        t.push(Rule::DiagonalDominance, vec!["[[LD, M0], [M0, LD]]".into()], "self-adjoint");
        let mut a =
            CommandReport::new("check-sa A", Outcome::Proved, "self-adjoint").with_trace(t).detail("block", "A");
        a.numeric = Some(serde_json::json!({"pairing_max": 1.5e-13, "domain_blind": true}));
        let b = CommandReport::new("check-sa B", Outcome::Unknown, "unknown");
        Report::new(Settings::default(), vec![a, b])
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn exit_codes() {
        let mut r = sample();
        assert_eq!(r.exit_code(), 2);
        r.results[1].outcome = Outcome::Refuted;
        assert_eq!(r.exit_code(), 1);
        r.results.truncate(1);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn text_indents_the_trace() {
        let txt = sample().to_text();
        assert!(txt.contains("verdict: self-adjoint  [proved]"));
        assert!(txt.contains("    1. [Proposition 3.2] diagonal dominance"));
    }
}
