use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use spf_core::resolution::{ExtTable, HomalgError};

pub const REPORT_SCHEMA: &str = "spf.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotAttempted,
}

/// Where a predicted table comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// a closed form evaluated inside the harness
    ClosedForm,
    /// an independent computation by the tool (a cross-check)
    Computed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub label: String,
    pub computed: ExtTable,
    pub predicted: ExtTable,
    pub source: Source,
    pub note: String,
}

impl Comparison {
    pub fn agrees(&self) -> bool {
        self.computed == self.predicted
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub schema: String,
    pub theorem: String,
    pub params: BTreeMap<String, Value>,
    pub comparisons: Vec<Comparison>,
    pub verdict: Verdict,
    /// reason for a skipped comparison or an aborted computation
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

impl TheoremReport {
    pub fn new(theorem: &str) -> Self {
        TheoremReport {
            schema: REPORT_SCHEMA.into(),
            theorem: theorem.into(),
            params: BTreeMap::new(),
            comparisons: Vec::new(),
            verdict: Verdict::NotAttempted,
            notes: Vec::new(),
            wall_ms: None,
        }
    }

    pub fn param(mut self, k: &str, v: impl Into<Value>) -> Self {
        self.params.insert(k.into(), v.into());
        self
    }

    pub fn compare(&mut self, label: impl Into<String>, computed: ExtTable, predicted: ExtTable, source: Source, note: impl Into<String>) {
        self.comparisons.push(Comparison { label: label.into(), computed, predicted, source, note: note.into() });
    }

    /// Pass iff every comparison agrees; not attempted when nothing could be compared.
    pub fn conclude(&mut self) {
        self.verdict = if self.comparisons.is_empty() {
            Verdict::NotAttempted
        } else if self.comparisons.iter().all(|c| c.agrees()) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::NotAttempted => "not attempted",
        };
        let _ = writeln!(s, "### {}: {}", self.theorem, verdict);
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "\nparameters: {}\n", params.join(", "));
        for c in &self.comparisons {
            let src = match c.source {
                Source::ClosedForm => "closed form",
                Source::Computed => "cross-check",
            };
            let _ = writeln!(s, "**{}** ({}; {}){}\n", c.label, src, c.note, if c.agrees() { "" } else { " (mismatch)" });
            let _ = writeln!(s, "| degree | aux | computed | predicted |\n|---|---|---|---|");
            let keys: std::collections::BTreeSet<(u32, i64)> = c.computed.entries.keys().chain(c.predicted.entries.keys()).cloned().collect();
            for k in keys {
                let a = c.computed.entries.get(&k).cloned().unwrap_or(0);
                let b = c.predicted.entries.get(&k).cloned().unwrap_or(0);
                let _ = writeln!(s, "| {} | {} | {} | {} |", k.0, k.1, a, b);
            }
            s.push('\n');
        }
        for n in &self.notes {
            let _ = writeln!(s, "- {n}");
        }
        if let Some(ms) = self.wall_ms {
            let _ = writeln!(s, "\nwall time: {ms} ms");
        }
        s
    }
}

/// Run a check body, turning resource-guard aborts into "not attempted".
pub fn run_check<F>(mut report: TheoremReport, body: F) -> Result<TheoremReport, HomalgError>
where
    F: FnOnce(&mut TheoremReport) -> Result<(), HomalgError>,
{
    let t = Instant::now();
    match body(&mut report) {
        Ok(()) => report.conclude(),
        Err(HomalgError::Guard { layer, dim, bound }) => {
            report.comparisons.clear();
            report.verdict = Verdict::NotAttempted;
            report.notes.push(format!("resource guard: layer {layer} needs {dim} > {bound}"));
        }
        Err(e) => return Err(e),
    }
    report.wall_ms = Some(t.elapsed().as_millis() as u64);
    Ok(report)
}

/// A table with a single grading.
pub fn table(entries: impl IntoIterator<Item = (u32, u64)>) -> ExtTable {
    let mut t = ExtTable::default();
    for (d, n) in entries {
        t.add(d, 0, n);
    }
    t
}

/// Fold the aux grading into the cohomological degree.
pub fn fold(t: &ExtTable) -> ExtTable {
    let mut out = ExtTable::default();
    for (&(d, a), &n) in &t.entries {
        let deg = d as i64 + a;
        assert!(deg >= 0, "negative total degree");
        out.add(deg as u32, 0, n);
    }
    out
}
