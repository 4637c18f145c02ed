//! Rendering. JSON is canonical; csv and markdown drop whatever does not fit a flat table.

use std::collections::{BTreeMap, BTreeSet};

use clap::ValueEnum;
use serde::Serialize;
use spf_core::cache::CacheStats;
use spf_theorems::{Group, HilbertTable, TheoremReport, Verdict};

use crate::{EXIT_FAIL, EXIT_GUARD, EXIT_OK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

pub struct Out {
    pub json: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// replaces the generated markdown table
    pub md: Option<String>,
    pub code: i32,
}

impl Out {
    pub fn table<T: Serialize>(value: &T, header: &[&str], rows: Vec<Vec<String>>) -> Out {
        Out {
            json: serde_json::to_string_pretty(value).expect("outputs serialize"),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
            md: None,
            code: EXIT_OK,
        }
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => format!("{}\n", self.json),
            Format::Csv => {
                let mut s = self.header.join(",") + "\n";
                for r in &self.rows {
                    s += &r.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(",");
                    s.push('\n');
                }
                s
            }
            Format::Md => match &self.md {
                Some(m) => m.clone(),
                None => {
                    let mut s = format!("| {} |\n|{}\n", self.header.join(" | "), "---|".repeat(self.header.len()));
                    for r in &self.rows {
                        s += &format!("| {} |\n", r.join(" | "));
                    }
                    s
                }
            },
        }
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

pub fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => EXIT_OK,
        Verdict::Fail => EXIT_FAIL,
        Verdict::NotAttempted => EXIT_GUARD,
    }
}

fn comparison_rows(rep: &TheoremReport) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for c in &rep.comparisons {
        let keys: BTreeSet<(u32, i64)> = c.computed.entries.keys().chain(c.predicted.entries.keys()).cloned().collect();
        for k in keys {
            let get = |t: &spf_core::resolution::ExtTable| t.entries.get(&k).copied().unwrap_or(0).to_string();
            rows.push(vec![c.label.clone(), k.0.to_string(), k.1.to_string(), get(&c.computed), get(&c.predicted)]);
        }
    }
    rows
}

pub fn report(rep: &TheoremReport) -> Out {
    let mut out = Out::table(rep, &["comparison", "degree", "aux", "computed", "predicted"], comparison_rows(rep));
    out.md = Some(rep.to_markdown());
    out.code = verdict_code(rep.verdict);
    out
}

#[derive(Serialize)]
struct HilbertJson<'a> {
    schema: &'static str,
    group: Group,
    p: u32,
    r: u32,
    l: usize,
    dmax: u32,
    /// polynomial degree d ↦ (cohomological degree ↦ dimension)
    table: &'a BTreeMap<u32, BTreeMap<u32, u64>>,
    check: &'a TheoremReport,
}

pub fn hilbert(group: Group, p: u32, r: u32, l: usize, dmax: u32, t: &HilbertTable, rep: &TheoremReport) -> Out {
    let json = HilbertJson { schema: "spf.hilbert/1", group, p, r, l, dmax, table: &t.rows, check: rep };
    let mut rows = Vec::new();
    for (d, row) in &t.rows {
        for (deg, n) in row {
            rows.push(vec![d.to_string(), deg.to_string(), n.to_string()]);
        }
    }
    let mut out = Out::table(&json, &["d", "degree", "dim"], rows);
    out.code = verdict_code(rep.verdict);
    out
}

#[derive(Serialize)]
struct CacheJson<'a> {
    schema: &'static str,
    dir: &'a str,
    #[serde(flatten)]
    stats: &'a CacheStats,
}

pub fn cache_stats(dir: &str, st: &CacheStats) -> Out {
    Out::table(&CacheJson { schema: "spf.cache/1", dir, stats: st }, &["entries", "bytes"], vec![vec![st.entries.to_string(), st.bytes.to_string()]])
}

#[derive(Serialize)]
struct ClearedJson<'a> {
    schema: &'static str,
    dir: &'a str,
    removed: usize,
}

pub fn cache_cleared(dir: &str, removed: usize) -> Out {
    Out::table(&ClearedJson { schema: "spf.cache/1", dir, removed }, &["removed"], vec![vec![removed.to_string()]])
}
