//! Report data model and emission (JSON, CSV).

use std::collections::BTreeMap;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    /// fail dominates, then inconclusive.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    /// Human-readable tag: the point, or a potential/check label.
    pub label: String,
    /// Point coordinates as [re, im] pairs (empty for summary records).
    pub point: Vec<[f64; 2]>,
    pub values: BTreeMap<String, f64>,
    pub verdict: Verdict,
}

impl PointRecord {
    pub fn at(point: &[jetcurv_core::Complex64]) -> Self {
        PointRecord {
            label: format!(
                "({})",
                point
                    .iter()
                    .map(|c| format!("{:+.4}{:+.4}i", c.re, c.im))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            point: point.iter().map(|c| [c.re, c.im]).collect(),
            values: BTreeMap::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn labeled(label: &str) -> Self {
        PointRecord {
            label: label.to_string(),
            point: Vec::new(),
            values: BTreeMap::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn set(&mut self, key: &str, value: f64) {
        self.values.insert(key.to_string(), value);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub max_residual: f64,
    pub verdict: Verdict,
    pub runtime_s: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub config_hash: String,
    pub seed: u64,
    pub records: Vec<PointRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Report {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config: config.clone(),
            config_hash: config_hash(config),
            seed: config.seed,
            records: Vec::new(),
            summary: Summary {
                max_residual: 0.0,
                verdict: Verdict::Pass,
                runtime_s: 0.0,
                points: 0,
            },
        }
    }

    /// Fold record verdicts and residual maxima into the summary.
    pub fn finalize(&mut self, residual_key_hint: &str, runtime_s: f64) {
        let mut verdict = Verdict::Pass;
        let mut max_res = 0.0f64;
        for r in &self.records {
            verdict = verdict.combine(r.verdict);
            for (k, v) in &r.values {
                if k.contains(residual_key_hint) {
                    max_res = max_res.max(*v);
                }
            }
        }
        self.summary = Summary {
            max_residual: max_res,
            verdict,
            runtime_s,
            points: self.records.len(),
        };
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }

    /// Flat CSV: label, point coordinates, then the union of value keys in
    /// sorted order, then the verdict.
    pub fn to_csv(&self) -> String {
        let mut keys: Vec<String> = Vec::new();
        for r in &self.records {
            for k in r.values.keys() {
                if !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
        keys.sort();
        let ncoords = self
            .records
            .iter()
            .map(|r| r.point.len())
            .max()
            .unwrap_or(0);
        let mut header: Vec<String> = vec!["label".into()];
        for i in 0..ncoords {
            header.push(format!("re_z{}", i + 1));
            header.push(format!("im_z{}", i + 1));
        }
        header.extend(keys.iter().cloned());
        header.push("verdict".into());
        let mut out = header.join(",") + "\n";
        for r in &self.records {
            let mut row: Vec<String> = vec![format!("\"{}\"", r.label)];
            for i in 0..ncoords {
                if i < r.point.len() {
                    row.push(format!("{}", r.point[i][0]));
                    row.push(format!("{}", r.point[i][1]));
                } else {
                    row.push(String::new());
                    row.push(String::new());
                }
            }
            for k in &keys {
                row.push(
                    r.values
                        .get(k)
                        .map(|v| format!("{v}"))
                        .unwrap_or_default(),
                );
            }
            row.push(format!("{:?}", r.verdict).to_lowercase());
            out.push_str(&(row.join(",") + "\n"));
        }
        out
    }
}

/// Stable 64-bit FNV-1a over the canonical JSON encoding of the config,
/// ignoring the output destination (it does not affect what is computed).
pub fn config_hash(config: &RunConfig) -> String {
    let mut semantic = config.clone();
    semantic.out = None;
    let text = serde_json::to_string(&semantic).unwrap_or_default();
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}
