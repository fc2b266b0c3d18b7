//! Persistent side of template review: the queue file written by
//! `augment`, the template bank, and the append-only audit log.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::Path;

use addrtag_core::augment::{review_queue, AugmentResult, Correction, Rejected, ReviewOutcome, ReviewStatus};
use addrtag_core::generate::Template;
use serde::{Deserialize, Serialize};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use crate::corpus_io::read_utf8;
use crate::error::{Error, Result};

/// Model output awaiting review. `parsed` lines passed validation but still
/// need approval; `rejected` lines need a correction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReviewQueue {
    pub raw_text: String,
    pub parsed: Vec<String>,
    pub rejected: Vec<Rejected>,
    pub warnings: Vec<String>,
}

impl ReviewQueue {
    pub fn from_result(r: &AugmentResult) -> Self {
        ReviewQueue {
            raw_text: r.raw_text.clone(),
            parsed: r.parsed_templates.iter().map(ToString::to_string).collect(),
            rejected: r.rejected.clone(),
            warnings: r.warnings.clone(),
        }
    }

    /// Merge several results into one queue.
    pub fn extend(&mut self, r: &AugmentResult) {
        let q = ReviewQueue::from_result(r);
        if !self.raw_text.is_empty() && !q.raw_text.is_empty() && !self.raw_text.ends_with('\n') {
            self.raw_text.push('\n');
        }
        self.raw_text.push_str(&q.raw_text);
        self.parsed.extend(q.parsed);
        self.rejected.extend(q.rejected);
        self.warnings.extend(q.warnings);
    }

    pub fn to_result(&self) -> Result<AugmentResult> {
        // parsed lines are listed in canonical form so approvals can quote them
        let mut raw = self.raw_text.clone();
        for p in &self.parsed {
            raw.push('\n');
            raw.push_str(p);
        }
        Ok(AugmentResult {
            raw_text: raw,
            parsed_templates: self.parsed.iter().map(|p| p.parse()).collect::<addrtag_core::Result<_>>()?,
            rejected: self.rejected.clone(),
            warnings: self.warnings.clone(),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.parsed.is_empty() && self.rejected.is_empty()
    }

    pub fn load(path: &Path) -> Result<Self> {
        serde_json::from_str(&read_utf8(path)?).map_err(|e| Error::Record {
            path: path.to_path_buf(),
            line: e.line(),
            reason: format!("malformed review queue: {e}"),
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut s = serde_json::to_string_pretty(self).expect("plain queue");
        s.push('\n');
        fs::write(path, s).map_err(|e| Error::io(path, e))
    }
}

/// Read corrections: one `{"original": ..., "corrected": ...}` per line.
pub fn load_corrections(path: &Path) -> Result<Vec<Correction>> {
    read_utf8(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Record {
                path: path.to_path_buf(),
                line: i + 1,
                reason: format!("malformed correction: {e}"),
            })
        })
        .collect()
}

/// Template bank: one template per line, `#` comments allowed.
pub fn load_bank(path: &Path) -> Result<Vec<Template>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = read_utf8(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse().map_err(|e: addrtag_core::Error| Error::Record {
            path: path.to_path_buf(),
            line: i + 1,
            reason: e.to_string(),
        })?);
    }
    Ok(out)
}

fn append(path: &Path, text: &str) -> Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub timestamp: String,
    pub original: String,
    pub correction: String,
    pub status: ReviewStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
}

pub fn now_rfc3339() -> String {
    OffsetDateTime::now_utc().format(&Rfc3339).expect("UTC timestamp formats")
}

/// Apply corrections to a queue: accepted templates are appended to the
/// bank, every decision is appended to the audit log, and the queue keeps
/// whatever is still unresolved. A run with no corrections changes nothing.
pub fn apply_review(
    queue: &ReviewQueue,
    corrections: &[Correction],
    bank_path: &Path,
    audit_path: &Path,
) -> Result<(ReviewOutcome, ReviewQueue)> {
    let bank = load_bank(bank_path)?;
    let outcome = review_queue(&queue.to_result()?, corrections, &bank);

    if !outcome.accepted.is_empty() {
        let mut text = String::new();
        if fs::read(bank_path).map(|b| !b.is_empty() && !b.ends_with(b"\n")).unwrap_or(false) {
            text.push('\n');
        }
        for t in &outcome.accepted {
            text.push_str(&t.to_string());
            text.push('\n');
        }
        append(bank_path, &text)?;
    }
    if !outcome.decisions.is_empty() {
        let stamp = now_rfc3339();
        let mut text = String::new();
        for d in &outcome.decisions {
            let rec = AuditRecord {
                timestamp: stamp.clone(),
                original: d.original.clone(),
                correction: d.correction.clone(),
                status: d.status,
                reason: d.reason.clone(),
            };
            text.push_str(&serde_json::to_string(&rec).expect("plain record"));
            text.push('\n');
        }
        append(audit_path, &text)?;
    }

    let settled: Vec<&str> = outcome
        .decisions
        .iter()
        .filter(|d| matches!(d.status, ReviewStatus::Accepted | ReviewStatus::Duplicate))
        .map(|d| d.original.trim())
        .collect();
    let remaining = ReviewQueue {
        raw_text: queue.raw_text.clone(),
        parsed: queue.parsed.iter().filter(|p| !settled.contains(&p.as_str())).cloned().collect(),
        rejected: outcome.pending.clone(),
        warnings: queue.warnings.clone(),
    };
    Ok((outcome, remaining))
}
