//! Validation and review of externally generated placeholder templates.
//!
//! A chat-completion model is asked for template lines in the grammar of
//! [`crate::generate::Template`]. Its output is error-prone, so every line
//! is parsed, smoke-rendered against a tiny gazetteer and BIO-checked before
//! it may enter a template bank; failures are queued for manual correction.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::gazetteer::smoke_gazetteer;
use crate::generate::{NoiseLexicon, Renderer, Slot, Template};

/// Upper bound on templates requested per call.
pub const MAX_TEMPLATES_PER_REQUEST: usize = 100;

pub const SYSTEM_PROMPT: &str = "You write Slovak sentences in which a caller states a postal address, \
as they would say it on the phone. Replace every street name with the word streetname, every \
municipality name with municipalityname, every house number with housenumber and every postal \
code with postcode. Output one sentence per line and nothing else: no numbering, no tags, no \
explanations.";

pub fn user_prompt(pattern_description: &str, num_templates: usize) -> String {
    format!(
        "Write {num_templates} different sentences following this order of address parts: \
{pattern_description}. Vary the surrounding words. Keep the placeholder words exactly as given."
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejected {
    pub line: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentResult {
    pub raw_text: String,
    pub parsed_templates: Vec<Template>,
    pub rejected: Vec<Rejected>,
    pub warnings: Vec<String>,
}

fn strip_list_marker(line: &str) -> &str {
    let line = line.trim();
    for bullet in ["- ", "* ", "• "] {
        if let Some(rest) = line.strip_prefix(bullet) {
            return rest.trim_start();
        }
    }
    let digits = line.bytes().take_while(u8::is_ascii_digit).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(r) = rest.strip_prefix(". ").or_else(|| rest.strip_prefix(") ")) {
            return r.trim_start();
        }
    }
    line
}

/// Undo the decorations models like to put on placeholders:
/// `{streetname}`, `<postcode>`, `municipalityname,`.
fn normalize_item(item: &str) -> String {
    let trimmed = item.trim_end_matches([',', '.', ';', ':', '!', '?']);
    let unwrapped = trimmed
        .strip_prefix(['{', '<', '['])
        .and_then(|s| s.strip_suffix(['}', '>', ']']))
        .unwrap_or(trimmed);
    if Slot::ALL.iter().any(|s| s.as_str() == unwrapped) {
        unwrapped.to_string()
    } else {
        item.to_string()
    }
}

fn normalize_line(line: &str) -> String {
    let body = strip_list_marker(line).trim_matches(|c| c == '"' || c == '\'' || c == '„' || c == '“');
    body.split_whitespace().map(normalize_item).collect::<Vec<_>>().join(" ")
}

/// Check one candidate line: grammar, at least one address placeholder,
/// and a BIO-valid smoke render.
pub fn validate_template(line: &str) -> Result<Template, String> {
    let normalized = normalize_line(line);
    let template: Template = normalized.parse().map_err(|e: Error| match e {
        Error::Template(msg) => msg,
        other => other.to_string(),
    })?;
    if !template.placeholders().any(|s| s.entity_type().is_some()) {
        return Err("no address placeholder".into());
    }
    let g = smoke_gazetteer();
    let noise = NoiseLexicon::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for verbal in [false, true] {
        Renderer::new(&g, &noise)
            .verbal(verbal)
            .render(&template, &mut rng)
            .map_err(|e| format!("smoke render failed: {e}"))?;
    }
    Ok(template)
}

/// Split a model response into accepted templates and rejected lines.
pub fn parse_response(raw_text: &str) -> AugmentResult {
    let mut result = AugmentResult { raw_text: raw_text.to_string(), ..Default::default() };
    for line in raw_text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        match validate_template(line) {
            Ok(t) => result.parsed_templates.push(t),
            Err(reason) => result.rejected.push(Rejected { line: line.trim().to_string(), reason }),
        }
    }
    if result.parsed_templates.is_empty() && result.rejected.is_empty() {
        result.warnings.push("response contained no template lines".into());
    }
    result
}

/// A reviewer's edit: `original` names a line from the result (parsed or
/// rejected, as it appears in the response), `corrected` is the replacement.
/// Approving a line unchanged means `corrected == original`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub original: String,
    pub corrected: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewStatus {
    Accepted,
    Duplicate,
    StillInvalid,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewDecision {
    pub original: String,
    pub correction: String,
    pub status: ReviewStatus,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReviewOutcome {
    /// Templates to append to the bank, in correction order.
    pub accepted: Vec<Template>,
    /// Rejected lines still awaiting a valid correction.
    pub pending: Vec<Rejected>,
    pub decisions: Vec<ReviewDecision>,
}

/// Apply corrections. Only corrected or explicitly approved lines can be
/// accepted; duplicates of `bank` (or of earlier acceptances) are dropped.
pub fn review_queue(result: &AugmentResult, corrections: &[Correction], bank: &[Template]) -> ReviewOutcome {
    let mut seen: Vec<String> = bank.iter().map(ToString::to_string).collect();
    let mut outcome = ReviewOutcome::default();
    let mut resolved: Vec<&str> = Vec::new();
    let known = |line: &str| {
        result.rejected.iter().any(|r| r.line == line)
            || result.raw_text.lines().any(|l| l.trim() == line)
    };

    for c in corrections {
        let mut decision = ReviewDecision {
            original: c.original.clone(),
            correction: c.corrected.clone(),
            status: ReviewStatus::Unknown,
            reason: None,
        };
        if !known(c.original.trim()) {
            decision.reason = Some("line not present in the result".into());
            outcome.decisions.push(decision);
            continue;
        }
        match validate_template(&c.corrected) {
            Ok(t) => {
                let canonical = t.to_string();
                resolved.push(c.original.trim());
                if seen.contains(&canonical) {
                    decision.status = ReviewStatus::Duplicate;
                } else {
                    seen.push(canonical);
                    outcome.accepted.push(t);
                    decision.status = ReviewStatus::Accepted;
                }
            }
            Err(reason) => {
                decision.status = ReviewStatus::StillInvalid;
                decision.reason = Some(reason);
            }
        }
        outcome.decisions.push(decision);
    }
    outcome.pending = result
        .rejected
        .iter()
        .filter(|r| !resolved.contains(&r.line.as_str()))
        .cloned()
        .collect();
    outcome
}
