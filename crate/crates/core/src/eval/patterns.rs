//! Error-pattern mining over aligned gold and predicted corpora.
//!
//! Three families of patterns are reported, all as
//! `(descriptor, conditional error rate, support)`:
//!
//! * plain confusion pairs `G→P`, rate over all gold `G` tokens;
//! * entity-order conditioned pairs `G→P | a precedes b`, where `G` and `P`
//!   belong to different entity types and the rate is taken over gold `G`
//!   tokens in sentences that also contain a gold entity of `P`'s type,
//!   split by whether the token's own entity comes before or after the first
//!   such entity;
//! * casing conditioned pairs `G→P | lowercase` / `| capitalized`.
//!
//! Only patterns with at least one error are reported, ranked by rate, then
//! support, then descriptor.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use super::confusion::{check_aligned, confusion_matrix};
use crate::error::Result;
use crate::sentence::Corpus;
use crate::tag::{EntityType, Tag};

pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    None,
    Precedes(EntityType),
    Follows(EntityType),
    Lowercase,
    Capitalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorPattern {
    pub descriptor: String,
    pub gold: Tag,
    pub predicted: Tag,
    pub condition: Condition,
    pub errors: u64,
    pub support: u64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorPatternReport {
    pub patterns: Vec<ErrorPattern>,
}

impl ErrorPatternReport {
    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn find(&self, gold: Tag, predicted: Tag, condition: Condition) -> Option<&ErrorPattern> {
        self.patterns
            .iter()
            .find(|p| p.gold == gold && p.predicted == predicted && p.condition == condition)
    }
}

fn lower_name(et: EntityType) -> String {
    et.as_str().to_lowercase()
}

fn describe(gold: Tag, pred: Tag, cond: Condition) -> String {
    let base = format!("{gold}→{pred}");
    let own = gold.entity_type().map(lower_name).unwrap_or_default();
    match cond {
        Condition::None => base,
        Condition::Precedes(other) => format!("{base} | {own} precedes {}", lower_name(other)),
        Condition::Follows(other) => format!("{base} | {own} follows {}", lower_name(other)),
        Condition::Lowercase => format!("{base} | lowercase"),
        Condition::Capitalized => format!("{base} | capitalized"),
    }
}

fn casing(token: &str) -> Option<Condition> {
    if !token.chars().any(char::is_alphabetic) {
        None
    } else if !token.chars().any(char::is_uppercase) {
        Some(Condition::Lowercase)
    } else if token.chars().next().is_some_and(char::is_uppercase) {
        Some(Condition::Capitalized)
    } else {
        None
    }
}

pub fn mine_error_patterns(gold: &Corpus, pred: &Corpus, top_k: usize) -> Result<ErrorPatternReport> {
    check_aligned(gold, pred)?;
    let cm = confusion_matrix(gold, pred)?;

    // (gold tag, condition) -> token count; (gold, pred, condition) -> errors
    let mut support: HashMap<(Tag, Condition), u64> = HashMap::new();
    let mut errors: HashMap<(Tag, Tag, Condition), u64> = HashMap::new();

    for (g, p) in gold.iter().zip(pred) {
        let spans = g.entities();
        let first_of = |et: EntityType| spans.iter().find(|s| s.entity_type == et).map(|s| s.start);
        let first: Vec<Option<usize>> = EntityType::ALL.iter().map(|&et| first_of(et)).collect();
        for (i, (&gt, &pt)) in g.tags().iter().zip(p.tags()).enumerate() {
            let mut conds: Vec<Condition> = Vec::with_capacity(4);
            if let Some(own) = gt.entity_type() {
                let span = spans.iter().find(|s| s.start <= i && i <= s.end).expect("token inside a span");
                for (k, &other) in EntityType::ALL.iter().enumerate() {
                    if other == own {
                        continue;
                    }
                    if let Some(start) = first[k] {
                        conds.push(if span.start < start {
                            Condition::Precedes(other)
                        } else {
                            Condition::Follows(other)
                        });
                    }
                }
            }
            if let Some(c) = casing(&g.tokens()[i]) {
                conds.push(c);
            }
            for &c in &conds {
                *support.entry((gt, c)).or_default() += 1;
            }
            if gt == pt {
                continue;
            }
            for &c in &conds {
                let relevant = match c {
                    Condition::Precedes(other) | Condition::Follows(other) => pt.entity_type() == Some(other),
                    _ => true,
                };
                if relevant {
                    *errors.entry((gt, pt, c)).or_default() += 1;
                }
            }
        }
    }

    let mut patterns: Vec<ErrorPattern> = Vec::new();
    let mut pairs: Vec<(Tag, Tag, u64)> = Vec::new();
    for g in Tag::ALL {
        for p in Tag::ALL {
            if g != p && cm.get(g, p) > 0 {
                pairs.push((g, p, cm.get(g, p)));
            }
        }
    }
    pairs.sort_by(|a, b| b.2.cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    for &(g, p, n) in pairs.iter().take(top_k) {
        let sup = cm.row_sum(g);
        patterns.push(ErrorPattern {
            descriptor: describe(g, p, Condition::None),
            gold: g,
            predicted: p,
            condition: Condition::None,
            errors: n,
            support: sup,
            rate: n as f64 / sup as f64,
        });
    }
    for ((g, p, c), n) in errors {
        let sup = support[&(g, c)];
        patterns.push(ErrorPattern {
            descriptor: describe(g, p, c),
            gold: g,
            predicted: p,
            condition: c,
            errors: n,
            support: sup,
            rate: n as f64 / sup as f64,
        });
    }
    patterns.sort_by(|a, b| {
        b.rate
            .partial_cmp(&a.rate)
            .unwrap_or(Ordering::Equal)
            .then(b.support.cmp(&a.support))
            .then_with(|| a.descriptor.cmp(&b.descriptor))
    });
    Ok(ErrorPatternReport { patterns })
}
