use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::confusion::{check_aligned, confusion_matrix, token_accuracy, ConfusionMatrix};
use crate::error::Result;
use crate::sentence::Corpus;
use crate::tag::{EntityType, Tag};

/// Precision, recall and F1; a metric whose denominator is zero is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

impl Prf {
    fn from_counts(tp: u64, predicted: u64, actual: u64) -> Prf {
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, actual);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        Prf { precision, recall, f1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub tag: Tag,
    pub prf: Prf,
    /// Gold token count for the tag.
    pub support: u64,
}

/// Per-tag metrics from the matrix: precision over columns, recall over rows.
pub fn per_class_prf(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    Tag::ALL
        .iter()
        .map(|&t| ClassMetrics {
            tag: t,
            prf: Prf::from_counts(cm.get(t, t), cm.col_sum(t), cm.row_sum(t)),
            support: cm.row_sum(t),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntityMetrics {
    pub entity_type: EntityType,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub prf: Prf,
}

/// Exact-span entity scores: a predicted span counts only when type, start
/// and end all match a gold span.
pub fn entity_f1(gold: &Corpus, pred: &Corpus) -> Result<Vec<EntityMetrics>> {
    check_aligned(gold, pred)?;
    let mut counts = [(0u64, 0u64, 0u64); 4];
    for (g, p) in gold.iter().zip(pred) {
        let gs = g.entities();
        let ps = p.entities();
        for (k, et) in EntityType::ALL.iter().enumerate() {
            let gold_spans: Vec<_> = gs.iter().filter(|s| s.entity_type == *et).collect();
            let pred_spans: Vec<_> = ps.iter().filter(|s| s.entity_type == *et).collect();
            let tp = pred_spans.iter().filter(|s| gold_spans.contains(s)).count() as u64;
            counts[k].0 += tp;
            counts[k].1 += pred_spans.len() as u64 - tp;
            counts[k].2 += gold_spans.len() as u64 - tp;
        }
    }
    Ok(EntityType::ALL
        .iter()
        .zip(counts)
        .map(|(&et, (tp, fp, fn_))| EntityMetrics {
            entity_type: et,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            prf: Prf::from_counts(tp, tp + fp, tp + fn_),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub token_accuracy: f64,
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    pub entities: Vec<EntityMetrics>,
    pub sentences: usize,
    pub tokens: u64,
}

pub fn evaluate(gold: &Corpus, pred: &Corpus) -> Result<EvalReport> {
    let cm = confusion_matrix(gold, pred)?;
    Ok(EvalReport {
        token_accuracy: token_accuracy(&cm)?,
        confusion: cm,
        per_class: per_class_prf(&cm),
        entities: entity_f1(gold, pred)?,
        sentences: gold.len(),
        tokens: cm.total(),
    })
}
