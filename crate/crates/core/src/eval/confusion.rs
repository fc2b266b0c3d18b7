use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentence::Corpus;
use crate::tag::{Tag, NUM_TAGS};

/// Gold-by-predicted token counts; rows and columns follow the tag order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[u64; NUM_TAGS]; NUM_TAGS],
}

/// Check that two corpora pair up sentence by sentence and token by token.
pub fn check_aligned(gold: &Corpus, pred: &Corpus) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::Alignment {
            index: gold.len().min(pred.len()),
            reason: format!("sentence counts differ: {} gold vs {} predicted", gold.len(), pred.len()),
        });
    }
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        if g.len() != p.len() {
            return Err(Error::Alignment {
                index: i,
                reason: format!("token counts differ: {} gold vs {} predicted", g.len(), p.len()),
            });
        }
    }
    Ok(())
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; NUM_TAGS]; NUM_TAGS]) -> Self {
        ConfusionMatrix { counts }
    }

    pub fn get(&self, gold: Tag, pred: Tag) -> u64 {
        self.counts[gold.index()][pred.index()]
    }

    pub fn record(&mut self, gold: Tag, pred: Tag) {
        self.counts[gold.index()][pred.index()] += 1;
    }

    pub fn merge(&mut self, other: &ConfusionMatrix) {
        for (row, orow) in self.counts.iter_mut().zip(&other.counts) {
            for (c, o) in row.iter_mut().zip(orow) {
                *c += o;
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..NUM_TAGS).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, gold: Tag) -> u64 {
        self.counts[gold.index()].iter().sum()
    }

    pub fn col_sum(&self, pred: Tag) -> u64 {
        self.counts.iter().map(|r| r[pred.index()]).sum()
    }

    /// Parse the text fixture: nine lines of nine non-negative integers,
    /// rows gold and columns predicted in tag order. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse_fixture(text: &str) -> Result<Self> {
        let mut counts = [[0u64; NUM_TAGS]; NUM_TAGS];
        let mut row = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if row == NUM_TAGS {
                return Err(Error::MatrixFormat(format!("line {}: more than 9 rows", lineno + 1)));
            }
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != NUM_TAGS {
                return Err(Error::MatrixFormat(format!(
                    "line {}: expected 9 integers, found {}",
                    lineno + 1,
                    cells.len()
                )));
            }
            for (j, cell) in cells.iter().enumerate() {
                counts[row][j] = cell.parse().map_err(|_| {
                    Error::MatrixFormat(format!("line {}: bad count {cell:?}", lineno + 1))
                })?;
            }
            row += 1;
        }
        if row != NUM_TAGS {
            return Err(Error::MatrixFormat(format!("expected 9 rows, found {row}")));
        }
        Ok(ConfusionMatrix { counts })
    }

    pub fn to_fixture(&self) -> String {
        let mut out = String::from("# rows: gold, columns: predicted; order:");
        for t in Tag::ALL {
            out.push(' ');
            out.push_str(t.as_str());
        }
        out.push('\n');
        for row in &self.counts {
            let cells: Vec<String> = row.iter().map(|c| format!("{c}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    /// Aligned text table with tag labels.
    pub fn render_table(&self) -> String {
        let width = Tag::ALL.iter().map(|t| t.as_str().len()).max().unwrap_or(0);
        let mut out = String::new();
        let _ = write!(out, "{:>width$} |", "gold \\ pred");
        for t in Tag::ALL {
            let _ = write!(out, " {:>5}", short_label(t));
        }
        out.push('\n');
        for (i, row) in self.counts.iter().enumerate() {
            let _ = write!(out, "{:>width$} |", Tag::ALL[i].as_str());
            for c in row {
                let _ = write!(out, " {c:>5}");
            }
            out.push('\n');
        }
        out
    }
}

fn short_label(t: Tag) -> &'static str {
    match t {
        Tag::O => "O",
        Tag::BStreet => "B-St",
        Tag::IStreet => "I-St",
        Tag::BHousenumber => "B-HN",
        Tag::IHousenumber => "I-HN",
        Tag::BMunicipality => "B-Mu",
        Tag::IMunicipality => "I-Mu",
        Tag::BPostcode => "B-PC",
        Tag::IPostcode => "I-PC",
    }
}

pub fn confusion_matrix(gold: &Corpus, pred: &Corpus) -> Result<ConfusionMatrix> {
    check_aligned(gold, pred)?;
    let mut cm = ConfusionMatrix::default();
    for (g, p) in gold.iter().zip(pred) {
        for (&gt, &pt) in g.tags().iter().zip(p.tags()) {
            cm.record(gt, pt);
        }
    }
    Ok(cm)
}

/// `trace / total`.
pub fn token_accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(cm.trace() as f64 / total as f64)
}

/// Accuracy change from `a` to `b` in percentage points.
pub fn accuracy_delta(a: &ConfusionMatrix, b: &ConfusionMatrix) -> Result<f64> {
    Ok(100.0 * (token_accuracy(b)? - token_accuracy(a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentence::TaggedSentence;
    use alloc::vec;

    fn sent(pairs: &[(&str, &str)]) -> TaggedSentence {
        TaggedSentence::from_pairs(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn counting() {
        let gold = Corpus::new("g", vec![sent(&[("Hlavná", "B-Street"), ("7", "B-Housenumber"), ("x", "O")])]);
        let pred = Corpus::new("p", vec![sent(&[("Hlavná", "B-Street"), ("7", "B-Housenumber"), ("x", "O")])]);
        let cm = confusion_matrix(&gold, &pred).unwrap();
        assert_eq!(cm.trace(), 3);
        assert_eq!(cm.total(), 3);

        let gold = Corpus::new("g", vec![sent(&[("Hlavná", "B-Street"), ("cesta", "B-Street"), ("7", "B-Housenumber")])]);
        let pred = Corpus::new("p", vec![sent(&[("Hlavná", "B-Street"), ("cesta", "I-Street"), ("7", "B-Housenumber")])]);
        let cm = confusion_matrix(&gold, &pred).unwrap();
        assert_eq!(cm.get(Tag::BStreet, Tag::IStreet), 1);
        assert_eq!(cm.trace(), 2);
    }

    #[test]
    fn misaligned_inputs() {
        let gold = Corpus::new("g", vec![sent(&[("a", "O"), ("b", "O")])]);
        let pred = Corpus::new("p", vec![sent(&[("a", "O")])]);
        assert!(matches!(confusion_matrix(&gold, &pred), Err(Error::Alignment { index: 0, .. })));
        let pred2 = Corpus::new("p", vec![]);
        assert!(matches!(confusion_matrix(&gold, &pred2), Err(Error::Alignment { .. })));
    }

    #[test]
    fn accuracy_edge_cases() {
        assert_eq!(token_accuracy(&ConfusionMatrix::default()), Err(Error::EmptyMatrix));
        let mut id = ConfusionMatrix::default();
        for t in Tag::ALL {
            id.record(t, t);
        }
        assert_eq!(token_accuracy(&id).unwrap(), 1.0);
        assert_eq!(accuracy_delta(&id, &id).unwrap(), 0.0);
        let mut off = ConfusionMatrix::default();
        off.record(Tag::O, Tag::BStreet);
        assert_eq!(accuracy_delta(&id, &off).unwrap(), -100.0);
    }

    #[test]
    fn fixture_format() {
        let mut cm = ConfusionMatrix::default();
        cm.counts[1][2] = 21;
        cm.counts[0][0] = 53;
        let text = cm.to_fixture();
        assert_eq!(ConfusionMatrix::parse_fixture(&text).unwrap(), cm);
        assert!(ConfusionMatrix::parse_fixture("1 2 3").is_err());
        let bad = text.replace("21", "-1");
        assert!(ConfusionMatrix::parse_fixture(&bad).is_err());
        assert!(cm.render_table().contains("B-Municipality"));
    }
}
