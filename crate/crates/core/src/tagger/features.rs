//! Per-token feature extraction.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gazetteer::{CaseMode, Gazetteer, NameKind};
use crate::sentence::Token;

/// Bumped whenever the emitted feature set changes; models trained under a
/// different version cannot be warm-started.
pub const FEATURE_TEMPLATE_VERSION: u32 = 1;

/// Sorted, deduplicated feature identifiers for one token position.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeatureVector(Vec<String>);

impl FeatureVector {
    fn from_unsorted(mut v: Vec<String>) -> Self {
        v.sort_unstable();
        v.dedup();
        FeatureVector(v)
    }

    pub fn as_slice(&self) -> &[String] {
        &self.0
    }

    pub fn contains(&self, feature: &str) -> bool {
        self.0.binary_search_by(|f| f.as_str().cmp(feature)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, String> {
        self.0.iter()
    }
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Character-class shape: `X` upper, `x` lower, `d` digit, others kept.
fn shape(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_uppercase() {
                'X'
            } else if c.is_lowercase() {
                'x'
            } else if c.is_ascii_digit() {
                'd'
            } else {
                c
            }
        })
        .collect()
}

fn short_shape(s: &str) -> String {
    let mut out = String::new();
    for c in shape(s).chars() {
        if !out.ends_with(c) {
            out.push(c);
        }
    }
    out
}

fn is_lowercase_word(s: &str) -> bool {
    s.chars().any(char::is_alphabetic) && !s.chars().any(char::is_uppercase)
}

/// Token `i` opens a 3+2 digit postcode, or is a five-digit postcode.
fn postcode_shape(tokens: &[Token], i: usize) -> bool {
    let t = tokens[i].as_str();
    (t.len() == 5 && all_digits(t))
        || (t.len() == 3 && all_digits(t) && tokens.get(i + 1).is_some_and(|n| n.len() == 2 && all_digits(n)))
}

fn postcode_tail(tokens: &[Token], i: usize) -> bool {
    let t = tokens[i].as_str();
    i > 0 && t.len() == 2 && all_digits(t) && tokens[i - 1].len() == 3 && all_digits(&tokens[i - 1])
}

/// The previous token closes a postcode, so this one cannot continue it.
fn after_postcode(tokens: &[Token], i: usize) -> bool {
    i > 0 && {
        let p = tokens[i - 1].as_str();
        (p.len() == 5 && all_digits(p)) || postcode_tail(tokens, i - 1)
    }
}

/// Where gazetteer phrases begin and which positions they cover.
#[derive(Debug, Clone, Default)]
struct Coverage {
    begins: Vec<usize>,
    inside: Vec<bool>,
}

fn coverage(tokens: &[Token], g: &Gazetteer, kind: NameKind) -> Coverage {
    let mut c = Coverage { begins: alloc::vec![0; tokens.len()], inside: alloc::vec![false; tokens.len()] };
    for i in 0..tokens.len() {
        let n = g.lookup_phrase(kind, tokens, i, CaseMode::Insensitive);
        c.begins[i] = n;
        for flag in c.inside.iter_mut().skip(i + 1).take(n.saturating_sub(1)) {
            *flag = true;
        }
    }
    c
}

fn features_at(tokens: &[Token], i: usize, streets: &Coverage, municipalities: &Coverage) -> FeatureVector {
    let tok = tokens[i].as_str();
    let lower = tok.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut f: Vec<String> = Vec::with_capacity(32);

    f.push("bias".into());
    f.push(format!("w={lower}"));
    f.push(format!("shape={}", shape(tok)));
    f.push(format!("sshape={}", short_shape(tok)));
    let ndigits = tok.bytes().filter(u8::is_ascii_digit).count();
    if ndigits > 0 {
        f.push(format!("ndigits={ndigits}"));
    }
    if all_digits(tok) {
        f.push("alldigits".into());
    }
    if tok.contains('/') && tok.split('/').all(all_digits) {
        f.push("slashnum".into());
    }
    for k in 1..=3.min(chars.len()) {
        let p: String = chars[..k].iter().collect();
        let s: String = chars[chars.len() - k..].iter().collect();
        f.push(format!("p{k}={p}"));
        f.push(format!("s{k}={s}"));
    }
    match i.checked_sub(1).map(|j| &tokens[j]) {
        Some(p) => {
            f.push(format!("prev={}", p.to_lowercase()));
            f.push(format!("prevshape={}", short_shape(p)));
        }
        None => f.push("prev=<s>".into()),
    }
    match tokens.get(i + 1) {
        Some(n) => {
            f.push(format!("next={}", n.to_lowercase()));
            f.push(format!("nextshape={}", short_shape(n)));
        }
        None => f.push("next=</s>".into()),
    }
    for (name, cov) in [("street", streets), ("municipality", municipalities)] {
        if cov.begins[i] > 0 {
            f.push(format!("gaz_{name}"));
            f.push(format!("gaz_{name}_begin"));
            f.push(format!("gaz_{name}_len={}", cov.begins[i].min(4)));
        }
        if cov.inside[i] {
            f.push(format!("gaz_{name}"));
            f.push(format!("gaz_{name}_inside"));
        }
        if i > 0 && (cov.begins[i - 1] > 0 || cov.inside[i - 1]) {
            f.push(format!("prev_gaz_{name}"));
        }
    }
    if postcode_shape(tokens, i) {
        f.push("postcode_shape".into());
    }
    if postcode_tail(tokens, i) {
        f.push("postcode_tail".into());
    }
    if after_postcode(tokens, i) {
        f.push("after_postcode".into());
    }
    if i == 0 {
        f.push("first".into());
    }
    if is_lowercase_word(tok) {
        f.push("is_lower".into());
    } else if tok.chars().next().is_some_and(char::is_uppercase) {
        f.push("is_cap".into());
    }
    FeatureVector::from_unsorted(f)
}

/// Features for every position of a sentence; gazetteer coverage is
/// computed once.
pub fn sentence_features(tokens: &[Token], g: &Gazetteer) -> Vec<FeatureVector> {
    let streets = coverage(tokens, g, NameKind::Street);
    let municipalities = coverage(tokens, g, NameKind::Municipality);
    (0..tokens.len())
        .map(|i| features_at(tokens, i, &streets, &municipalities))
        .collect()
}

pub fn extract_features(tokens: &[Token], i: usize, g: &Gazetteer) -> Result<FeatureVector> {
    if i >= tokens.len() {
        return Err(Error::IndexOutOfRange { index: i, len: tokens.len() });
    }
    let streets = coverage(tokens, g, NameKind::Street);
    let municipalities = coverage(tokens, g, NameKind::Municipality);
    Ok(features_at(tokens, i, &streets, &municipalities))
}
