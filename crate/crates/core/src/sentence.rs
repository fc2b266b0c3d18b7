//! Tokens, tagged sentences, BIO validity and the span view of a tag sequence.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tag::{EntityType, Tag};

/// A whitespace-free, non-empty word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(text));
        }
        Ok(Token(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    pub fn to_lowercase(&self) -> Token {
        // lowercasing never introduces whitespace
        Token(self.0.to_lowercase())
    }
}

impl Deref for Token {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Token {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Token::new(s).map_err(serde::de::Error::custom)
    }
}

/// Split raw text on whitespace into tokens.
pub fn tokenize(text: &str) -> Vec<Token> {
    text.split_whitespace().map(|w| Token(w.to_string())).collect()
}

/// Result of [`validate_bio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BioVerdict {
    Ok,
    /// Index of the first `I-X` tag not preceded by `B-X` or `I-X`.
    Violation(usize),
}

impl BioVerdict {
    pub fn is_ok(self) -> bool {
        self == BioVerdict::Ok
    }

    pub fn violation(self) -> Option<usize> {
        match self {
            BioVerdict::Ok => None,
            BioVerdict::Violation(i) => Some(i),
        }
    }
}

pub fn validate_bio(tags: &[Tag]) -> BioVerdict {
    let mut prev = None;
    for (i, &t) in tags.iter().enumerate() {
        if !t.may_follow(prev) {
            return BioVerdict::Violation(i);
        }
        prev = Some(t);
    }
    BioVerdict::Ok
}

/// A maximal `B-X (I-X)*` run, with inclusive token bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EntitySpan {
    pub entity_type: EntityType,
    pub start: usize,
    pub end: usize,
}

impl EntitySpan {
    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Spans of a BIO-valid tag sequence, left to right.
pub fn extract_entities(tags: &[Tag]) -> Result<Vec<EntitySpan>> {
    if let BioVerdict::Violation(i) = validate_bio(tags) {
        return Err(Error::BioViolation(i));
    }
    Ok(spans_unchecked(tags))
}

fn spans_unchecked(tags: &[Tag]) -> Vec<EntitySpan> {
    let mut spans: Vec<EntitySpan> = Vec::new();
    for (i, &t) in tags.iter().enumerate() {
        if t.is_begin() {
            spans.push(EntitySpan {
                entity_type: t.entity_type().expect("B tag has a type"),
                start: i,
                end: i,
            });
        } else if t.is_inside() {
            if let Some(last) = spans.last_mut() {
                last.end = i;
            }
        }
    }
    spans
}

/// Inverse of [`extract_entities`]: rebuild a tag sequence of length `len`.
pub fn spans_to_tags(spans: &[EntitySpan], len: usize) -> Result<Vec<Tag>> {
    let mut tags = alloc::vec![Tag::O; len];
    let mut sorted: Vec<EntitySpan> = spans.to_vec();
    sorted.sort_by_key(|s| (s.start, s.end));
    let mut next_free = 0;
    for s in &sorted {
        if s.start > s.end || s.end >= len {
            return Err(Error::IndexOutOfRange { index: s.end, len });
        }
        if s.start < next_free {
            return Err(Error::BioViolation(s.start));
        }
        tags[s.start] = s.entity_type.begin();
        for t in &mut tags[s.start + 1..=s.end] {
            *t = s.entity_type.inside();
        }
        next_free = s.end + 1;
    }
    Ok(tags)
}

/// Parallel token and tag sequences; non-empty and BIO-valid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TaggedSentence {
    tokens: Vec<Token>,
    tags: Vec<Tag>,
}

impl TaggedSentence {
    pub fn new(tokens: Vec<Token>, tags: Vec<Tag>) -> Result<Self> {
        if tokens.len() != tags.len() {
            return Err(Error::LengthMismatch { tokens: tokens.len(), tags: tags.len() });
        }
        if tokens.is_empty() {
            return Err(Error::EmptySentence);
        }
        if let BioVerdict::Violation(i) = validate_bio(&tags) {
            return Err(Error::BioViolation(i));
        }
        Ok(TaggedSentence { tokens, tags })
    }

    /// Build from `(word, tag)` string pairs; handy in tests and fixtures.
    pub fn from_pairs<'a, I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut tokens = Vec::new();
        let mut tags = Vec::new();
        for (w, t) in pairs {
            tokens.push(Token::new(w)?);
            tags.push(t.parse()?);
        }
        TaggedSentence::new(tokens, tags)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn entities(&self) -> Vec<EntitySpan> {
        spans_unchecked(&self.tags)
    }

    pub fn to_lowercase(&self) -> TaggedSentence {
        TaggedSentence {
            tokens: self.tokens.iter().map(Token::to_lowercase).collect(),
            tags: self.tags.clone(),
        }
    }

    /// Same tokens, different tags (validated).
    pub fn with_tags(&self, tags: Vec<Tag>) -> Result<TaggedSentence> {
        TaggedSentence::new(self.tokens.clone(), tags)
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(t);
        }
        out
    }

    pub fn into_parts(self) -> (Vec<Token>, Vec<Tag>) {
        (self.tokens, self.tags)
    }
}

impl<'de> Deserialize<'de> for TaggedSentence {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            tokens: Vec<Token>,
            tags: Vec<Tag>,
        }
        let raw = Raw::deserialize(deserializer)?;
        TaggedSentence::new(raw.tokens, raw.tags).map_err(serde::de::Error::custom)
    }
}

/// A named list of tagged sentences.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    pub name: String,
    pub sentences: Vec<TaggedSentence>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, sentences: Vec<TaggedSentence>) -> Self {
        Corpus { name: name.into(), sentences }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn num_tokens(&self) -> usize {
        self.sentences.iter().map(TaggedSentence::len).sum()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, TaggedSentence> {
        self.sentences.iter()
    }

    /// 64-bit FNV-1a digest over tokens and tags; stable across platforms.
    pub fn fingerprint(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut h = OFFSET;
        let mut feed = |bytes: &[u8]| {
            for &b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(PRIME);
            }
        };
        for s in &self.sentences {
            for (tok, tag) in s.tokens.iter().zip(&s.tags) {
                feed(tok.as_bytes());
                feed(b"\t");
                feed(tag.as_str().as_bytes());
                feed(b"\n");
            }
            feed(b"\n");
        }
        h
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a TaggedSentence;
    type IntoIter = core::slice::Iter<'a, TaggedSentence>;

    fn into_iter(self) -> Self::IntoIter {
        self.sentences.iter()
    }
}
