//! Street and municipality name lists, phrase lookup, and synthetic
//! postcode / house-number values.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashSet;
use rand::Rng;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::sentence::Token;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NameKind {
    Street,
    Municipality,
}

impl fmt::Display for NameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NameKind::Street => "street",
            NameKind::Municipality => "municipality",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaseMode {
    Sensitive,
    #[default]
    Insensitive,
}

fn normalize_name(raw: &str) -> Option<String> {
    let nfc: String = raw.trim().nfc().collect();
    // collapse internal runs of whitespace so entries match token joins
    let joined = nfc.split_whitespace().collect::<Vec<_>>().join(" ");
    (!joined.is_empty()).then_some(joined)
}

/// A sorted, deduplicated, NFC-normalized list of names.
#[derive(Debug, Clone, Default)]
struct NameList {
    entries: Vec<String>,
    exact: HashSet<String>,
    folded: HashSet<String>,
    max_words: usize,
}

impl NameList {
    fn from_iter<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries: Vec<String> = names
            .into_iter()
            .filter_map(|n| normalize_name(n.as_ref()))
            .collect();
        entries.sort();
        entries.dedup();
        let exact = entries.iter().cloned().collect();
        let folded = entries.iter().map(|e| e.to_lowercase()).collect();
        let max_words = entries
            .iter()
            .map(|e| e.split(' ').count())
            .max()
            .unwrap_or(0);
        NameList { entries, exact, folded, max_words }
    }

    fn contains(&self, phrase: &str, case: CaseMode) -> bool {
        match case {
            CaseMode::Sensitive => self.exact.contains(phrase),
            CaseMode::Insensitive => self.folded.contains(&phrase.to_lowercase()),
        }
    }
}

/// Street and municipality name lists. Immutable once built.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    streets: NameList,
    municipalities: NameList,
}

impl Gazetteer {
    /// Build from raw name lists. Blank entries and duplicates are dropped;
    /// either list may end up empty.
    pub fn new<I, J, S, T>(streets: I, municipalities: J) -> Self
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        Gazetteer {
            streets: NameList::from_iter(streets),
            municipalities: NameList::from_iter(municipalities),
        }
    }

    /// Like [`Gazetteer::new`] but rejects a list that is empty after cleaning.
    pub fn from_lines<I, J, S, T>(streets: I, municipalities: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: AsRef<str>,
        T: AsRef<str>,
    {
        let g = Gazetteer::new(streets, municipalities);
        if g.streets.entries.is_empty() || g.municipalities.entries.is_empty() {
            return Err(Error::EmptyGazetteer);
        }
        Ok(g)
    }

    fn list(&self, kind: NameKind) -> &NameList {
        match kind {
            NameKind::Street => &self.streets,
            NameKind::Municipality => &self.municipalities,
        }
    }

    pub fn len(&self, kind: NameKind) -> usize {
        self.list(kind).entries.len()
    }

    pub fn is_empty(&self, kind: NameKind) -> bool {
        self.list(kind).entries.is_empty()
    }

    /// Entries in sorted order.
    pub fn entries(&self, kind: NameKind) -> &[String] {
        &self.list(kind).entries
    }

    /// Longest entry, in words.
    pub fn max_words(&self, kind: NameKind) -> usize {
        self.list(kind).max_words
    }

    pub fn contains(&self, kind: NameKind, name: &str, case: CaseMode) -> bool {
        match normalize_name(name) {
            Some(n) => self.list(kind).contains(&n, case),
            None => false,
        }
    }

    /// Uniform draw over the sorted entries of `kind`.
    pub fn sample_name<R: Rng + ?Sized>(&self, kind: NameKind, rng: &mut R) -> Result<&str> {
        let entries = &self.list(kind).entries;
        if entries.is_empty() {
            return Err(Error::EmptyGazetteer);
        }
        Ok(&entries[rng.gen_range(0..entries.len())])
    }

    /// Length of the longest entry matching `tokens[start..start + n]`
    /// joined by single spaces, or 0.
    pub fn lookup_phrase(&self, kind: NameKind, tokens: &[Token], start: usize, case: CaseMode) -> usize {
        let list = self.list(kind);
        if start >= tokens.len() || list.entries.is_empty() {
            return 0;
        }
        let max_n = list.max_words.min(tokens.len() - start);
        let mut phrase = String::new();
        let mut best = 0;
        for n in 1..=max_n {
            if n > 1 {
                phrase.push(' ');
            }
            phrase.extend(tokens[start + n - 1].nfc());
            if list.contains(&phrase, case) {
                best = n;
            }
        }
        best
    }
}

/// A five-digit postcode, rendered as one token or as `### ##`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PostcodeSpec {
    digits: String,
    pub spaced: bool,
}

impl PostcodeSpec {
    pub fn new(digits: impl Into<String>, spaced: bool) -> Result<Self> {
        let digits = digits.into();
        if digits.len() != 5 || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidPostcode(digits));
        }
        Ok(PostcodeSpec { digits, spaced })
    }

    /// Five uniform digits; spaced with probability 1/2.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let digits: String = (0..5)
            .map(|_| char::from(b'0' + rng.gen_range(0..10u8)))
            .collect();
        let spaced = rng.gen_bool(0.5);
        PostcodeSpec { digits, spaced }
    }

    pub fn digits(&self) -> &str {
        &self.digits
    }

    pub fn words(&self) -> Vec<String> {
        if self.spaced {
            alloc::vec![self.digits[..3].to_string(), self.digits[3..].to_string()]
        } else {
            alloc::vec![self.digits.clone()]
        }
    }
}

/// Probability that a generated house number carries a `/sub` part.
pub const COMPOSITE_HOUSE_NUMBER_RATE: f64 = 0.15;

/// A house number in 1..=999, optionally slash-composite like `834/12`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HouseNumber {
    pub main: u16,
    pub sub: Option<u16>,
}

impl HouseNumber {
    pub fn new(main: u16, sub: Option<u16>) -> Result<Self> {
        if !(1..=999).contains(&main) {
            return Err(Error::HouseNumberOutOfRange(main.into()));
        }
        if let Some(s) = sub {
            if !(1..=999).contains(&s) {
                return Err(Error::HouseNumberOutOfRange(s.into()));
            }
        }
        Ok(HouseNumber { main, sub })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let main = rng.gen_range(1..=999);
        let sub = rng
            .gen_bool(COMPOSITE_HOUSE_NUMBER_RATE)
            .then(|| rng.gen_range(1..=99));
        HouseNumber { main, sub }
    }

    /// Digit form, always a single token.
    pub fn render(&self) -> String {
        match self.sub {
            Some(s) => format!("{}/{}", self.main, s),
            None => self.main.to_string(),
        }
    }
}

/// A tiny fixed gazetteer, used to smoke-render candidate templates.
pub fn smoke_gazetteer() -> Gazetteer {
    Gazetteer::new(["Hlavná", "Nábrežie mládeže"], ["Košice", "Banská Bystrica"])
}
