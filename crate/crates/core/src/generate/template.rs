//! Placeholder templates and their line grammar.
//!
//! A template line is a whitespace-separated sequence of items:
//!
//! * `streetname`, `municipalityname`, `housenumber`, `postcode`, `noise`
//!   are placeholders, filled at render time;
//! * `word/TAG` is a literal with an explicit tag (`TAG` is one of the nine
//!   tag strings);
//! * a bare all-digit word (or `digits/digits`) is a house-number literal,
//!   five bare digits a postcode literal;
//! * any other bare word is an `O` literal.
//!
//! A bare tag string (`B-Street`, `O`, ...) is rejected as a stray tag token.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::noise::NoiseLexicon;
use super::numerals;
use crate::error::{Error, Result};
use crate::gazetteer::{Gazetteer, HouseNumber, NameKind, PostcodeSpec};
use crate::sentence::{TaggedSentence, Token};
use crate::tag::{EntityType, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Slot {
    StreetName,
    MunicipalityName,
    HouseNumber,
    Postcode,
    Noise,
}

impl Slot {
    pub const ALL: [Slot; 5] = [
        Slot::StreetName,
        Slot::MunicipalityName,
        Slot::HouseNumber,
        Slot::Postcode,
        Slot::Noise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Slot::StreetName => "streetname",
            Slot::MunicipalityName => "municipalityname",
            Slot::HouseNumber => "housenumber",
            Slot::Postcode => "postcode",
            Slot::Noise => "noise",
        }
    }

    pub fn entity_type(self) -> Option<EntityType> {
        match self {
            Slot::StreetName => Some(EntityType::Street),
            Slot::MunicipalityName => Some(EntityType::Municipality),
            Slot::HouseNumber => Some(EntityType::Housenumber),
            Slot::Postcode => Some(EntityType::Postcode),
            Slot::Noise => None,
        }
    }

    fn parse(s: &str) -> Option<Slot> {
        Slot::ALL.into_iter().find(|slot| slot.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplateElement {
    Literal { token: Token, tag: Tag },
    Placeholder(Slot),
}

impl TemplateElement {
    pub fn literal(word: &str) -> Result<Self> {
        Ok(TemplateElement::Literal { token: Token::new(word)?, tag: Tag::O })
    }

    pub fn tagged(word: &str, tag: Tag) -> Result<Self> {
        Ok(TemplateElement::Literal { token: Token::new(word)?, tag })
    }
}

/// Tag a bare literal word gets when no explicit tag is written.
fn implicit_tag(word: &str) -> Tag {
    let all_digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if all_digits(word) {
        if word.len() == 5 {
            Tag::BPostcode
        } else {
            Tag::BHousenumber
        }
    } else if let Some((a, b)) = word.split_once('/') {
        if all_digits(a) && all_digits(b) {
            Tag::BHousenumber
        } else {
            Tag::O
        }
    } else {
        Tag::O
    }
}

impl fmt::Display for TemplateElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateElement::Placeholder(s) => f.write_str(s.as_str()),
            TemplateElement::Literal { token, tag } => {
                let bare_ok = implicit_tag(token) == *tag
                    && Slot::parse(token).is_none()
                    && token.parse::<Tag>().is_err()
                    && explicit_split(token).is_none();
                if bare_ok {
                    f.write_str(token)
                } else {
                    write!(f, "{token}/{tag}")
                }
            }
        }
    }
}

fn explicit_split(item: &str) -> Option<(&str, Tag)> {
    let (word, tag) = item.rsplit_once('/')?;
    if word.is_empty() {
        return None;
    }
    tag.parse().ok().map(|t| (word, t))
}

/// An ordered sequence of template elements.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Template(pub Vec<TemplateElement>);

impl Template {
    pub fn elements(&self) -> &[TemplateElement] {
        &self.0
    }

    pub fn placeholders(&self) -> impl Iterator<Item = Slot> + '_ {
        self.0.iter().filter_map(|e| match e {
            TemplateElement::Placeholder(s) => Some(*s),
            _ => None,
        })
    }
}

impl FromStr for Template {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut elements = Vec::new();
        for item in line.split_whitespace() {
            if let Some(slot) = Slot::parse(item) {
                elements.push(TemplateElement::Placeholder(slot));
            } else if item.parse::<Tag>().is_ok() {
                return Err(Error::Template(alloc::format!("stray tag token {item:?}")));
            } else if let Some((word, tag)) = explicit_split(item) {
                if Slot::parse(word).is_some() && tag != Tag::O {
                    return Err(Error::Template(alloc::format!(
                        "placeholder cannot carry a tag: {item:?}"
                    )));
                }
                elements.push(TemplateElement::tagged(word, tag)?);
            } else {
                elements.push(TemplateElement::tagged(item, implicit_tag(item))?);
            }
        }
        if elements.is_empty() {
            return Err(Error::EmptyTemplate);
        }
        Ok(Template(elements))
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Fills placeholders from a gazetteer and a noise lexicon.
#[derive(Debug, Clone, Copy)]
pub struct Renderer<'a> {
    pub gazetteer: &'a Gazetteer,
    pub noise: &'a NoiseLexicon,
    pub verbal_housenumber: bool,
}

impl<'a> Renderer<'a> {
    pub fn new(gazetteer: &'a Gazetteer, noise: &'a NoiseLexicon) -> Self {
        Renderer { gazetteer, noise, verbal_housenumber: false }
    }

    pub fn verbal(mut self, on: bool) -> Self {
        self.verbal_housenumber = on;
        self
    }

    /// Words a placeholder expands to.
    fn fill<R: Rng + ?Sized>(&self, slot: Slot, rng: &mut R) -> Result<Vec<String>> {
        let words = match slot {
            Slot::StreetName => split_words(self.gazetteer.sample_name(NameKind::Street, rng)?),
            Slot::MunicipalityName => {
                split_words(self.gazetteer.sample_name(NameKind::Municipality, rng)?)
            }
            Slot::HouseNumber => {
                let h = HouseNumber::random(rng);
                if self.verbal_housenumber {
                    numerals::verbalize(&h)
                } else {
                    alloc::vec![h.render()]
                }
            }
            Slot::Postcode => PostcodeSpec::random(rng).words(),
            Slot::Noise => self.noise.sample(rng)?.to_vec(),
        };
        Ok(words)
    }

    pub fn render<R: Rng + ?Sized>(&self, template: &Template, rng: &mut R) -> Result<TaggedSentence> {
        let mut tokens = Vec::new();
        let mut tags = Vec::new();
        for element in &template.0 {
            match element {
                TemplateElement::Literal { token, tag } => {
                    tokens.push(token.clone());
                    tags.push(*tag);
                }
                TemplateElement::Placeholder(slot) => {
                    let words = self.fill(*slot, rng)?;
                    for (i, w) in words.into_iter().enumerate() {
                        tokens.push(Token::new(w)?);
                        tags.push(match slot.entity_type() {
                            Some(et) if i == 0 => et.begin(),
                            Some(et) => et.inside(),
                            None => Tag::O,
                        });
                    }
                }
            }
        }
        if tokens.is_empty() {
            return Err(Error::EmptyTemplate);
        }
        TaggedSentence::new(tokens, tags)
    }
}

fn split_words(s: &str) -> Vec<String> {
    s.split_whitespace().map(ToString::to_string).collect()
}

/// Render a template with the built-in noise lexicon.
pub fn render_template<R: Rng + ?Sized>(
    template: &Template,
    gazetteer: &Gazetteer,
    verbal_housenumber: bool,
    rng: &mut R,
) -> Result<TaggedSentence> {
    let noise = NoiseLexicon::default();
    Renderer::new(gazetteer, &noise)
        .verbal(verbal_housenumber)
        .render(template, rng)
}
