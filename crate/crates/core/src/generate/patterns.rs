//! The six address-order generation patterns and the frame bank behind them.
//!
//! Pattern 7 (lowercase duplication) is a corpus transform and lives in
//! [`super::lowercase_duplicate`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::noise::NoiseLexicon;
use super::template::{Renderer, Slot, Template, TemplateElement};
use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;
use crate::sentence::{Corpus, TaggedSentence};
use crate::tag::Tag;

/// Probability that an optional address part is dropped when omitting.
pub const OMIT_PROBABILITY: f64 = 0.25;

/// Default total corpus size for a full generation run.
pub const DEFAULT_CORPUS_SIZE: usize = 11_306;

const BUILTIN_FRAMES: &str = include_str!("../../resources/frames.txt");

/// Static description of one generation pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternSpec {
    pub id: u8,
    pub parts: &'static [Slot],
    pub allows_shuffle: bool,
    pub allows_omit: bool,
    pub verbal_housenumber: bool,
    pub duplicate_municipality: bool,
}

use Slot::{HouseNumber as H, MunicipalityName as M, Postcode as P, StreetName as S};

pub const PATTERNS: [PatternSpec; 6] = [
    PatternSpec {
        id: 1,
        parts: &[S, H, M, P],
        allows_shuffle: true,
        allows_omit: true,
        verbal_housenumber: false,
        duplicate_municipality: false,
    },
    PatternSpec {
        id: 2,
        parts: &[M, S, H, P],
        allows_shuffle: false,
        allows_omit: true,
        verbal_housenumber: false,
        duplicate_municipality: false,
    },
    PatternSpec {
        id: 3,
        parts: &[M, H, S, P],
        allows_shuffle: false,
        allows_omit: true,
        verbal_housenumber: false,
        duplicate_municipality: false,
    },
    PatternSpec {
        id: 4,
        parts: &[M, H, P],
        allows_shuffle: false,
        allows_omit: false,
        verbal_housenumber: false,
        duplicate_municipality: false,
    },
    PatternSpec {
        id: 5,
        parts: &[S, M, H, P],
        allows_shuffle: true,
        allows_omit: false,
        verbal_housenumber: true,
        duplicate_municipality: false,
    },
    PatternSpec {
        id: 6,
        parts: &[M, H, P, M],
        allows_shuffle: true,
        allows_omit: false,
        verbal_housenumber: false,
        duplicate_municipality: true,
    },
];

pub fn pattern_spec(id: u8) -> Result<&'static PatternSpec> {
    PATTERNS
        .iter()
        .find(|p| p.id == id)
        .ok_or(Error::InvalidPattern(id))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub pattern_id: u8,
    pub count: usize,
    pub shuffle: bool,
    pub omit: bool,
    pub with_noise: bool,
    pub verbal_housenumber: bool,
    pub duplicate_municipality: bool,
    pub seed: u64,
}

impl GenerationConfig {
    /// Flags as listed for the pattern; shuffle and omit enabled where allowed.
    pub fn for_pattern(pattern_id: u8, count: usize, with_noise: bool, seed: u64) -> Result<Self> {
        let spec = pattern_spec(pattern_id)?;
        Ok(GenerationConfig {
            pattern_id,
            count,
            shuffle: spec.allows_shuffle,
            omit: spec.allows_omit,
            with_noise,
            verbal_housenumber: spec.verbal_housenumber,
            duplicate_municipality: spec.duplicate_municipality,
            seed,
        })
    }

    /// Shuffle and omit may be switched off but never on where the pattern
    /// does not allow them; the verbal and duplicate flags are fixed.
    pub fn validate(&self) -> Result<&'static PatternSpec> {
        let spec = pattern_spec(self.pattern_id)?;
        if self.count == 0 {
            return Err(Error::InvalidConfig("count must be positive".into()));
        }
        if self.shuffle && !spec.allows_shuffle {
            return Err(Error::InvalidConfig(format!("pattern {} does not shuffle", spec.id)));
        }
        if self.omit && !spec.allows_omit {
            return Err(Error::InvalidConfig(format!("pattern {} does not omit", spec.id)));
        }
        if self.verbal_housenumber != spec.verbal_housenumber {
            return Err(Error::InvalidConfig(format!(
                "pattern {} requires verbal_housenumber = {}",
                spec.id, spec.verbal_housenumber
            )));
        }
        if self.duplicate_municipality != spec.duplicate_municipality {
            return Err(Error::InvalidConfig(format!(
                "pattern {} requires duplicate_municipality = {}",
                spec.id, spec.duplicate_municipality
            )));
        }
        Ok(spec)
    }

    /// Split into `shards` configs with seeds `seed ^ shard`; concatenating
    /// their outputs in shard order is deterministic.
    pub fn shards(&self, shards: usize) -> Vec<GenerationConfig> {
        let shards = shards.max(1);
        (0..shards)
            .map(|i| GenerationConfig {
                count: self.count / shards + usize::from(i < self.count % shards),
                seed: self.seed ^ i as u64,
                ..self.clone()
            })
            .filter(|c| c.count > 0)
            .collect()
    }
}

/// An address part plus the connective words that travel with it.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Block {
    lead: Vec<TemplateElement>,
    slot: Slot,
}

/// A sentence frame: prefix literals, ordered address blocks, suffix literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    prefix: Vec<TemplateElement>,
    blocks: Vec<Block>,
    suffix: Vec<TemplateElement>,
}

impl Frame {
    pub fn parse(template: &Template) -> Result<Frame> {
        let mut prefix = Vec::new();
        let mut blocks = Vec::new();
        let mut pending = Vec::new();
        for e in template.elements() {
            match e {
                TemplateElement::Literal { tag, .. } if *tag != Tag::O => {
                    return Err(Error::Template(format!("frame literal must be O: {e}")));
                }
                TemplateElement::Literal { .. } => pending.push(e.clone()),
                TemplateElement::Placeholder(Slot::Noise) => {
                    return Err(Error::Template("frames may not contain noise slots".into()));
                }
                TemplateElement::Placeholder(slot) => {
                    let lead = core::mem::take(&mut pending);
                    if blocks.is_empty() {
                        prefix = lead;
                        blocks.push(Block { lead: Vec::new(), slot: *slot });
                    } else {
                        blocks.push(Block { lead, slot: *slot });
                    }
                }
            }
        }
        if blocks.is_empty() {
            return Err(Error::Template("frame has no placeholders".into()));
        }
        Ok(Frame { prefix, blocks, suffix: pending })
    }

    pub fn slots(&self) -> Vec<Slot> {
        self.blocks.iter().map(|b| b.slot).collect()
    }
}

/// Frames grouped by pattern id.
#[derive(Debug, Clone)]
pub struct FrameBank {
    frames: [Vec<Frame>; 6],
}

impl FrameBank {
    /// Parse `<pattern>\t<template>` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<FrameBank> {
        let mut frames: [Vec<Frame>; 6] = Default::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Template(format!("frame line {}: {msg}", lineno + 1));
            let (id, body) = line
                .split_once('\t')
                .ok_or_else(|| err("expected <pattern>\\t<template>".into()))?;
            let id: u8 = id.trim().parse().map_err(|_| err(format!("bad pattern id {id:?}")))?;
            let spec = pattern_spec(id).map_err(|e| err(format!("{e}")))?;
            let template: Template = body.parse().map_err(|e| err(format!("{e}")))?;
            let frame = Frame::parse(&template).map_err(|e| err(format!("{e}")))?;
            if frame.slots() != spec.parts {
                return Err(err(format!(
                    "placeholders {:?} do not match pattern {} parts {:?}",
                    frame.slots(),
                    id,
                    spec.parts
                )));
            }
            frames[usize::from(id) - 1].push(frame);
        }
        if let Some(i) = frames.iter().position(Vec::is_empty) {
            return Err(Error::Template(format!("no frames for pattern {}", i + 1)));
        }
        Ok(FrameBank { frames })
    }

    pub fn builtin() -> FrameBank {
        FrameBank::parse(BUILTIN_FRAMES).expect("built-in frame bank is valid")
    }

    pub fn frames(&self, pattern_id: u8) -> Result<&[Frame]> {
        pattern_spec(pattern_id)?;
        Ok(&self.frames[usize::from(pattern_id) - 1])
    }
}

/// Turn a frame into one concrete template under the config's
/// omit / shuffle / noise settings.
pub fn realize_frame<R: Rng + ?Sized>(frame: &Frame, cfg: &GenerationConfig, rng: &mut R) -> Template {
    let mut blocks = frame.blocks.clone();
    if cfg.omit {
        // the first declared part always survives
        let mut kept = Vec::with_capacity(blocks.len());
        for (i, b) in blocks.into_iter().enumerate() {
            if i == 0 || !rng.gen_bool(OMIT_PROBABILITY) {
                kept.push(b);
            }
        }
        blocks = kept;
    }
    if cfg.shuffle {
        blocks.shuffle(rng);
    }
    let mut noise_before = alloc::vec![0usize; blocks.len() + 1];
    if cfg.with_noise {
        let injections = rng.gen_range(1..=2);
        for _ in 0..injections {
            noise_before[rng.gen_range(0..=blocks.len())] += 1;
        }
    }
    let noise = |n: usize| core::iter::repeat_n(TemplateElement::Placeholder(Slot::Noise), n);
    let mut out = frame.prefix.clone();
    for (i, b) in blocks.iter().enumerate() {
        out.extend(noise(noise_before[i]));
        out.extend(b.lead.iter().cloned());
        out.push(TemplateElement::Placeholder(b.slot));
    }
    out.extend(noise(noise_before[blocks.len()]));
    out.extend(frame.suffix.iter().cloned());
    Template(out)
}

/// Generate with caller-supplied bank, lexicon and generator.
pub fn generate_pattern_with<R: Rng + ?Sized>(
    cfg: &GenerationConfig,
    gazetteer: &Gazetteer,
    bank: &FrameBank,
    noise: &NoiseLexicon,
    rng: &mut R,
) -> Result<Corpus> {
    cfg.validate()?;
    let frames = bank.frames(cfg.pattern_id)?;
    let renderer = Renderer::new(gazetteer, noise).verbal(cfg.verbal_housenumber);
    let mut sentences = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        let frame = &frames[rng.gen_range(0..frames.len())];
        let template = realize_frame(frame, cfg, rng);
        sentences.push(renderer.render(&template, rng)?);
    }
    let noise_tag = if cfg.with_noise { "noisy" } else { "clean" };
    Ok(Corpus::new(format!("pattern-{}-{}", cfg.pattern_id, noise_tag), sentences))
}

/// Generate `cfg.count` sentences of one pattern with the built-in frames,
/// seeded from `cfg.seed`.
pub fn generate_pattern(cfg: &GenerationConfig, gazetteer: &Gazetteer) -> Result<Corpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    generate_pattern_with(cfg, gazetteer, &FrameBank::builtin(), &NoiseLexicon::default(), &mut rng)
}

/// The twelve (pattern, noise) buckets of a full run, with their sizes.
pub fn mix_plan(total: usize, seed: u64) -> Vec<GenerationConfig> {
    let buckets: Vec<(u8, bool)> = PATTERNS
        .iter()
        .flat_map(|p| [(p.id, true), (p.id, false)])
        .collect();
    let n = buckets.len();
    buckets
        .into_iter()
        .enumerate()
        .filter_map(|(i, (id, noisy))| {
            let count = total / n + usize::from(i < total % n);
            let bucket_seed = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            (count > 0).then(|| {
                GenerationConfig::for_pattern(id, count, noisy, bucket_seed).expect("valid pattern")
            })
        })
        .collect()
}

/// Generate all six patterns, each with and without noise, `total`
/// sentences overall, in bucket order.
pub fn generate_mix(total: usize, seed: u64, gazetteer: &Gazetteer) -> Result<Corpus> {
    let bank = FrameBank::builtin();
    let noise = NoiseLexicon::default();
    let mut sentences: Vec<TaggedSentence> = Vec::with_capacity(total);
    for cfg in mix_plan(total, seed) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        sentences.extend(generate_pattern_with(&cfg, gazetteer, &bank, &noise, &mut rng)?.sentences);
    }
    Ok(Corpus::new("mix", sentences))
}
