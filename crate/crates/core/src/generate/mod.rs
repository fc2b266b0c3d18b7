//! Synthetic corpus generation: templates, patterns, noise, lowercase
//! duplication and train/validation/test splitting.

pub mod noise;
pub mod numerals;
pub mod patterns;
pub mod template;

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use noise::NoiseLexicon;
pub use numerals::{verbalize, verbalize_house_number};
pub use patterns::{
    generate_mix, generate_pattern, generate_pattern_with, pattern_spec, FrameBank, GenerationConfig,
    PatternSpec, DEFAULT_CORPUS_SIZE, OMIT_PROBABILITY, PATTERNS,
};
pub use template::{render_template, Renderer, Slot, Template, TemplateElement};

use crate::error::{Error, Result};
use crate::sentence::Corpus;

/// Originals followed by fully lowercased copies with unchanged tags.
pub fn lowercase_duplicate(corpus: &Corpus) -> Corpus {
    let mut sentences = corpus.sentences.clone();
    sentences.extend(corpus.sentences.iter().map(|s| s.to_lowercase()));
    Corpus::new(corpus.name.clone(), sentences)
}

pub const DEFAULT_SPLIT: [f64; 3] = [0.80, 0.15, 0.05];

/// Smallest corpus [`split_corpus`] accepts.
pub const MIN_SPLIT_SIZE: usize = 20;

/// Seeded shuffle, then contiguous slices of `floor(r0·N)`, `floor(r1·N)`
/// and the remainder.
pub fn split_corpus(corpus: &Corpus, ratios: [f64; 3], seed: u64) -> Result<(Corpus, Corpus, Corpus)> {
    let sum: f64 = ratios.iter().sum();
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) || (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidRatios(ratios));
    }
    let n = corpus.len();
    if n < MIN_SPLIT_SIZE {
        return Err(Error::CorpusTooSmall { size: n, min: MIN_SPLIT_SIZE });
    }
    // the epsilon keeps 0.8·N from landing a hair under an integer
    let floor = |r: f64| ((r * n as f64) + 1e-9) as usize;
    let n_train = floor(ratios[0]).min(n);
    let n_val = floor(ratios[1]).min(n - n_train);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let take = |idx: &[usize]| idx.iter().map(|&i| corpus.sentences[i].clone()).collect::<Vec<_>>();
    let name = |part: &str| format!("{}.{}", corpus.name, part);
    Ok((
        Corpus::new(name("train"), take(&order[..n_train])),
        Corpus::new(name("val"), take(&order[n_train..n_train + n_val])),
        Corpus::new(name("test"), take(&order[n_train + n_val..])),
    ))
}
