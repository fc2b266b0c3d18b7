use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use serde::{Deserialize, Serialize};

use super::features::{sentence_features, FeatureVector, FEATURE_TEMPLATE_VERSION};
use super::viterbi::{viterbi_decode, Emissions, Transitions};
use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;
use crate::sentence::{TaggedSentence, Token};
use crate::tag::NUM_TAGS;

/// Provenance recorded with a trained model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModelMetadata {
    pub seed: u64,
    pub epochs_run: usize,
    pub best_epoch: usize,
    pub corpus_fingerprint: u64,
    pub validation_accuracy: f64,
    /// Validation token accuracy after each epoch.
    pub history: Vec<f64>,
}

/// Linear-chain model: per-feature emission weights for each tag plus
/// tag-to-tag transition weights.
#[derive(Debug, Clone)]
pub struct TaggerModel {
    index: HashMap<String, u32>,
    features: Vec<String>,
    emission: Vec<Emissions>,
    pub transitions: Transitions,
    pub feature_template_version: u32,
    pub metadata: ModelMetadata,
}

impl TaggerModel {
    /// An all-zero model (decodes everything as `O`).
    pub fn empty() -> Self {
        TaggerModel {
            index: HashMap::new(),
            features: Vec::new(),
            emission: Vec::new(),
            transitions: [[0.0; NUM_TAGS]; NUM_TAGS],
            feature_template_version: FEATURE_TEMPLATE_VERSION,
            metadata: ModelMetadata::default(),
        }
    }

    /// Rebuild from stored weight rows. Duplicate feature names are rejected.
    pub fn from_parts<I>(
        rows: I,
        transitions: Transitions,
        feature_template_version: u32,
        metadata: ModelMetadata,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Emissions)>,
    {
        let mut m = TaggerModel { transitions, feature_template_version, metadata, ..TaggerModel::empty() };
        for (name, w) in rows {
            if m.index.contains_key(&name) {
                return Err(Error::InvalidConfig(alloc::format!("duplicate feature {name:?}")));
            }
            m.index.insert(name.clone(), m.features.len() as u32);
            m.features.push(name);
            m.emission.push(w);
        }
        Ok(m)
    }

    pub(crate) fn from_interned(
        features: Vec<String>,
        emission: Vec<Emissions>,
        transitions: Transitions,
        metadata: ModelMetadata,
    ) -> Self {
        let index = features.iter().enumerate().map(|(i, f)| (f.clone(), i as u32)).collect();
        TaggerModel {
            index,
            features,
            emission,
            transitions,
            feature_template_version: FEATURE_TEMPLATE_VERSION,
            metadata,
        }
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    pub fn feature_weights(&self, feature: &str) -> Option<&Emissions> {
        self.index.get(feature).map(|&i| &self.emission[i as usize])
    }

    /// Non-zero weight rows sorted by feature name; the canonical order for
    /// persistence.
    pub fn rows(&self) -> Vec<(&str, &Emissions)> {
        let mut rows: Vec<(&str, &Emissions)> = self
            .features
            .iter()
            .zip(&self.emission)
            .filter(|(_, w)| w.iter().any(|x| *x != 0.0))
            .map(|(f, w)| (f.as_str(), w))
            .collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(b.0));
        rows
    }

    pub fn emissions(&self, features: &[FeatureVector]) -> Vec<Emissions> {
        features
            .iter()
            .map(|fv| {
                let mut e = [0.0; NUM_TAGS];
                for f in fv.iter() {
                    if let Some(w) = self.feature_weights(f) {
                        for (acc, x) in e.iter_mut().zip(w) {
                            *acc += x;
                        }
                    }
                }
                e
            })
            .collect()
    }

    pub fn check_version(&self) -> Result<()> {
        if self.feature_template_version != FEATURE_TEMPLATE_VERSION {
            return Err(Error::FeatureVersionMismatch {
                found: self.feature_template_version,
                expected: FEATURE_TEMPLATE_VERSION,
            });
        }
        Ok(())
    }
}

/// Models are equal when their non-zero weights, transitions, version and
/// metadata agree; feature interning order is irrelevant.
impl PartialEq for TaggerModel {
    fn eq(&self, other: &Self) -> bool {
        self.transitions == other.transitions
            && self.feature_template_version == other.feature_template_version
            && self.metadata == other.metadata
            && self.rows() == other.rows()
    }
}

/// Tag a token sequence; the output is BIO-valid by construction.
pub fn tag(model: &TaggerModel, tokens: &[Token], g: &Gazetteer) -> Result<TaggedSentence> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    model.check_version()?;
    let features = sentence_features(tokens, g);
    let tags = viterbi_decode(&model.emissions(&features), &model.transitions)?;
    TaggedSentence::new(tokens.to_vec(), tags)
}
