//! Linear-chain sequence labeler: feature extraction, constrained Viterbi
//! decoding, averaged-perceptron training, and a rule-based baseline.

mod baseline;
pub mod features;
mod model;
mod perceptron;
pub mod viterbi;

pub use baseline::rule_baseline;
pub use features::{extract_features, sentence_features, FeatureVector, FEATURE_TEMPLATE_VERSION};
pub use model::{tag, ModelMetadata, TaggerModel};
pub use perceptron::{train, train_warm, TrainConfig};
pub use viterbi::{path_score, viterbi_decode, Emissions, Transitions};
