//! Versioned JSON model files.
//!
//! Layout: a header object with `format`, `format_version`,
//! `feature_template_version`, `tags` (axis order), `metadata` and
//! `transitions`, and `emissions` as `[feature, [9 weights]]` pairs sorted
//! by feature name. Only non-zero rows are stored. Floats use the shortest
//! round-trip representation, so load∘save is exact and saving the same
//! model twice gives the same bytes.

use std::fs;
use std::path::Path;

use addrtag_core::tagger::{Emissions, ModelMetadata, TaggerModel, Transitions, FEATURE_TEMPLATE_VERSION};
use addrtag_core::Tag;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "addrtag-model";
pub const MODEL_FORMAT_VERSION: u64 = 1;

#[derive(Serialize)]
struct ModelOut<'a> {
    format: &'static str,
    format_version: u64,
    feature_template_version: u32,
    tags: Vec<&'static str>,
    metadata: &'a ModelMetadata,
    transitions: &'a Transitions,
    emissions: Vec<(&'a str, &'a Emissions)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelIn {
    format: String,
    // checked on the raw value before deserializing
    #[serde(rename = "format_version")]
    _format_version: u64,
    feature_template_version: u32,
    tags: Vec<String>,
    metadata: ModelMetadata,
    transitions: Transitions,
    emissions: Vec<(String, Emissions)>,
}

pub fn model_to_string(model: &TaggerModel) -> String {
    let out = ModelOut {
        format: MODEL_FORMAT,
        format_version: MODEL_FORMAT_VERSION,
        feature_template_version: model.feature_template_version,
        tags: Tag::ALL.iter().map(|t| t.as_str()).collect(),
        metadata: &model.metadata,
        transitions: &model.transitions,
        emissions: model.rows(),
    };
    let mut s = serde_json::to_string(&out).expect("model weights are finite");
    s.push('\n');
    s
}

pub fn model_from_str(text: &str, path: &Path) -> Result<TaggerModel> {
    let corrupt = |reason: String| Error::CorruptModel { path: path.to_path_buf(), reason };
    // check the version before the schema so newer files get a clear message
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| corrupt(e.to_string()))?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| corrupt("missing format_version".into()))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            what: "model format",
            found: version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let m: ModelIn = serde_json::from_value(value).map_err(|e| corrupt(e.to_string()))?;
    if m.format != MODEL_FORMAT {
        return Err(corrupt(format!("format is {:?}, expected {MODEL_FORMAT:?}", m.format)));
    }
    let expected_tags: Vec<&str> = Tag::ALL.iter().map(|t| t.as_str()).collect();
    if m.tags != expected_tags {
        return Err(corrupt("tag axis differs from the 9-tag order".into()));
    }
    if m.feature_template_version != FEATURE_TEMPLATE_VERSION {
        return Err(Error::VersionMismatch {
            path: path.to_path_buf(),
            what: "feature template",
            found: m.feature_template_version.into(),
            expected: FEATURE_TEMPLATE_VERSION.into(),
        });
    }
    TaggerModel::from_parts(m.emissions, m.transitions, m.feature_template_version, m.metadata)
        .map_err(|e| corrupt(e.to_string()))
}

pub fn save_model(model: &TaggerModel, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, model_to_string(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<TaggerModel> {
    let text = crate::corpus_io::read_utf8(path)?;
    model_from_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use addrtag_core::tagger::{tag, train, TrainConfig};
    use addrtag_core::{tokenize, Corpus, Gazetteer, TaggedSentence};

    fn model() -> (TaggerModel, Gazetteer) {
        let g = Gazetteer::new(["Hlavná", "Nábrežie mládeže"], ["Košice", "Banská Bystrica"]);
        let s = |p: &[(&str, &str)]| TaggedSentence::from_pairs(p.iter().copied()).unwrap();
        let c = Corpus::new(
            "t",
            vec![
                s(&[("Košice", "B-Municipality"), ("Hlavná", "B-Street"), ("7", "B-Housenumber")]),
                s(&[("ehm", "O"), ("Nábrežie", "B-Street"), ("mládeže", "I-Street"), ("841", "B-Postcode"), ("04", "I-Postcode")]),
            ],
        );
        (train(&c, &c, &g, &TrainConfig::default()).unwrap(), g)
    }

    #[test]
    fn round_trip_is_exact() {
        let (m, g) = model();
        let text = model_to_string(&m);
        let back = model_from_str(&text, Path::new("m.json")).unwrap();
        assert_eq!(back, m);
        assert_eq!(model_to_string(&back), text);
        let toks = tokenize("Košice Hlavná 7");
        assert_eq!(tag(&back, &toks, &g).unwrap(), tag(&m, &toks, &g).unwrap());
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let text = model_to_string(&model().0);
        let cut = &text[..text.len() / 2];
        assert!(matches!(model_from_str(cut, Path::new("m.json")), Err(Error::CorruptModel { .. })));
        assert!(matches!(model_from_str("", Path::new("m.json")), Err(Error::CorruptModel { .. })));
    }

    #[test]
    fn unknown_versions_are_refused() {
        let text = model_to_string(&model().0);
        let v99 = text.replacen("\"format_version\":1", "\"format_version\":99", 1);
        match model_from_str(&v99, Path::new("m.json")) {
            Err(Error::VersionMismatch { found: 99, expected: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let f2 = text.replacen("\"feature_template_version\":1", "\"feature_template_version\":2", 1);
        assert!(matches!(model_from_str(&f2, Path::new("m.json")), Err(Error::VersionMismatch { found: 2, .. })));
    }

    #[test]
    fn header_fields() {
        let text = model_to_string(&model().0);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["format"], MODEL_FORMAT);
        assert_eq!(v["tags"][1], "B-Street");
        assert_eq!(v["transitions"].as_array().unwrap().len(), 9);
        let rows = v["emissions"].as_array().unwrap();
        let names: Vec<&str> = rows.iter().map(|r| r[0].as_str().unwrap()).collect();
        assert!(names.windows(2).all(|w| w[0] < w[1]));
    }
}
