//! Averaged structured perceptron training with validation-based early
//! stopping.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::features::sentence_features;
use super::model::{ModelMetadata, TaggerModel};
use super::viterbi::{viterbi_decode, Emissions, Transitions};
use crate::error::{Error, Result};
use crate::gazetteer::Gazetteer;
use crate::sentence::Corpus;
use crate::tag::{Tag, NUM_TAGS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    pub shuffle_each_epoch: bool,
    /// Stop after this many epochs without a validation improvement.
    pub early_stop_patience: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { epochs: 15, seed: 0, shuffle_each_epoch: true, early_stop_patience: 3 }
    }
}

/// A sentence reduced to interned feature ids and gold tag indices.
struct Instance {
    features: Vec<Vec<u32>>,
    gold: Vec<usize>,
}

#[derive(Default)]
struct Interner {
    ids: HashMap<String, u32>,
    names: Vec<String>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(name.into(), id);
        self.names.push(name.into());
        id
    }
}

/// Weights plus the running sums needed for lazy averaging:
/// `avg = w - acc / step`.
struct Weights {
    emission: Vec<Emissions>,
    emission_acc: Vec<Emissions>,
    transitions: Transitions,
    transitions_acc: Transitions,
    step: f64,
}

impl Weights {
    fn new(num_features: usize) -> Self {
        Weights {
            emission: alloc::vec![[0.0; NUM_TAGS]; num_features],
            emission_acc: alloc::vec![[0.0; NUM_TAGS]; num_features],
            transitions: [[0.0; NUM_TAGS]; NUM_TAGS],
            transitions_acc: [[0.0; NUM_TAGS]; NUM_TAGS],
            step: 1.0,
        }
    }

    fn emissions(emission: &[Emissions], inst: &Instance) -> Vec<Emissions> {
        inst.features
            .iter()
            .map(|ids| {
                let mut e = [0.0; NUM_TAGS];
                for &f in ids {
                    for (acc, x) in e.iter_mut().zip(&emission[f as usize]) {
                        *acc += x;
                    }
                }
                e
            })
            .collect()
    }

    fn bump_emission(&mut self, f: u32, tag: usize, delta: f64) {
        self.emission[f as usize][tag] += delta;
        self.emission_acc[f as usize][tag] += self.step * delta;
    }

    fn bump_transition(&mut self, prev: usize, cur: usize, delta: f64) {
        self.transitions[prev][cur] += delta;
        self.transitions_acc[prev][cur] += self.step * delta;
    }

    /// Perceptron step on one instance; returns whether an update happened.
    fn learn(&mut self, inst: &Instance) -> Result<bool> {
        let pred = viterbi_decode(&Self::emissions(&self.emission, inst), &self.transitions)?;
        let pred: Vec<usize> = pred.into_iter().map(Tag::index).collect();
        let mistaken = pred != inst.gold;
        if mistaken {
            for (i, (&g, &p)) in inst.gold.iter().zip(&pred).enumerate() {
                if g != p {
                    for &f in &inst.features[i] {
                        self.bump_emission(f, g, 1.0);
                        self.bump_emission(f, p, -1.0);
                    }
                }
                if i > 0 {
                    let (gp, pp) = (inst.gold[i - 1], pred[i - 1]);
                    if (gp, g) != (pp, p) {
                        self.bump_transition(gp, g, 1.0);
                        self.bump_transition(pp, p, -1.0);
                    }
                }
            }
        }
        self.step += 1.0;
        Ok(mistaken)
    }

    fn averaged(&self) -> (Vec<Emissions>, Transitions) {
        let avg = |w: &[f64; NUM_TAGS], acc: &[f64; NUM_TAGS]| {
            let mut out = [0.0; NUM_TAGS];
            for t in 0..NUM_TAGS {
                out[t] = w[t] - acc[t] / self.step;
            }
            out
        };
        let emission = self.emission.iter().zip(&self.emission_acc).map(|(w, a)| avg(w, a)).collect();
        let transitions = core::array::from_fn(|p| avg(&self.transitions[p], &self.transitions_acc[p]));
        (emission, transitions)
    }
}

fn token_accuracy(emission: &[Emissions], transitions: &Transitions, data: &[Instance]) -> Result<f64> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for inst in data {
        let pred = viterbi_decode(&Weights::emissions(emission, inst), transitions)?;
        correct += pred.iter().zip(&inst.gold).filter(|(p, g)| p.index() == **g).count();
        total += inst.gold.len();
    }
    Ok(if total == 0 { 0.0 } else { correct as f64 / total as f64 })
}

/// Train from scratch.
pub fn train(train: &Corpus, validation: &Corpus, g: &Gazetteer, cfg: &TrainConfig) -> Result<TaggerModel> {
    train_inner(None, train, validation, g, cfg)
}

/// Continue from an existing model's weights. The model must have been
/// trained under the current feature template.
pub fn train_warm(
    initial: &TaggerModel,
    train: &Corpus,
    validation: &Corpus,
    g: &Gazetteer,
    cfg: &TrainConfig,
) -> Result<TaggerModel> {
    initial.check_version()?;
    train_inner(Some(initial), train, validation, g, cfg)
}

fn train_inner(
    initial: Option<&TaggerModel>,
    train: &Corpus,
    validation: &Corpus,
    g: &Gazetteer,
    cfg: &TrainConfig,
) -> Result<TaggerModel> {
    if train.is_empty() || validation.is_empty() {
        return Err(Error::EmptyInput);
    }
    if cfg.epochs == 0 {
        return Err(Error::InvalidConfig("epochs must be at least 1".into()));
    }

    let mut interner = Interner::default();
    if let Some(m) = initial {
        for (name, _) in m.rows() {
            interner.intern(name);
        }
    }
    let train_set: Vec<Instance> = train
        .iter()
        .map(|s| Instance {
            features: sentence_features(s.tokens(), g)
                .iter()
                .map(|fv| fv.iter().map(|f| interner.intern(f)).collect())
                .collect(),
            gold: s.tags().iter().map(|t| t.index()).collect(),
        })
        .collect();
    let val_set: Vec<Instance> = validation
        .iter()
        .map(|s| Instance {
            features: sentence_features(s.tokens(), g)
                .iter()
                .map(|fv| fv.iter().filter_map(|f| interner.ids.get(f.as_str()).copied()).collect())
                .collect(),
            gold: s.tags().iter().map(|t| t.index()).collect(),
        })
        .collect();

    let mut weights = Weights::new(interner.names.len());
    if let Some(m) = initial {
        for (i, name) in interner.names.iter().enumerate() {
            if let Some(w) = m.feature_weights(name) {
                weights.emission[i] = *w;
            }
        }
        weights.transitions = m.transitions;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut best: Option<(f64, usize, Vec<Emissions>, Transitions)> = None;
    let mut history = Vec::new();
    let mut stale = 0;

    for epoch in 1..=cfg.epochs {
        if cfg.shuffle_each_epoch {
            order.shuffle(&mut rng);
        }
        for &i in &order {
            weights.learn(&train_set[i])?;
        }
        let (emission, transitions) = weights.averaged();
        let acc = token_accuracy(&emission, &transitions, &val_set)?;
        history.push(acc);
        if best.as_ref().is_none_or(|b| acc > b.0) {
            best = Some((acc, epoch, emission, transitions));
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.early_stop_patience {
                break;
            }
        }
    }

    let (acc, best_epoch, emission, transitions) = best.expect("at least one epoch ran");
    let metadata = ModelMetadata {
        seed: cfg.seed,
        epochs_run: history.len(),
        best_epoch,
        corpus_fingerprint: train.fingerprint(),
        validation_accuracy: acc,
        history,
    };
    Ok(TaggerModel::from_interned(interner.names, emission, transitions, metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_pattern, GenerationConfig};
    use crate::sentence::TaggedSentence;
    use crate::tagger::tag;
    use alloc::vec;

    fn gaz() -> Gazetteer {
        Gazetteer::new(
            ["Hlavná", "Záhumenská", "Bauerová", "Nábrežie mládeže", "Mlynská", "Školská"],
            ["Košice", "Stupava", "Banská Bystrica", "Trnava", "Žilina", "Nitra"],
        )
    }

    fn pattern_corpus(id: u8, n: usize, seed: u64) -> Corpus {
        generate_pattern(&GenerationConfig::for_pattern(id, n, false, seed).unwrap(), &gaz()).unwrap()
    }

    fn accuracy(model: &TaggerModel, c: &Corpus) -> f64 {
        let mut ok = 0;
        for s in c {
            let p = tag(model, s.tokens(), &gaz()).unwrap();
            ok += p.tags().iter().zip(s.tags()).filter(|(a, b)| a == b).count();
        }
        ok as f64 / c.num_tokens() as f64
    }

    #[test]
    fn fits_small_pattern_one_corpus() {
        let train_c = pattern_corpus(1, 50, 1);
        // validating on the training set makes early stopping track the fit itself
        let m = train(&train_c, &train_c, &gaz(), &TrainConfig { epochs: 15, ..Default::default() }).unwrap();
        assert_eq!(accuracy(&m, &train_c), 1.0);
    }

    #[test]
    fn deterministic() {
        let train_c = pattern_corpus(2, 40, 3);
        let val_c = pattern_corpus(2, 10, 4);
        let cfg = TrainConfig { seed: 77, ..Default::default() };
        let a = train(&train_c, &val_c, &gaz(), &cfg).unwrap();
        let b = train(&train_c, &val_c, &gaz(), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.metadata.corpus_fingerprint, train_c.fingerprint());
    }

    #[test]
    fn separable_toy_corpus_reaches_full_accuracy() {
        // disjoint vocabularies per entity type
        let mk = |pairs: &[(&str, &str)]| TaggedSentence::from_pairs(pairs.iter().copied()).unwrap();
        let sents = vec![
            mk(&[("alfa", "B-Street"), ("beta", "B-Housenumber"), ("gama", "B-Municipality")]),
            mk(&[("gama", "B-Municipality"), ("alfa", "B-Street"), ("beta", "B-Housenumber")]),
            mk(&[("delta", "O"), ("alfa", "B-Street"), ("omega", "B-Postcode"), ("psi", "I-Postcode")]),
            mk(&[("beta", "B-Housenumber"), ("delta", "O"), ("gama", "B-Municipality")]),
        ];
        let c = Corpus::new("toy", sents);
        let empty = Gazetteer::default();
        let m = train(&c, &c, &empty, &TrainConfig::default()).unwrap();
        for s in &c {
            assert_eq!(tag(&m, s.tokens(), &empty).unwrap().tags(), s.tags());
        }
    }

    #[test]
    fn returns_best_epoch_model() {
        let train_c = pattern_corpus(3, 60, 5);
        let val_c = pattern_corpus(1, 30, 6);
        let cfg = TrainConfig { epochs: 12, early_stop_patience: 2, ..Default::default() };
        let m = train(&train_c, &val_c, &gaz(), &cfg).unwrap();
        let md = &m.metadata;
        let best = md.history.iter().cloned().fold(f64::MIN, f64::max);
        assert_eq!(md.validation_accuracy, best);
        assert_eq!(md.history[md.best_epoch - 1], best);
        // the first epoch reaching the maximum is the one kept
        assert!(md.history[..md.best_epoch - 1].iter().all(|&a| a < best));
        assert!(md.epochs_run <= md.best_epoch + 2);
    }

    #[test]
    fn errors() {
        let c = pattern_corpus(4, 5, 1);
        let empty = Corpus::default();
        assert_eq!(train(&empty, &c, &gaz(), &TrainConfig::default()), Err(Error::EmptyInput));
        assert_eq!(train(&c, &empty, &gaz(), &TrainConfig::default()), Err(Error::EmptyInput));
        let cfg = TrainConfig { epochs: 0, ..Default::default() };
        assert!(train(&c, &c, &gaz(), &cfg).is_err());
        let mut m = TaggerModel::empty();
        m.feature_template_version = 99;
        assert_eq!(
            train_warm(&m, &c, &c, &gaz(), &TrainConfig::default()),
            Err(Error::FeatureVersionMismatch { found: 99, expected: 1 })
        );
    }

    #[test]
    fn warm_start_keeps_learning() {
        let train_c = pattern_corpus(2, 40, 8);
        let val_c = pattern_corpus(2, 10, 9);
        let cfg = TrainConfig { epochs: 2, ..Default::default() };
        let first = train(&train_c, &val_c, &gaz(), &cfg).unwrap();
        let second = train_warm(&first, &train_c, &val_c, &gaz(), &cfg).unwrap();
        assert!(second.metadata.validation_accuracy >= 0.9);
    }
}
