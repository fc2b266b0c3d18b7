//! Spoken-language fillers injected as `O` tokens.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};

const DEFAULT_FILLERS: &[&str] = &[
    "ehm",
    "hm",
    "hmm",
    "eee",
    "no",
    "takže",
    "ďalšie",
    "moment",
    "počkajte",
    "vlastne",
    "teda",
    "áno",
    "aha",
    "proste",
    "tak",
    "ako",
    "viete",
    "neviem",
    "ešte",
    "dobre",
    "okej",
    "no takže",
    "ehm no",
    "moment prosím",
    "počkajte chvíľu",
    "ja neviem",
    "to je",
    "no tak",
    "ako sa to",
    "prepáčte",
];

/// Filler phrases; each word becomes its own `O` token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoiseLexicon {
    fillers: Vec<Vec<String>>,
}

impl NoiseLexicon {
    pub fn new(fillers: Vec<Vec<String>>) -> Result<Self> {
        let fillers: Vec<Vec<String>> = fillers
            .into_iter()
            .map(|f| {
                f.iter()
                    .flat_map(|w| w.split_whitespace())
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
            })
            .filter(|f| !f.is_empty())
            .collect();
        if fillers.is_empty() {
            return Err(Error::InvalidConfig("noise lexicon is empty".into()));
        }
        Ok(NoiseLexicon { fillers })
    }

    pub fn len(&self) -> usize {
        self.fillers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fillers.is_empty()
    }

    pub fn fillers(&self) -> &[Vec<String>] {
        &self.fillers
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&[String]> {
        if self.fillers.is_empty() {
            return Err(Error::InvalidConfig("noise lexicon is empty".into()));
        }
        Ok(&self.fillers[rng.gen_range(0..self.fillers.len())])
    }
}

impl Default for NoiseLexicon {
    fn default() -> Self {
        NoiseLexicon {
            fillers: DEFAULT_FILLERS
                .iter()
                .map(|f| f.split(' ').map(ToString::to_string).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn default_lexicon_size() {
        let l = NoiseLexicon::default();
        assert_eq!(l.len(), 30);
        assert!(l.fillers().iter().any(|f| f == &["ďalšie"]));
    }

    #[test]
    fn multi_word_fillers_split() {
        let l = NoiseLexicon::new(vec![vec!["no takže".into()], vec![]]).unwrap();
        assert_eq!(l.fillers(), [vec!["no".to_string(), "takže".to_string()]]);
        assert!(NoiseLexicon::new(vec![vec![" ".into()]]).is_err());
    }
}
