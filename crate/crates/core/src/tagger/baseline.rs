//! Gazetteer-and-digits rule tagger, used as a baseline and for error
//! analysis.

use alloc::vec::Vec;

use crate::gazetteer::{CaseMode, Gazetteer, NameKind};
use crate::sentence::{TaggedSentence, Token};
use crate::tag::{EntityType, Tag};

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn house_number_like(s: &str) -> bool {
    all_digits(s) || s.split_once('/').is_some_and(|(a, b)| all_digits(a) && all_digits(b))
}

/// Tag by rules: longest gazetteer phrase (municipality wins equal-length
/// ties), then postcodes (`#####` or `### ##`), then house numbers, else `O`.
///
/// Returns `None` only for empty input.
pub fn rule_baseline(tokens: &[Token], g: &Gazetteer) -> Option<TaggedSentence> {
    let n = tokens.len();
    let mut tags: Vec<Tag> = alloc::vec![Tag::O; n];
    let mut i = 0;
    while i < n {
        let m = g.lookup_phrase(NameKind::Municipality, tokens, i, CaseMode::Insensitive);
        let s = g.lookup_phrase(NameKind::Street, tokens, i, CaseMode::Insensitive);
        let t = tokens[i].as_str();
        let (kind, len) = if m > 0 && m >= s {
            (EntityType::Municipality, m)
        } else if s > 0 {
            (EntityType::Street, s)
        } else if t.len() == 5 && all_digits(t) {
            (EntityType::Postcode, 1)
        } else if t.len() == 3
            && all_digits(t)
            && tokens.get(i + 1).is_some_and(|next| next.len() == 2 && all_digits(next))
        {
            (EntityType::Postcode, 2)
        } else if house_number_like(t) {
            (EntityType::Housenumber, 1)
        } else {
            i += 1;
            continue;
        };
        tags[i] = kind.begin();
        for tag in &mut tags[i + 1..i + len] {
            *tag = kind.inside();
        }
        i += len;
    }
    TaggedSentence::new(tokens.to_vec(), tags).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentence::tokenize;
    use Tag::*;

    fn g() -> Gazetteer {
        Gazetteer::new(
            ["Záhumenská", "Hlavná", "Bauerová", "Nábrežie mládeže", "Trnavská"],
            ["Stupava", "Košice", "Banská Bystrica", "Trnavská"],
        )
    }

    fn run(text: &str) -> Vec<Tag> {
        rule_baseline(&tokenize(text), &g()).unwrap().tags().to_vec()
    }

    #[test]
    fn published_examples() {
        assert_eq!(run("Stupava Záhumenská 834"), [BMunicipality, BStreet, BHousenumber]);
        assert_eq!(run("Košice Hlavná 7"), [BMunicipality, BStreet, BHousenumber]);
        assert_eq!(run("Ďalšie bauerová 44 Košice"), [O, BStreet, BHousenumber, BMunicipality]);
    }

    #[test]
    fn postcodes_and_noise() {
        assert_eq!(run("841 04"), [BPostcode, IPostcode]);
        assert_eq!(run("84104"), [BPostcode]);
        assert_eq!(run("ehm no"), [O, O]);
        assert_eq!(run("834/12"), [BHousenumber]);
    }

    #[test]
    fn longest_match_and_municipality_ties() {
        assert_eq!(run("Banská Bystrica Nábrežie mládeže 3"), [BMunicipality, IMunicipality, BStreet, IStreet, BHousenumber]);
        assert_eq!(run("Trnavská"), [BMunicipality]);
        assert!(rule_baseline(&[], &g()).is_none());
    }
}
