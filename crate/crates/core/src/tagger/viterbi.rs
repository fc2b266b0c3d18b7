//! Constrained first-order Viterbi decoding over the nine tags.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::tag::{Tag, NUM_TAGS};

pub type Emissions = [f64; NUM_TAGS];
pub type Transitions = [[f64; NUM_TAGS]; NUM_TAGS];

/// Highest-scoring BIO-valid tag sequence under
/// `Σ emission(i, tag_i) + Σ transition(tag_{i-1}, tag_i)`.
///
/// Sequences starting with `I-X`, or entering `I-X` from anything but
/// `B-X`/`I-X`, are never considered. Ties go to the lower tag index.
pub fn viterbi_decode(emissions: &[Emissions], transitions: &Transitions) -> Result<Vec<Tag>> {
    if emissions.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, row) in emissions.iter().enumerate() {
        if row.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFiniteScore(i));
        }
    }
    if transitions.iter().flatten().any(|s| !s.is_finite()) {
        return Err(Error::NonFiniteScore(0));
    }

    let len = emissions.len();
    let mut score = [f64::NEG_INFINITY; NUM_TAGS];
    for t in Tag::ALL {
        if t.may_follow(None) {
            score[t.index()] = emissions[0][t.index()];
        }
    }
    let mut back: Vec<[u8; NUM_TAGS]> = Vec::with_capacity(len.saturating_sub(1));
    for row in &emissions[1..] {
        let mut next = [f64::NEG_INFINITY; NUM_TAGS];
        let mut bp = [0u8; NUM_TAGS];
        for cur in Tag::ALL {
            let mut best = f64::NEG_INFINITY;
            let mut best_prev = None;
            for prev in Tag::ALL {
                if score[prev.index()] == f64::NEG_INFINITY || !cur.may_follow(Some(prev)) {
                    continue;
                }
                let s = score[prev.index()] + transitions[prev.index()][cur.index()];
                if best_prev.is_none() || s > best {
                    best = s;
                    best_prev = Some(prev);
                }
            }
            if let Some(p) = best_prev {
                next[cur.index()] = best + row[cur.index()];
                bp[cur.index()] = p as u8;
            }
        }
        score = next;
        back.push(bp);
    }

    let mut last = 0;
    for t in 1..NUM_TAGS {
        if score[t] > score[last] {
            last = t;
        }
    }
    let mut path = Vec::with_capacity(len);
    path.push(last);
    for bp in back.iter().rev() {
        last = usize::from(bp[last]);
        path.push(last);
    }
    path.reverse();
    Ok(path.into_iter().map(|i| Tag::ALL[i]).collect())
}

/// Score of a given path; no validity check.
pub fn path_score(emissions: &[Emissions], transitions: &Transitions, tags: &[Tag]) -> f64 {
    let mut s = 0.0;
    for (i, t) in tags.iter().enumerate() {
        if i > 0 {
            s += transitions[tags[i - 1].index()][t.index()];
        }
        s += emissions[i][t.index()];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentence::validate_bio;
    use alloc::vec;

    const ZERO_T: Transitions = [[0.0; NUM_TAGS]; NUM_TAGS];

    #[test]
    fn single_position_picks_start_legal_argmax() {
        let mut e = [0.0; NUM_TAGS];
        e[Tag::IStreet.index()] = 10.0;
        e[Tag::BPostcode.index()] = 3.0;
        assert_eq!(viterbi_decode(&[e], &ZERO_T).unwrap(), [Tag::BPostcode]);
    }

    #[test]
    fn all_zero_is_all_outside() {
        let e = vec![[0.0; NUM_TAGS]; 4];
        assert_eq!(viterbi_decode(&e, &ZERO_T).unwrap(), [Tag::O; 4]);
    }

    #[test]
    fn inside_needs_matching_begin() {
        let mut a = [0.0; NUM_TAGS];
        a[Tag::BMunicipality.index()] = 1.0;
        let mut b = [0.0; NUM_TAGS];
        b[Tag::IStreet.index()] = 5.0;
        b[Tag::IMunicipality.index()] = 4.0;
        let out = viterbi_decode(&[a, b], &ZERO_T).unwrap();
        assert!(validate_bio(&out).is_ok());
        // B-Street I-Street scores 5; B-Municipality I-Municipality scores 5 too,
        // and the tie goes to the lower index at the last position first.
        assert_eq!(out, [Tag::BStreet, Tag::IStreet]);
    }

    #[test]
    fn transitions_matter() {
        let e = vec![[0.0; NUM_TAGS]; 2];
        let mut t = ZERO_T;
        t[Tag::BStreet.index()][Tag::BHousenumber.index()] = 2.0;
        assert_eq!(viterbi_decode(&e, &t).unwrap(), [Tag::BStreet, Tag::BHousenumber]);
        assert_eq!(path_score(&e, &t, &[Tag::BStreet, Tag::BHousenumber]), 2.0);
    }

    #[test]
    fn errors() {
        assert_eq!(viterbi_decode(&[], &ZERO_T), Err(Error::EmptyInput));
        let mut e = [0.0; NUM_TAGS];
        e[2] = f64::NAN;
        assert_eq!(viterbi_decode(&[[0.0; NUM_TAGS], e], &ZERO_T), Err(Error::NonFiniteScore(1)));
    }
}
