use addrtag_core::augment::{parse_response, review_queue, Correction};
use addrtag_core::gazetteer::smoke_gazetteer;
use addrtag_core::generate::render_template;
use addrtag_core::validate_bio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PIECES: &[&str] = &[
    "streetname", "municipalityname", "housenumber", "postcode", "noise", "{streetname},", "bývam", "na", "v",
    "12", "84104", "12/3", "I-Street", "B-Postcode", "O", "adresa/O", "Košice/B-Municipality", "1.", "-", "\"",
];

fn response() -> impl Strategy<Value = String> {
    proptest::collection::vec(proptest::collection::vec(proptest::sample::select(PIECES), 0..7), 0..6)
        .prop_map(|lines| lines.iter().map(|l| l.join(" ")).collect::<Vec<_>>().join("\n"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn accepted_templates_render_bio_valid(text in response(), seed in any::<u64>()) {
        let r = parse_response(&text);
        let nonblank = text.lines().filter(|l| !l.trim().is_empty()).count();
        prop_assert_eq!(r.parsed_templates.len() + r.rejected.len(), nonblank);
        let g = smoke_gazetteer();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in &r.parsed_templates {
            for verbal in [false, true] {
                let s = render_template(t, &g, verbal, &mut rng).unwrap();
                prop_assert!(validate_bio(s.tags()).is_ok());
            }
        }
    }

    #[test]
    fn review_accepts_only_valid_corrections(text in response(), fix in response()) {
        let r = parse_response(&text);
        let corrections: Vec<Correction> = r
            .rejected
            .iter()
            .zip(fix.lines())
            .map(|(rej, f)| Correction { original: rej.line.clone(), corrected: f.to_string() })
            .collect();
        let out = review_queue(&r, &corrections, &[]);
        for t in &out.accepted {
            prop_assert!(parse_response(&t.to_string()).parsed_templates.len() == 1);
        }
        prop_assert!(out.accepted.len() <= corrections.len());
        prop_assert!(review_queue(&r, &[], &[]).accepted.is_empty());
    }
}
