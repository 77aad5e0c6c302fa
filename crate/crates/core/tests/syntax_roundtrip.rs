use proptest::prelude::*;
use selp_core::gen::{random_elp, rng, ElpShape};
use selp_core::oracle::{enumerate_world_views, OracleConfig};
use selp_core::syntax::{parse_easp, parse_witness_json, render_elp, render_witness_json, Dialect};

/// Random programs without the empty rule, which has no textual form.
fn textual(seed: u64) -> selp_core::model::ElpProgram {
    let mut p = random_elp(&mut rng(seed), &ElpShape::default());
    p.rules.retain(|r| !(r.head.is_empty() && r.body.is_empty()));
    p
}

fn view_names(p: &selp_core::model::ElpProgram) -> Vec<Vec<Vec<String>>> {
    let mut out: Vec<Vec<Vec<String>>> = enumerate_world_views(p, &OracleConfig::default())
        .unwrap()
        .iter()
        .map(|wv| {
            let mut sets: Vec<Vec<String>> = wv
                .answer_sets
                .iter()
                .map(|m| {
                    let mut names: Vec<String> = m.iter().map(|a| p.atom_name(a).to_owned()).collect();
                    names.sort();
                    names
                })
                .collect();
            sets.sort();
            sets
        })
        .collect();
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_then_parse_is_stable(seed in any::<u64>(), km in any::<bool>()) {
        let dialect = if km { Dialect::Km } else { Dialect::Not };
        let p = textual(seed);
        let text = render_elp(&p, dialect);
        let back = parse_easp(&text, dialect).unwrap();
        prop_assert_eq!(render_elp(&back, dialect), text.clone());
        let other = if km { Dialect::Not } else { Dialect::Km };
        let converted = parse_easp(&render_elp(&back, other), other).unwrap();
        prop_assert_eq!(render_elp(&converted, dialect), text);
    }

    #[test]
    fn reparsed_program_has_same_world_views(seed in any::<u64>()) {
        let p = textual(seed);
        let used: std::collections::BTreeSet<_> = p.rules.iter().flat_map(|r| r.occurrences()).collect();
        prop_assume!(used.len() == p.atoms.len());
        let back = parse_easp(&render_elp(&p, Dialect::Not), Dialect::Not).unwrap();
        prop_assert_eq!(view_names(&back), view_names(&p));
    }

    #[test]
    fn witness_json_roundtrip(sets in proptest::collection::vec(
        proptest::collection::vec("[a-z][a-z0-9_]{0,4}(\\(([a-z][a-z0-9]{0,2}|[1-9][0-9]?)(,[1-9][0-9]?)?\\))?", 0..5), 0..6)) {
        let back = parse_witness_json(&render_witness_json(&sets)).unwrap();
        prop_assert_eq!(back.witnesses, sets);
    }
}
