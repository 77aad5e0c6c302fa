use selp_core::asp::GroundBudget;
use selp_core::exec::Parallelism;
use selp_core::gen::{random_qbf, rng};
use selp_core::model::normalize_duplicates;
use selp_core::oracle::{is_consistent, OracleConfig};
use selp_core::qbf::{
    extend, is_restricted, normalize_3cnf, parse_qdimacs_eae, qbf_to_elp, qbf_validity_bruteforce, render_qdimacs,
    split_blocks_random, Qbf3,
};
use selp_core::reduction::{consistent_via_reduction, ReductionOptions};

fn oracle() -> OracleConfig {
    OracleConfig { max_atoms: usize::MAX, max_elits: 24, ..OracleConfig::search() }
}

fn valid(q: &Qbf3) -> bool {
    qbf_validity_bruteforce(q, Parallelism::Sequential).unwrap()
}

#[test]
fn preprocessing_preserves_validity() {
    let mut r = rng(51);
    for _ in 0..300 {
        let q = random_qbf(&mut r, 7, 6);
        let n = normalize_3cnf(&q);
        assert!(n.clauses.iter().all(|c| c.len() <= 3));
        assert_eq!(valid(&n), valid(&q), "{}", render_qdimacs(&q));
        let e = extend(&n);
        assert!(is_restricted(&e).unwrap());
        assert_eq!(valid(&e), valid(&q), "{}", render_qdimacs(&q));
    }
}

#[test]
fn encoding_consistency_is_validity() {
    let mut r = rng(52);
    let (mut yes, mut no) = (0, 0);
    for i in 0..200 {
        let q = random_qbf(&mut r, 6, 5);
        let seed = (i % 3 == 0).then_some(i as u64);
        let effective = seed.map_or_else(|| q.clone(), |s| split_blocks_random(&q, s));
        let expected = valid(&effective);
        let p = qbf_to_elp(&q, seed).unwrap();
        assert_eq!(is_consistent(&p, &oracle()).unwrap(), expected, "{}", render_qdimacs(&effective));
        if expected {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 20 && no > 20, "{yes} valid, {no} invalid");
}

#[test]
fn full_loop_through_the_translation() {
    let mut r = rng(53);
    for _ in 0..8 {
        let q = random_qbf(&mut r, 2, 2);
        let p = normalize_duplicates(&qbf_to_elp(&q, None).unwrap());
        let got = consistent_via_reduction(&p, &ReductionOptions::default(), &GroundBudget::default()).unwrap();
        assert_eq!(got, valid(&q), "{}", render_qdimacs(&q));
    }
}

#[test]
fn qdimacs_roundtrip() {
    let mut r = rng(54);
    for _ in 0..100 {
        let q = random_qbf(&mut r, 8, 6);
        let text = render_qdimacs(&q);
        let back = parse_qdimacs_eae(&text).unwrap();
        assert_eq!(valid(&back), valid(&q));
        assert_eq!(back.clauses.len(), q.clauses.len());
        let again = render_qdimacs(&back);
        assert_eq!(render_qdimacs(&parse_qdimacs_eae(&again).unwrap()), again, "{text}");
    }
}
