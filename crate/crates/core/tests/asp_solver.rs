use proptest::prelude::*;
use selp_core::asp::{answer_sets, GroundProgram, GroundRule};

type Raw = Vec<(Vec<u32>, Vec<u32>, Vec<u32>)>;

fn satisfies(rules: &Raw, m: u32, reduct_of: Option<u32>) -> bool {
    let t = |a: u32, s: u32| s >> a & 1 == 1;
    rules.iter().all(|(h, p, n)| {
        let neg_ok = match reduct_of {
            Some(r) => n.iter().all(|a| !t(*a, r)),
            None => n.iter().all(|a| !t(*a, m)),
        };
        !(neg_ok && p.iter().all(|a| t(*a, m))) || h.iter().any(|a| t(*a, m))
    })
}

/// Answer sets by definition: models whose reduct has no smaller model.
fn brute(n: u32, rules: &Raw) -> Vec<u32> {
    (0..1u32 << n)
        .filter(|&m| satisfies(rules, m, None))
        .filter(|&m| (0..m).filter(|s| s & m == *s && *s != m).all(|s| !satisfies(rules, s, Some(m))))
        .collect()
}

fn rule(n: u32) -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<u32>)> {
    let atoms = proptest::collection::vec(0..n, 0..3);
    (atoms.clone(), atoms.clone(), atoms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]
    #[test]
    fn solver_matches_definition(rules in proptest::collection::vec(rule(5), 0..8)) {
        let names: Vec<String> = (0..5).map(|i| format!("a{i}")).collect();
        let g = GroundProgram::propositional(
            &names,
            rules.iter().map(|(h, p, q)| GroundRule::new(h.clone(), p.clone(), q.clone())).collect(),
        );
        let mut got: Vec<u32> = answer_sets(&g, 0)
            .unwrap()
            .into_iter()
            .map(|s| s.iter().map(|a| {
                let i: u32 = g.atom_text(*a)[1..].parse().unwrap();
                1u32 << i
            }).sum())
            .collect();
        got.sort();
        prop_assert_eq!(got, brute(5, &rules));
    }
}
