use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use selp_core::asp::{
    ground, project_answer_sets, GroundBudget, NonGroundAtom, NonGroundProgram, NonGroundRule, Signature, Term,
};
use selp_core::gen::{chain_elp, random_elp, random_graph, rng, ElpShape};
use selp_core::graph::td_from_order;
use selp_core::model::ElpProgram;
use selp_core::reduction::{
    atom_vars, b_red, b_ss_naive, b_ss_td, build_facts, build_guess, flatten_or, reduce, BssMode, Context,
    ReductionOptions,
};
use selp_core::syntax::parse_easp_not;

fn solutions(extra: Vec<NonGroundRule>, conj: &[NonGroundAtom], vars: Vec<Term>) -> BTreeSet<String> {
    let mut rules = build_facts(&ElpProgram::default());
    rules.extend(extra);
    let arity = vars.len();
    rules.push(NonGroundRule::new(vec![NonGroundAtom::new("s", vars)], conj.to_vec(), vec![]));
    let g = ground(&NonGroundProgram::new(rules), &GroundBudget::default()).unwrap();
    let mut sets = project_answer_sets(&g, &[Signature::new("s", arity)], 0).unwrap();
    assert_eq!(sets.len(), 1);
    sets.remove(0)
}

fn subset_pairs(n: usize) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for x in 0..1u32 << n {
        let mut y = x;
        loop {
            if y != x {
                let bits = |m: u32| (0..n).map(move |i| (m >> i & 1).to_string());
                let args: Vec<String> = bits(x).chain(bits(y)).collect();
                out.insert(format!("s({})", args.join(",")));
            }
            if y == 0 {
                break;
            }
            y = (y - 1) & x;
        }
    }
    out
}

fn xy(n: usize) -> (Vec<Term>, Vec<Term>, Vec<Term>) {
    let (x, y) = (atom_vars("X", n), atom_vars("Y", n));
    let all = x.iter().chain(&y).cloned().collect();
    (x, y, all)
}

#[test]
fn naive_subset_check_is_strict_subset() {
    for n in 1..=4 {
        let (x, y, all) = xy(n);
        assert_eq!(solutions(vec![], &b_ss_naive(&x, &y).unwrap(), all), subset_pairs(n));
    }
}

#[test]
fn td_subset_check_matches_on_random_decompositions() {
    let mut r = rng(41);
    for n in 1..=4 {
        let (x, y, all) = xy(n);
        let want = subset_pairs(n);
        for _ in 0..12 {
            let g = random_graph(&mut r, n, 0.5);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut r);
            let td = td_from_order(&g, &order);
            assert_eq!(solutions(vec![], &b_ss_td(&x, &y, &td).unwrap(), all.clone()), want, "{td:?}");
        }
    }
}

#[test]
fn flattened_or_is_disjunction() {
    let args: Vec<Term> = (1..=5).map(|i| Term::var(format!("A{i}"))).collect();
    let mut conj = flatten_or(&args, Term::var("Z"), "H");
    let bool_dom: Vec<NonGroundRule> =
        (0..2).map(|v| NonGroundRule::fact(NonGroundAtom::new("b", vec![Term::Int(v)]))).collect();
    conj.extend(args.iter().map(|a| NonGroundAtom::new("b", vec![a.clone()])));
    let mut vars = args.clone();
    vars.push(Term::var("Z"));
    let got = solutions(bool_dom, &conj, vars);
    let want: BTreeSet<String> = (0..32u32)
        .map(|m| {
            let bits: Vec<String> = (0..5).map(|i| (m >> i & 1).to_string()).collect();
            format!("s({},{})", bits.join(","), u32::from(m != 0))
        })
        .collect();
    assert_eq!(got, want);
}

#[test]
fn minimality_block_rejects_the_only_answer_set() {
    // Under the guess {$not$ q} the reduct is {p. q :- not p.} with answer set {p};
    // no proper subset of {p} models it.
    let p = parse_easp_not("p :- $not$ q.\nq :- $not$ p.").unwrap();
    let mut extra = vec![NonGroundRule::fact(NonGroundAtom::new("g", vec![Term::sym("q"), Term::Int(1)]))];
    extra.push(NonGroundRule::fact(NonGroundAtom::new("g", vec![Term::sym("p"), Term::Int(0)])));
    extra.push(NonGroundRule::fact(NonGroundAtom::new("v_check1", vec![Term::sym("p"), Term::Int(1)])));
    extra.push(NonGroundRule::fact(NonGroundAtom::new("v_check1", vec![Term::sym("q"), Term::Int(0)])));
    let red = b_red(Context::Check1, &p, None).unwrap();
    assert!(solutions(extra, &red, vec![Term::var("Y1"), Term::var("Y2")]).is_empty());
}

#[test]
fn guess_rule_grounds_to_one_rule_per_literal() {
    let p = parse_easp_not("p :- $not$ q.\nq :- $not$ p.").unwrap();
    let mut rules = build_facts(&p);
    rules.push(build_guess());
    let g = ground(&NonGroundProgram::new(rules), &GroundBudget::default()).unwrap();
    assert_eq!(g.rules().iter().filter(|r| r.head.len() == 2).count(), 2);
}

#[test]
fn size_grows_linearly_in_chain_length() {
    let sizes: Vec<usize> =
        (4..=12).map(|n| reduce(&chain_elp(n, 2, 1), &ReductionOptions::default()).unwrap().symbol_count()).collect();
    let steps: Vec<i64> = sizes.windows(2).map(|w| w[1] as i64 - w[0] as i64).collect();
    assert!(steps.windows(2).all(|w| w[0] == w[1]), "{steps:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn arity_and_size_bounds(seed in any::<u64>(), td in any::<bool>()) {
        let shape = ElpShape { max_atoms: 8, max_rules: 10, max_elits: 5, ..ElpShape::default() };
        let p = random_elp(&mut rng(seed), &shape);
        let bss = if td { BssMode::TdGuided } else { BssMode::Naive };
        let out = reduce(&p, &ReductionOptions { bss, ..Default::default() }).unwrap();
        prop_assert!(out.max_arity() <= 3);
        let n = p.atoms.len() + p.rules.iter().map(|r| r.head.len() + r.body.len()).sum::<usize>();
        let e = p.elits().len();
        prop_assert!(out.symbol_count() <= 60 * (e * n + n + 10), "{} symbols for e={e} n={n}", out.symbol_count());
    }
}
