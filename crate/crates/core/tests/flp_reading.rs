//! Compares the oracle's two-level reading of nested negation with an
//! FLP-reduct evaluation written independently here.

use std::collections::BTreeSet;

use selp_core::gen::{random_elp, rng, two_atom_family, ElpShape};
use selp_core::model::{BodyElement, ElpProgram, Guess, Interpretation, WorldView};
use selp_core::oracle::{enumerate_world_views, OracleConfig};
use selp_core::syntax::{render_elp, Dialect};

#[derive(Clone, Copy)]
enum Lit {
    Pos(usize),
    Not(usize),
    NotNot(usize),
    Top,
    Bottom,
}

fn holds(l: Lit, i: u64) -> bool {
    match l {
        Lit::Pos(a) | Lit::NotNot(a) => i >> a & 1 == 1,
        Lit::Not(a) => i >> a & 1 == 0,
        Lit::Top => true,
        Lit::Bottom => false,
    }
}

fn reduct(p: &ElpProgram, phi: &Guess) -> Vec<(u64, Vec<Lit>)> {
    p.rules
        .iter()
        .map(|r| {
            let head = r.head.iter().fold(0u64, |m, a| m | 1 << a.pos());
            let body = r
                .body
                .iter()
                .map(|b| match *b {
                    BodyElement::Plain(l) if l.negated => Lit::Not(l.atom.pos()),
                    BodyElement::Plain(l) => Lit::Pos(l.atom.pos()),
                    BodyElement::Elit { elit, negated } => {
                        let a = elit.inner.atom.pos();
                        match (phi.contains(&elit), negated, elit.inner.negated) {
                            (true, false, _) => Lit::Top,
                            (true, true, _) => Lit::Bottom,
                            (false, false, false) => Lit::Not(a),
                            (false, false, true) => Lit::NotNot(a),
                            (false, true, false) => Lit::NotNot(a),
                            (false, true, true) => Lit::Not(a),
                        }
                    }
                })
                .collect();
            (head, body)
        })
        .collect()
}

fn model(rules: &[&(u64, Vec<Lit>)], i: u64) -> bool {
    rules.iter().all(|(h, body)| !body.iter().all(|&l| holds(l, i)) || h & i != 0)
}

fn flp_answer_sets(rules: &[(u64, Vec<Lit>)], n: usize) -> BTreeSet<u64> {
    let all: Vec<&(u64, Vec<Lit>)> = rules.iter().collect();
    (0..1u64 << n)
        .filter(|&m| {
            if !model(&all, m) {
                return false;
            }
            let kept: Vec<&(u64, Vec<Lit>)> = rules.iter().filter(|(_, b)| b.iter().all(|&l| holds(l, m))).collect();
            let mut sub = m;
            while sub != 0 {
                sub = (sub - 1) & m;
                if model(&kept, sub) {
                    return false;
                }
            }
            true
        })
        .collect()
}

fn flp_world_views(p: &ElpProgram) -> Vec<WorldView> {
    let elits = p.elits();
    let n = p.atoms.len();
    let mut out = Vec::new();
    for mask in 0..1u64 << elits.len() {
        let phi = Guess::from_mask(&elits, mask);
        let sets = flp_answer_sets(&reduct(p, &phi), n);
        if sets.is_empty() {
            continue;
        }
        let ok = elits.iter().all(|e| {
            let a = e.inner.atom.pos();
            let some_false = sets.iter().any(|m| (m >> a & 1 == 1) == e.inner.negated);
            some_false == phi.contains(e)
        });
        if ok {
            let answer_sets = sets.iter().map(|&m| Interpretation::from_mask(m)).collect();
            out.push(WorldView { guess: phi, answer_sets });
        }
    }
    out
}

fn divergences(programs: impl IntoIterator<Item = ElpProgram>) -> Vec<String> {
    programs
        .into_iter()
        .filter(|p| enumerate_world_views(p, &OracleConfig::default()).unwrap() != flp_world_views(p))
        .map(|p| render_elp(&p, Dialect::Not))
        .collect()
}

#[test]
fn readings_agree_on_two_atom_family() {
    let diff = divergences(two_atom_family());
    assert!(diff.is_empty(), "{} divergent programs, first:\n{}", diff.len(), diff[0]);
}

#[test]
fn readings_agree_on_random_programs() {
    let mut r = rng(21);
    let shape = ElpShape { max_atoms: 5, max_rules: 6, ..ElpShape::default() };
    let diff = divergences((0..400).map(|_| random_elp(&mut r, &shape)));
    assert!(diff.is_empty(), "{} divergent programs, first:\n{}", diff.len(), diff[0]);
}
