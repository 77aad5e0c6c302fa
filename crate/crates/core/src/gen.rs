//! Seeded instance generators for tests, benchmarks and measurements.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asp::{NonGroundAtom, NonGroundRule, Term};
use crate::graph::UGraph;
use crate::model::{AtomId, AtomTable, BodyElement, ElpProgram, ElpRule, EpistemicLiteral, Literal};
use crate::qbf::{Qbf3, QbfLiteral};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn atom_names(n: usize) -> AtomTable {
    (0..n).map(|i| format!("a{}", i + 1)).collect()
}

/// The six body shapes over one atom: `a`, `not a`, and the four
/// epistemic forms.
pub fn body_kinds(a: AtomId) -> [BodyElement; 6] {
    let e = |elit: EpistemicLiteral, negated| BodyElement::Elit { elit, negated };
    [
        BodyElement::Plain(Literal::pos(a)),
        BodyElement::Plain(Literal::neg(a)),
        e(EpistemicLiteral::of_atom(a), false),
        e(EpistemicLiteral::of_negated(a), false),
        e(EpistemicLiteral::of_atom(a), true),
        e(EpistemicLiteral::of_negated(a), true),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ElpShape {
    pub max_atoms: usize,
    pub max_rules: usize,
    pub max_elits: usize,
    pub max_head: usize,
    pub max_body: usize,
}

impl Default for ElpShape {
    fn default() -> Self {
        ElpShape { max_atoms: 4, max_rules: 5, max_elits: 3, max_head: 2, max_body: 3 }
    }
}

/// A random ELP: no atom repeats within a rule and at most
/// `shape.max_elits` distinct epistemic literals occur.
pub fn random_elp(rng: &mut impl Rng, shape: &ElpShape) -> ElpProgram {
    let n = rng.gen_range(1..=shape.max_atoms);
    let atoms = atom_names(n);
    let mut elits: BTreeSet<EpistemicLiteral> = BTreeSet::new();
    let rule_count = rng.gen_range(0..=shape.max_rules);
    let mut rules = Vec::with_capacity(rule_count);
    for _ in 0..rule_count {
        let mut pool: Vec<AtomId> = (1..=n as u32).map(AtomId).collect();
        pool.shuffle(rng);
        let head_len = rng.gen_range(0..=shape.max_head.min(pool.len()));
        let head: Vec<AtomId> = pool.drain(..head_len).collect();
        let body_len = rng.gen_range(0..=shape.max_body.min(pool.len()));
        let mut body = Vec::with_capacity(body_len);
        for a in pool.into_iter().take(body_len) {
            let mut b = body_kinds(a)[rng.gen_range(0..6)];
            if let BodyElement::Elit { elit, .. } = b {
                if !elits.contains(&elit) {
                    if elits.len() >= shape.max_elits {
                        b = body_kinds(a)[rng.gen_range(0..2)];
                    } else {
                        elits.insert(elit);
                    }
                }
            }
            body.push(b);
        }
        rules.push(ElpRule::new(head, body));
    }
    ElpProgram::new(atoms, rules)
}

/// Every single rule over atoms `a1`, `a2` with at most one head atom and at
/// most one body element, plus the bare disjunction `a1 | a2.`; 28 rules.
pub fn two_atom_templates() -> Vec<ElpRule> {
    let (a, b) = (AtomId(1), AtomId(2));
    let mut out = vec![ElpRule::default(), ElpRule::new(vec![a, b], vec![])];
    for x in [a, b] {
        out.extend(body_kinds(x).into_iter().map(|k| ElpRule::new(vec![], vec![k])));
    }
    for (h, other) in [(a, b), (b, a)] {
        out.push(ElpRule::new(vec![h], vec![]));
        out.extend(body_kinds(other).into_iter().map(|k| ElpRule::new(vec![h], vec![k])));
    }
    out
}

/// All programs of at most two template rules (unordered, with repetition).
pub fn two_atom_family() -> Vec<ElpProgram> {
    let t = two_atom_templates();
    let atoms = atom_names(2);
    let mut out = vec![ElpProgram::new(atoms.clone(), vec![])];
    for i in 0..t.len() {
        out.push(ElpProgram::new(atoms.clone(), vec![t[i].clone()]));
        for j in i..t.len() {
            out.push(ElpProgram::new(atoms.clone(), vec![t[i].clone(), t[j].clone()]));
        }
    }
    out
}

/// `c_{k+1} ← c_k` for k = 1..n−1, where the first `e` rules use the body
/// `$not$ c_k` instead. Atom positions are a seeded permutation of chain
/// positions, so the primal graph is a path while atom indices are scattered.
/// Text does not carry positions: parsing a rendering renumbers atoms by
/// first occurrence.
pub fn chain_elp(n: usize, e: usize, seed: u64) -> ElpProgram {
    assert!(n >= 1 && e < n.max(1), "need e < n");
    let mut order: Vec<usize> = (0..n).collect();
    if seed != 0 {
        order.shuffle(&mut rng(seed));
    }
    let mut names = vec![String::new(); n];
    for (chain_pos, &idx) in order.iter().enumerate() {
        names[idx] = format!("c{}", chain_pos + 1);
    }
    let atoms: AtomTable = names.into_iter().collect();
    let id = |k: usize| AtomId(order[k] as u32 + 1);
    let rules = (0..n - 1)
        .map(|k| {
            let body = if k < e {
                BodyElement::Elit { elit: EpistemicLiteral::of_atom(id(k)), negated: false }
            } else {
                BodyElement::Plain(Literal::pos(id(k)))
            };
            ElpRule::new(vec![id(k + 1)], vec![body])
        })
        .collect();
    ElpProgram::new(atoms, rules)
}

/// Erdős–Rényi graph.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> UGraph {
    let mut g = UGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random tree on `n` vertices (each vertex attaches to an earlier one).
pub fn random_tree(rng: &mut impl Rng, n: usize) -> UGraph {
    let mut g = UGraph::new(n);
    for v in 1..n {
        g.add_edge(rng.gen_range(0..v), v);
    }
    g
}

/// A safe rule over predicates `p1..p4` (arity 1 or 2) and variables
/// `V1..V5`, together with random facts over the constants `1..=domain`.
pub fn random_safe_rule(rng: &mut impl Rng, domain: i64) -> (NonGroundRule, Vec<NonGroundRule>) {
    let arity = [1usize, 2, 2, 1];
    let var_count = rng.gen_range(2..=5);
    let var = |i: usize| Term::var(format!("V{}", i + 1));
    let pred = |k: usize| format!("p{}", k + 1);
    let mut pos = Vec::new();
    let mut covered = BTreeSet::new();
    for _ in 0..rng.gen_range(2..=5) {
        let k = rng.gen_range(0..arity.len());
        let vs: Vec<usize> = (0..arity[k]).map(|_| rng.gen_range(0..var_count)).collect();
        covered.extend(vs.iter().copied());
        pos.push(NonGroundAtom::new(pred(k), vs.into_iter().map(var).collect()));
    }
    let covered: Vec<usize> = covered.into_iter().collect();
    let pick = |rng: &mut ChaCha8Rng| var(covered[rng.gen_range(0..covered.len())]);
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let neg = (0..rng.gen_range(0..=1))
        .map(|_| {
            let k = local.gen_range(0..arity.len());
            NonGroundAtom::new(pred(k), (0..arity[k]).map(|_| pick(&mut local)).collect())
        })
        .collect();
    let head = if rng.gen_bool(0.8) {
        let terms = (0..rng.gen_range(1..=2)).map(|_| pick(&mut local)).collect();
        vec![NonGroundAtom::new("h", terms)]
    } else {
        vec![]
    };
    let mut facts = Vec::new();
    for (k, &ar) in arity.iter().enumerate() {
        let tuples: Vec<Vec<i64>> = match ar {
            1 => (1..=domain).map(|a| vec![a]).collect(),
            _ => (1..=domain).flat_map(|a| (1..=domain).map(move |b| vec![a, b])).collect(),
        };
        for t in tuples {
            if rng.gen_bool(0.5) {
                facts.push(NonGroundRule::fact(NonGroundAtom::new(pred(k), t.into_iter().map(Term::Int).collect())));
            }
        }
    }
    (NonGroundRule::new(head, pos, neg), facts)
}

/// Random ∃∀∃ formula; clause lengths range over 1..=4 so that clause
/// splitting is exercised.
pub fn random_qbf(rng: &mut impl Rng, max_vars: usize, max_clauses: usize) -> Qbf3 {
    let n = rng.gen_range(1..=max_vars);
    let names: Vec<String> = (1..=n).map(|i| format!("q{i}")).collect();
    let mut q = Qbf3::default();
    for v in &names {
        [&mut q.x, &mut q.y, &mut q.z][rng.gen_range(0..3)].push(v.clone());
    }
    for _ in 0..rng.gen_range(1..=max_clauses) {
        let mut pool = names.clone();
        pool.shuffle(rng);
        let len = rng.gen_range(1..=4.min(n));
        q.clauses.push(pool.into_iter().take(len).map(|v| QbfLiteral::new(v, rng.gen_bool(0.5))).collect());
    }
    q
}
