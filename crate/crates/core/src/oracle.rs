//! Reference semantics for epistemic logic programs.
//!
//! A guess `Φ` determines the epistemic reduct, whose answer sets are read
//! off the two-level satisfaction relation: positive and `¬¬` body atoms are
//! evaluated against the candidate subset `N`, `¬` and `¬¬¬` atoms against
//! the model `M`. Under that reading a reduct is an ordinary disjunctive
//! program, which the [`Backend::Search`] backend exploits.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::asp::{self, AspError, GroundProgram, GroundRule, SolveOptions};
use crate::exec::{self, Parallelism};
use crate::model::{AtomId, AtomTable, BodyElement, ElpProgram, EpistemicLiteral, Guess, Interpretation, WorldView};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("guess contains an epistemic literal that does not occur in the program")]
    GuessNotSubset,
    #[error("{atoms} atoms exceed the brute-force cap of {cap}")]
    AtomCap { atoms: usize, cap: usize },
    #[error("{elits} epistemic literals exceed the guess cap of {cap}")]
    ElitCap { elits: usize, cap: usize },
    #[error(transparent)]
    Asp(#[from] AspError),
}

/// How answer sets of a reduct are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Backend {
    /// Literal enumeration of all `(M, N)` pairs.
    #[default]
    BruteForce,
    /// Ground answer-set search with assumption queries.
    Search,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_atoms: usize,
    pub max_elits: usize,
    pub backend: Backend,
    pub parallelism: Parallelism,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_atoms: 20, max_elits: 16, backend: Backend::BruteForce, parallelism: Parallelism::default() }
    }
}

impl OracleConfig {
    pub fn search() -> Self {
        OracleConfig { backend: Backend::Search, ..OracleConfig::default() }
    }
}

/// A rule of the epistemic reduct.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReductRule {
    pub head: Vec<AtomId>,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
    pub dneg: Vec<AtomId>,
    pub tneg: Vec<AtomId>,
    /// Set when the body contains `¬⊤`.
    pub always_satisfied: bool,
}

pub fn epistemic_reduct(p: &ElpProgram, phi: &Guess) -> Result<Vec<ReductRule>, OracleError> {
    let elits = p.elits();
    if phi.chosen.iter().any(|e| !elits.contains(e)) {
        return Err(OracleError::GuessNotSubset);
    }
    Ok(p.rules
        .iter()
        .map(|rule| {
            let mut r = ReductRule { head: rule.head.clone(), ..ReductRule::default() };
            for b in &rule.body {
                match *b {
                    BodyElement::Plain(l) if l.negated => r.neg.push(l.atom),
                    BodyElement::Plain(l) => r.pos.push(l.atom),
                    BodyElement::Elit { elit, negated } => {
                        let a = elit.inner.atom;
                        match (phi.contains(&elit), negated, elit.inner.negated) {
                            (true, false, _) => {}
                            (true, true, _) => r.always_satisfied = true,
                            (false, false, false) => r.neg.push(a),
                            (false, false, true) => r.dneg.push(a),
                            (false, true, false) => r.dneg.push(a),
                            (false, true, true) => r.tneg.push(a),
                        }
                    }
                }
            }
            r
        })
        .collect())
}

pub fn sat_two_level(r: &ReductRule, m: &Interpretation, n: &Interpretation) -> bool {
    r.always_satisfied
        || r.head.iter().any(|a| n.contains(*a))
        || r.pos.iter().any(|a| !n.contains(*a))
        || r.neg.iter().any(|a| m.contains(*a))
        || r.dneg.iter().any(|a| !n.contains(*a))
        || r.tneg.iter().any(|a| m.contains(*a))
}

/// Rule as bitmasks: satisfied by (M, N) iff flag, or head ∩ N, or
/// n_false \ N, or m_true ∩ M is non-empty.
#[derive(Clone, Copy)]
struct MaskRule {
    head: u64,
    n_false: u64,
    m_true: u64,
}

fn mask_of(atoms: &[AtomId]) -> u64 {
    atoms.iter().fold(0, |m, a| m | 1 << (a.0 - 1))
}

fn mask_rules(rules: &[ReductRule]) -> Vec<MaskRule> {
    rules
        .iter()
        .filter(|r| !r.always_satisfied)
        .map(|r| MaskRule {
            head: mask_of(&r.head),
            n_false: mask_of(&r.pos) | mask_of(&r.dneg),
            m_true: mask_of(&r.neg) | mask_of(&r.tneg),
        })
        .collect()
}

fn brute_answer_sets(rules: &[ReductRule], n: usize) -> Vec<u64> {
    let rules = mask_rules(rules);
    let mut order: Vec<u64> = (0..1u64 << n).collect();
    order.sort_by_key(|m| (m.count_ones(), *m));
    let mut out = Vec::new();
    for m in order {
        // rules whose M-evaluated part already holds never constrain N
        let live: Vec<MaskRule> = rules.iter().copied().filter(|r| r.m_true & m == 0).collect();
        let models = |x: u64| live.iter().all(|r| r.head & x != 0 || r.n_false & !x != 0);
        if !models(m) {
            continue;
        }
        // proper submasks of m, descending
        let mut s = m;
        let mut minimal = true;
        while s != 0 {
            s = (s - 1) & m;
            if models(s) {
                minimal = false;
                break;
            }
        }
        if minimal {
            out.push(m);
        }
    }
    out
}

/// Answer sets of a reduct by enumeration over all subsets of the atoms.
pub fn answer_sets_of_reduct(
    rules: &[ReductRule],
    atoms: &AtomTable,
    cap: usize,
) -> Result<BTreeSet<Interpretation>, OracleError> {
    if atoms.len() > cap.min(63) {
        return Err(OracleError::AtomCap { atoms: atoms.len(), cap });
    }
    Ok(brute_answer_sets(rules, atoms.len()).into_iter().map(Interpretation::from_mask).collect())
}

/// The reduct as a ground program over the atom names of `atoms`.
pub fn reduct_program(rules: &[ReductRule], atoms: &AtomTable) -> GroundProgram {
    let names: Vec<String> = atoms.names().to_vec();
    let id = |a: &AtomId| a.0 - 1;
    let ground = rules
        .iter()
        .filter(|r| !r.always_satisfied)
        .map(|r| {
            GroundRule::new(
                r.head.iter().map(id).collect(),
                r.pos.iter().chain(&r.dneg).map(id).collect(),
                r.neg.iter().chain(&r.tneg).map(id).collect(),
            )
        })
        .collect();
    GroundProgram::propositional(&names, ground)
}

fn interpretation_of(g: &GroundProgram, atoms: &AtomTable, set: &[u32]) -> Interpretation {
    set.iter().map(|a| atoms.get(g.atom_text(*a)).expect("reduct atoms come from the table")).collect()
}

/// Literal truth in an interpretation; `¬a` is false iff `a` holds.
fn literal_false(e: &EpistemicLiteral, m: &Interpretation) -> bool {
    m.contains(e.inner.atom) == e.inner.negated
}

/// Decides Def.-2 acceptance of `phi` with assumption queries: the reduct
/// must be consistent and, for every literal, "some answer set falsifies ℓ"
/// must hold exactly when `$not$ ℓ` was guessed.
fn accepts_by_search(p: &ElpProgram, g: &GroundProgram, phi: &Guess) -> Result<bool, OracleError> {
    if !asp::has_answer_set(g)? {
        return Ok(false);
    }
    for e in p.elits() {
        let name = p.atom_name(e.inner.atom);
        // ℓ false: a false for ℓ = a, a true for ℓ = ¬a
        let falsified = match g.find_atom(name) {
            Some(id) => asp::has_answer_set_with(g, &[(id, e.inner.negated)])?,
            None => !e.inner.negated,
        };
        if falsified != phi.contains(&e) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Returns the world view induced by `phi` if it is a candidate world view.
pub fn is_candidate_world_view(
    p: &ElpProgram,
    phi: &Guess,
    cfg: &OracleConfig,
) -> Result<Option<WorldView>, OracleError> {
    let reduct = epistemic_reduct(p, phi)?;
    let answer_sets = match cfg.backend {
        Backend::BruteForce => answer_sets_of_reduct(&reduct, &p.atoms, cfg.max_atoms)?,
        Backend::Search => {
            let g = reduct_program(&reduct, &p.atoms);
            if !accepts_by_search(p, &g, phi)? {
                return Ok(None);
            }
            let sets = asp::solve(&g, &SolveOptions::default())?;
            return Ok(Some(WorldView {
                guess: phi.clone(),
                answer_sets: sets.iter().map(|s| interpretation_of(&g, &p.atoms, s)).collect(),
            }));
        }
    };
    if answer_sets.is_empty() {
        return Ok(None);
    }
    for e in p.elits() {
        let some_false = answer_sets.iter().any(|m| literal_false(&e, m));
        if some_false != phi.contains(&e) {
            return Ok(None);
        }
    }
    Ok(Some(WorldView { guess: phi.clone(), answer_sets }))
}

fn check_caps(p: &ElpProgram, cfg: &OracleConfig) -> Result<Vec<EpistemicLiteral>, OracleError> {
    let elits = p.elits();
    if elits.len() > cfg.max_elits.min(63) {
        return Err(OracleError::ElitCap { elits: elits.len(), cap: cfg.max_elits });
    }
    if cfg.backend == Backend::BruteForce && p.atoms.len() > cfg.max_atoms.min(63) {
        return Err(OracleError::AtomCap { atoms: p.atoms.len(), cap: cfg.max_atoms });
    }
    Ok(elits)
}

/// All candidate world views, ordered by guess bitmask over the elits in
/// first-occurrence order.
pub fn enumerate_world_views(p: &ElpProgram, cfg: &OracleConfig) -> Result<Vec<WorldView>, OracleError> {
    let elits = check_caps(p, cfg)?;
    let found = exec::map_range(cfg.parallelism, 1u64 << elits.len(), |mask| {
        is_candidate_world_view(p, &Guess::from_mask(&elits, mask), cfg)
    });
    found.into_iter().filter_map(Result::transpose).collect()
}

/// World view existence; stops at the first accepted guess.
pub fn is_consistent(p: &ElpProgram, cfg: &OracleConfig) -> Result<bool, OracleError> {
    let elits = check_caps(p, cfg)?;
    exec::try_any_in_range(cfg.parallelism, 1u64 << elits.len(), |mask| {
        let phi = Guess::from_mask(&elits, mask);
        match cfg.backend {
            Backend::BruteForce => Ok(is_candidate_world_view(p, &phi, cfg)?.is_some()),
            Backend::Search => {
                let g = reduct_program(&epistemic_reduct(p, &phi)?, &p.atoms);
                accepts_by_search(p, &g, &phi)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_easp_not;

    fn interp(p: &ElpProgram, names: &[&str]) -> Interpretation {
        names.iter().map(|n| p.atoms.get(n).unwrap()).collect()
    }

    #[test]
    fn two_views_reduct() {
        let p = parse_easp_not("p :- $not$ q.\nq :- $not$ p.").unwrap();
        let q = p.atoms.get("q").unwrap();
        let phi = Guess::new([EpistemicLiteral::of_atom(q)]);
        let r = epistemic_reduct(&p, &phi).unwrap();
        assert_eq!(r[0], ReductRule { head: vec![p.atoms.get("p").unwrap()], ..ReductRule::default() });
        assert_eq!(r[1].neg, vec![p.atoms.get("p").unwrap()]);
        let sets = answer_sets_of_reduct(&r, &p.atoms, 20).unwrap();
        assert_eq!(sets, [interp(&p, &["p"])].into());
    }

    #[test]
    fn reduct_of_negated_elits() {
        let p = parse_easp_not("w :- $not$ v, not $not$ not u.").unwrap();
        let r = epistemic_reduct(&p, &Guess::default()).unwrap();
        assert_eq!(r[0].neg, vec![p.atoms.get("v").unwrap()]);
        assert_eq!(r[0].tneg, vec![p.atoms.get("u").unwrap()]);
        let all = Guess::new(p.elits());
        assert!(epistemic_reduct(&p, &all).unwrap()[0].always_satisfied);
        let stray = Guess::new([EpistemicLiteral::of_atom(AtomId(9))]);
        assert_eq!(epistemic_reduct(&p, &stray), Err(OracleError::GuessNotSubset));
    }

    #[test]
    fn sat_table() {
        let p = parse_easp_not("q :- not p.").unwrap();
        let r = &epistemic_reduct(&p, &Guess::default()).unwrap()[0];
        let pm = interp(&p, &["p"]);
        assert!(sat_two_level(r, &pm, &pm));
        let c = ReductRule { pos: vec![AtomId(1)], ..ReductRule::default() };
        let a = Interpretation::from_mask(1);
        assert!(!sat_two_level(&c, &a, &a));
    }

    #[test]
    fn reduct_answer_sets_edge_cases() {
        let atoms: AtomTable = ["a"].into_iter().collect();
        assert_eq!(answer_sets_of_reduct(&[], &atoms, 20).unwrap(), [Interpretation::default()].into());
        let atoms: AtomTable = ["a", "b"].into_iter().collect();
        let r = ReductRule { head: vec![AtomId(1), AtomId(2)], ..ReductRule::default() };
        assert_eq!(
            answer_sets_of_reduct(&[r], &atoms, 20).unwrap(),
            [Interpretation::from_mask(1), Interpretation::from_mask(2)].into()
        );
        assert!(matches!(answer_sets_of_reduct(&[], &atoms, 1), Err(OracleError::AtomCap { .. })));
    }

    #[test]
    fn two_views_world_views() {
        let p = parse_easp_not("p :- $not$ q.\nq :- $not$ p.").unwrap();
        let (pa, qa) = (p.atoms.get("p").unwrap(), p.atoms.get("q").unwrap());
        for cfg in [OracleConfig::default(), OracleConfig::search()] {
            let wv = enumerate_world_views(&p, &cfg).unwrap();
            assert_eq!(wv.len(), 2, "{cfg:?} {wv:?}");
            assert_eq!(wv[0].guess, Guess::new([EpistemicLiteral::of_atom(qa)]));
            assert_eq!(wv[0].answer_sets, [interp(&p, &["p"])].into());
            assert_eq!(wv[1].guess, Guess::new([EpistemicLiteral::of_atom(pa)]));
            assert_eq!(wv[1].answer_sets, [interp(&p, &["q"])].into());
            let both = Guess::new([EpistemicLiteral::of_atom(pa), EpistemicLiteral::of_atom(qa)]);
            assert_eq!(is_candidate_world_view(&p, &both, &cfg).unwrap(), None);
            assert!(is_consistent(&p, &cfg).unwrap());
        }
    }

    #[test]
    fn small_verdicts() {
        for cfg in [OracleConfig::default(), OracleConfig::search()] {
            let empty = parse_easp_not("").unwrap();
            let wv = enumerate_world_views(&empty, &cfg).unwrap();
            assert_eq!(wv.len(), 1);
            assert_eq!(wv[0].answer_sets, [Interpretation::default()].into());
            let bad = parse_easp_not(":- a. a.").unwrap();
            assert!(!is_consistent(&bad, &cfg).unwrap());
            let inn = parse_easp_not("innocent :- $not$ guilty.").unwrap();
            let wv = enumerate_world_views(&inn, &cfg).unwrap();
            assert_eq!(wv.len(), 1);
            assert_eq!(wv[0].guess.chosen.len(), 1);
            assert_eq!(wv[0].answer_sets, [interp(&inn, &["innocent"])].into());
        }
    }
}
