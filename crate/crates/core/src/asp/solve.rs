//! Answer-set search for ground disjunctive programs.
//!
//! Models of the completion-like constraints (every rule satisfied, every
//! true atom supported) are enumerated by a DPLL search with counter-based
//! unit and support propagation. Each model is then checked for minimality
//! with respect to its reduct by a second, support-free search for a strictly
//! smaller model.

use std::collections::BTreeSet;

use super::error::AspError;
use super::program::{GroundProgram, GroundRule};
use super::syntax::Signature;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Maximum number of answer sets to return; 0 means all.
    pub limit: usize,
    /// Abort with [`AspError::SearchBudget`] after this many decisions.
    pub max_decisions: u64,
    /// Atoms forced to the given truth value.
    pub assumptions: Vec<(u32, bool)>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { limit: 0, max_decisions: 50_000_000, assumptions: Vec::new() }
    }
}

/// An answer set as sorted atom ids, certain atoms included.
pub type AnswerSet = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Head,
    Pos,
    Neg,
}

const UNDEF: i8 = -1;

struct Engine<'a> {
    rules: &'a [GroundRule],
    occ: Vec<Vec<(u32, Role)>>,
    sup_heads: Vec<Vec<u32>>,
    use_support: bool,
    val: Vec<i8>,
    bf: Vec<u32>,
    ht: Vec<u32>,
    un: Vec<u32>,
    sup: Vec<u32>,
    trail: Vec<u32>,
    pending: Vec<(u32, bool)>,
    conflict: bool,
    scratch: Vec<(u32, u32, bool)>,
    cursor: usize,
}

impl<'a> Engine<'a> {
    fn new(rules: &'a [GroundRule], n: usize, use_support: bool) -> Self {
        let mut occ: Vec<Vec<(u32, Role)>> = vec![Vec::new(); n];
        let mut sup_heads = Vec::with_capacity(rules.len());
        let mut sup = vec![0u32; n];
        for (ri, r) in rules.iter().enumerate() {
            let ri = ri as u32;
            r.head.iter().for_each(|&a| occ[a as usize].push((ri, Role::Head)));
            r.pos.iter().for_each(|&a| occ[a as usize].push((ri, Role::Pos)));
            r.neg.iter().for_each(|&a| occ[a as usize].push((ri, Role::Neg)));
            let sh: Vec<u32> = r.head.iter().copied().filter(|h| r.pos.binary_search(h).is_err()).collect();
            for &h in &sh {
                sup[h as usize] += 1;
            }
            sup_heads.push(sh);
        }
        let mut e = Engine {
            rules,
            occ,
            sup_heads,
            use_support,
            val: vec![UNDEF; n],
            bf: vec![0; rules.len()],
            ht: vec![0; rules.len()],
            un: rules.iter().map(|r| (r.head.len() + r.pos.len() + r.neg.len()) as u32).collect(),
            sup,
            trail: Vec::new(),
            pending: Vec::new(),
            conflict: false,
            scratch: Vec::new(),
            cursor: 0,
        };
        for ri in 0..rules.len() {
            match e.un[ri] {
                0 => e.conflict = true,
                1 => {
                    let u = e.unit(ri);
                    e.pending.push(u);
                }
                _ => {}
            }
        }
        if use_support {
            for a in 0..n {
                if e.sup[a] == 0 {
                    e.pending.push((a as u32, false));
                }
            }
        }
        e
    }

    fn unit(&self, ri: usize) -> (u32, bool) {
        let r = &self.rules[ri];
        let free = |a: &&u32| self.val[**a as usize] == UNDEF;
        if let Some(&h) = r.head.iter().find(free) {
            return (h, true);
        }
        if let Some(&p) = r.pos.iter().find(free) {
            return (p, false);
        }
        (*r.neg.iter().find(free).expect("unit rule has a free literal"), true)
    }

    fn supports(&self, ri: usize, h: u32) -> bool {
        self.bf[ri] == 0 && self.ht[ri] - u32::from(self.val[h as usize] == 1) == 0
    }

    fn snapshot(&mut self, a: u32) {
        let mut scratch = std::mem::take(&mut self.scratch);
        scratch.clear();
        if self.use_support {
            let mut last = u32::MAX;
            // occurrences of one rule are adjacent
            for &(ri, _) in &self.occ[a as usize] {
                if ri == last {
                    continue;
                }
                last = ri;
                for &h in &self.sup_heads[ri as usize] {
                    scratch.push((ri, h, self.supports(ri as usize, h)));
                }
            }
        }
        self.scratch = scratch;
    }

    fn assign(&mut self, a: u32, v: bool) {
        self.snapshot(a);
        self.val[a as usize] = i8::from(v);
        self.trail.push(a);
        if self.use_support && v && self.sup[a as usize] == 0 {
            self.conflict = true;
        }
        for i in 0..self.occ[a as usize].len() {
            let (ri, role) = self.occ[a as usize][i];
            let r = ri as usize;
            self.un[r] -= 1;
            match (role, v) {
                (Role::Pos, false) | (Role::Neg, true) => self.bf[r] += 1,
                (Role::Head, true) => self.ht[r] += 1,
                _ => {}
            }
        }
        // counters first: an atom may occur in several roles of one rule
        for i in 0..self.occ[a as usize].len() {
            let r = self.occ[a as usize][i].0 as usize;
            if self.bf[r] == 0 && self.ht[r] == 0 {
                match self.un[r] {
                    0 => self.conflict = true,
                    1 => {
                        let u = self.unit(r);
                        self.pending.push(u);
                    }
                    _ => {}
                }
            }
        }
        if self.use_support {
            let scratch = std::mem::take(&mut self.scratch);
            for &(ri, h, before) in &scratch {
                let after = self.supports(ri as usize, h);
                if before && !after {
                    self.sup[h as usize] -= 1;
                    if self.sup[h as usize] == 0 {
                        match self.val[h as usize] {
                            1 => self.conflict = true,
                            UNDEF => self.pending.push((h, false)),
                            _ => {}
                        }
                    }
                } else if !before && after {
                    self.sup[h as usize] += 1;
                }
            }
            self.scratch = scratch;
        }
    }

    fn unassign(&mut self, a: u32) {
        self.snapshot(a);
        let v = self.val[a as usize] == 1;
        self.val[a as usize] = UNDEF;
        self.cursor = self.cursor.min(a as usize);
        for i in 0..self.occ[a as usize].len() {
            let (ri, role) = self.occ[a as usize][i];
            let r = ri as usize;
            self.un[r] += 1;
            match (role, v) {
                (Role::Pos, false) | (Role::Neg, true) => self.bf[r] -= 1,
                (Role::Head, true) => self.ht[r] -= 1,
                _ => {}
            }
        }
        if self.use_support {
            let scratch = std::mem::take(&mut self.scratch);
            for &(ri, h, before) in &scratch {
                let after = self.supports(ri as usize, h);
                if before && !after {
                    self.sup[h as usize] -= 1;
                } else if !before && after {
                    self.sup[h as usize] += 1;
                }
            }
            self.scratch = scratch;
        }
    }

    fn propagate(&mut self) {
        while !self.conflict {
            let Some((a, v)) = self.pending.pop() else { break };
            match self.val[a as usize] {
                UNDEF => self.assign(a, v),
                x if (x == 1) == v => {}
                _ => self.conflict = true,
            }
        }
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let a = self.trail.pop().unwrap();
            self.unassign(a);
        }
        self.pending.clear();
        self.conflict = false;
    }

    fn next_free(&mut self) -> Option<u32> {
        while self.cursor < self.val.len() {
            if self.val[self.cursor] == UNDEF {
                return Some(self.cursor as u32);
            }
            self.cursor += 1;
        }
        None
    }

    /// Enumerates total assignments passing propagation. `on_model` returns
    /// `Ok(false)` to stop.
    fn search<F>(&mut self, max_decisions: u64, mut on_model: F) -> Result<(), AspError>
    where
        F: FnMut(&[i8]) -> Result<bool, AspError>,
    {
        // (atom, trail length before the decision, second branch)
        let mut decisions: Vec<(u32, usize, bool)> = Vec::new();
        let mut count = 0u64;
        loop {
            self.propagate();
            let mut backtrack = self.conflict;
            if !backtrack {
                match self.next_free() {
                    Some(a) => {
                        count += 1;
                        if count > max_decisions {
                            return Err(AspError::SearchBudget(max_decisions));
                        }
                        decisions.push((a, self.trail.len(), false));
                        self.pending.push((a, false));
                        continue;
                    }
                    None => {
                        if !on_model(&self.val)? {
                            return Ok(());
                        }
                        backtrack = true;
                    }
                }
            }
            if backtrack {
                loop {
                    let Some((a, len, second)) = decisions.pop() else { return Ok(()) };
                    self.undo_to(len);
                    if !second {
                        decisions.push((a, len, true));
                        self.pending.push((a, true));
                        break;
                    }
                }
            }
        }
    }
}

/// Does some model of `P^M` lie strictly inside `M`?
fn is_minimal(g: &GroundProgram, val: &[i8], max_decisions: u64) -> Result<bool, AspError> {
    let mut local = vec![u32::MAX; val.len()];
    let mut m = 0u32;
    for (a, v) in val.iter().enumerate() {
        if *v == 1 {
            local[a] = m;
            m += 1;
        }
    }
    if m == 0 {
        return Ok(true);
    }
    let inm = |a: &u32| local[*a as usize] != u32::MAX;
    let mut rules = Vec::new();
    for r in g.rules() {
        if r.neg.iter().any(inm) || !r.pos.iter().all(inm) {
            continue;
        }
        let head = r.head.iter().filter(|a| inm(a)).map(|a| local[*a as usize]).collect();
        let pos = r.pos.iter().map(|a| local[*a as usize]).collect();
        rules.push(GroundRule::new(head, pos, vec![]));
    }
    rules.push(GroundRule::new(vec![], (0..m).collect(), vec![]));
    let mut e = Engine::new(&rules, m as usize, false);
    let mut smaller = false;
    e.search(max_decisions, |_| {
        smaller = true;
        Ok(false)
    })?;
    Ok(!smaller)
}

/// Enumerates answer sets of `g` under `opts`.
pub fn solve(g: &GroundProgram, opts: &SolveOptions) -> Result<Vec<AnswerSet>, AspError> {
    let n = g.atom_count();
    let mut e = Engine::new(g.rules(), n, true);
    for a in g.certain_atoms() {
        e.val[a as usize] = 1;
    }
    // certain atoms occur in no rule, so only the unsupported-atom seeds refer to them
    e.pending.retain(|(a, _)| !g.is_certain(*a));
    for &(a, v) in &opts.assumptions {
        if g.is_certain(a) {
            if !v {
                return Ok(Vec::new());
            }
        } else {
            e.pending.push((a, v));
        }
    }
    let mut out = Vec::new();
    e.search(opts.max_decisions, |val| {
        let mut core = val.to_vec();
        for a in g.certain_atoms() {
            core[a as usize] = 0;
        }
        if is_minimal(g, &core, opts.max_decisions)? {
            out.push((0..n as u32).filter(|a| val[*a as usize] == 1).collect());
        }
        Ok(opts.limit == 0 || out.len() < opts.limit)
    })?;
    Ok(out)
}

pub fn answer_sets(g: &GroundProgram, limit: usize) -> Result<Vec<AnswerSet>, AspError> {
    solve(g, &SolveOptions { limit, ..SolveOptions::default() })
}

pub fn has_answer_set(g: &GroundProgram) -> Result<bool, AspError> {
    has_answer_set_with(g, &[])
}

pub fn has_answer_set_with(g: &GroundProgram, assumptions: &[(u32, bool)]) -> Result<bool, AspError> {
    let opts = SolveOptions { limit: 1, assumptions: assumptions.to_vec(), ..SolveOptions::default() };
    Ok(!solve(g, &opts)?.is_empty())
}

/// Answer sets restricted to atoms of the given predicates, as atom texts,
/// with duplicates after projection removed.
pub fn project_answer_sets(
    g: &GroundProgram,
    preds: &[Signature],
    limit: usize,
) -> Result<Vec<BTreeSet<String>>, AspError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in answer_sets(g, 0)? {
        let proj: BTreeSet<String> =
            s.iter().filter(|a| preds.contains(g.signature(**a))).map(|a| g.atom_text(*a).to_owned()).collect();
        if seen.insert(proj.clone()) {
            out.push(proj);
            if limit != 0 && out.len() >= limit {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(n: usize, rules: Vec<(Vec<u32>, Vec<u32>, Vec<u32>)>) -> GroundProgram {
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        GroundProgram::propositional(&names, rules.into_iter().map(|(h, p, q)| GroundRule::new(h, p, q)).collect())
    }

    fn texts(g: &GroundProgram, sets: Vec<AnswerSet>) -> Vec<Vec<String>> {
        let mut v: Vec<Vec<String>> =
            sets.into_iter().map(|s| s.into_iter().map(|a| g.atom_text(a).to_owned()).collect()).collect();
        v.sort();
        v
    }

    #[test]
    fn even_loop_through_negation() {
        let g = prog(2, vec![(vec![0], vec![], vec![1]), (vec![1], vec![], vec![0])]);
        assert_eq!(texts(&g, answer_sets(&g, 0).unwrap()), vec![vec!["p0"], vec!["p1"]]);
    }

    #[test]
    fn odd_loop_has_none() {
        let g = prog(1, vec![(vec![0], vec![], vec![0])]);
        assert!(!has_answer_set(&g).unwrap());
    }

    #[test]
    fn disjunction_is_minimal() {
        // p0 | p1.  p0 :- p1.  gives only {p0}
        let g = prog(2, vec![(vec![0, 1], vec![], vec![]), (vec![0], vec![1], vec![])]);
        assert_eq!(texts(&g, answer_sets(&g, 0).unwrap()), vec![vec!["p0"]]);
    }

    #[test]
    fn minimality_needs_the_check() {
        // p0 | p1.  p0 :- p1.  p1 :- p0.  only {p0,p1}, which is minimal
        let g = prog(2, vec![(vec![0, 1], vec![], vec![]), (vec![0], vec![1], vec![]), (vec![1], vec![0], vec![])]);
        assert_eq!(texts(&g, answer_sets(&g, 0).unwrap()), vec![vec!["p0", "p1"]]);
        // p0 | p1 | p2.  p0 :- p1.  p1 :- p0.  support holds for {p0,p1} but {p2} is the only answer set
        let g = prog(3, vec![(vec![0, 1, 2], vec![], vec![]), (vec![0], vec![1], vec![]), (vec![1], vec![0], vec![])]);
        assert_eq!(texts(&g, answer_sets(&g, 0).unwrap()), vec![vec!["p0", "p1"], vec!["p2"]]);
    }

    #[test]
    fn positive_loop_is_unfounded() {
        // p0 :- p1.  p1 :- p0.
        let g = prog(2, vec![(vec![0], vec![1], vec![]), (vec![1], vec![0], vec![])]);
        assert_eq!(texts(&g, answer_sets(&g, 0).unwrap()), vec![Vec::<String>::new()]);
        // with p0 | p2 the loop can't make p0 true by itself
        let g = prog(3, vec![(vec![0], vec![1], vec![]), (vec![1], vec![0], vec![]), (vec![0, 2], vec![], vec![])]);
        assert_eq!(texts(&g, answer_sets(&g, 0).unwrap()), vec![vec!["p0", "p1"], vec!["p2"]]);
    }

    #[test]
    fn assumptions_restrict() {
        let g = prog(2, vec![(vec![0], vec![], vec![1]), (vec![1], vec![], vec![0])]);
        let p0 = g.find_atom("p0").unwrap();
        assert!(has_answer_set_with(&g, &[(p0, false)]).unwrap());
        let opts = SolveOptions { assumptions: vec![(p0, true)], ..SolveOptions::default() };
        assert_eq!(texts(&g, solve(&g, &opts).unwrap()), vec![vec!["p0"]]);
    }
}
