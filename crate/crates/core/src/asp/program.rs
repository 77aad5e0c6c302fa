//! Ground (propositional) disjunctive programs.

use std::collections::HashMap;

use super::syntax::Signature;

/// `head_1 | … | head_k :- pos, not neg.` over dense atom ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundRule {
    pub head: Vec<u32>,
    pub pos: Vec<u32>,
    pub neg: Vec<u32>,
}

impl GroundRule {
    /// Sorts and deduplicates each part.
    pub fn new(mut head: Vec<u32>, mut pos: Vec<u32>, mut neg: Vec<u32>) -> Self {
        for v in [&mut head, &mut pos, &mut neg] {
            v.sort_unstable();
            v.dedup();
        }
        GroundRule { head, pos, neg }
    }
}

/// A simplified ground program.
///
/// Atoms that are certainly true (derivable by definite rules from facts)
/// are flagged and removed from the remaining rules. Atoms that can never be
/// derived are dropped altogether.
#[derive(Clone, Debug, Default)]
pub struct GroundProgram {
    texts: Vec<String>,
    sigs: Vec<Signature>,
    certain: Vec<bool>,
    rules: Vec<GroundRule>,
    index: HashMap<String, u32>,
    pub projection: Option<Vec<Signature>>,
}

impl GroundProgram {
    pub fn from_rules(atoms: Vec<(String, Signature)>, rules: Vec<GroundRule>) -> Self {
        let n = atoms.len();
        let rules: Vec<GroundRule> = rules
            .into_iter()
            .map(|r| GroundRule::new(r.head, r.pos, r.neg))
            .filter(|r| !r.pos.iter().any(|a| r.neg.binary_search(a).is_ok()))
            .collect();

        // possibly derivable atoms
        let mut possible = vec![false; n];
        let mut missing: Vec<usize> = rules.iter().map(|r| r.pos.len()).collect();
        let mut watch: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ri, r) in rules.iter().enumerate() {
            for &a in &r.pos {
                watch[a as usize].push(ri);
            }
        }
        let mut queue: Vec<usize> = (0..rules.len()).filter(|&ri| missing[ri] == 0).collect();
        while let Some(ri) = queue.pop() {
            for &h in &rules[ri].head {
                if !possible[h as usize] {
                    possible[h as usize] = true;
                    for &rj in &watch[h as usize] {
                        missing[rj] -= 1;
                        if missing[rj] == 0 {
                            queue.push(rj);
                        }
                    }
                }
            }
        }
        let rules: Vec<GroundRule> = rules
            .into_iter()
            .filter(|r| r.pos.iter().all(|a| possible[*a as usize]))
            .map(|mut r| {
                r.neg.retain(|a| possible[*a as usize]);
                r.head.retain(|a| possible[*a as usize]);
                r
            })
            .collect();

        // certainly true atoms
        let mut certain = vec![false; n];
        let mut missing: Vec<usize> = rules.iter().map(|r| r.pos.len()).collect();
        let mut watch: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (ri, r) in rules.iter().enumerate() {
            for &a in &r.pos {
                watch[a as usize].push(ri);
            }
        }
        let definite = |r: &GroundRule| r.head.len() == 1 && r.neg.is_empty();
        let mut queue: Vec<usize> = (0..rules.len()).filter(|&ri| missing[ri] == 0 && definite(&rules[ri])).collect();
        while let Some(ri) = queue.pop() {
            let h = rules[ri].head[0] as usize;
            if certain[h] {
                continue;
            }
            certain[h] = true;
            for &rj in &watch[h] {
                missing[rj] -= 1;
                if missing[rj] == 0 && definite(&rules[rj]) {
                    queue.push(rj);
                }
            }
        }

        let mut remap = vec![u32::MAX; n];
        let mut texts = Vec::new();
        let mut sigs = Vec::new();
        let mut cert = Vec::new();
        for (i, (text, sig)) in atoms.into_iter().enumerate() {
            if possible[i] {
                remap[i] = texts.len() as u32;
                texts.push(text);
                sigs.push(sig);
                cert.push(certain[i]);
            }
        }
        let mut out: Vec<GroundRule> = rules
            .into_iter()
            .filter(|r| !r.head.iter().chain(&r.neg).any(|a| certain[*a as usize]))
            .map(|r| {
                let m = |v: Vec<u32>| -> Vec<u32> {
                    v.into_iter().filter(|a| !certain[*a as usize]).map(|a| remap[a as usize]).collect()
                };
                GroundRule::new(m(r.head), m(r.pos), m(r.neg))
            })
            .collect();
        out.sort();
        out.dedup();
        let index = texts.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        GroundProgram { texts, sigs, certain: cert, rules: out, index, projection: None }
    }

    /// Builds a program over 0-ary atoms named by `names`.
    pub fn propositional(names: &[String], rules: Vec<GroundRule>) -> Self {
        GroundProgram::from_rules(names.iter().map(|n| (n.clone(), Signature::new(n.clone(), 0))).collect(), rules)
    }

    pub fn atom_count(&self) -> usize {
        self.texts.len()
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn atom_text(&self, id: u32) -> &str {
        &self.texts[id as usize]
    }

    pub fn signature(&self, id: u32) -> &Signature {
        &self.sigs[id as usize]
    }

    pub fn is_certain(&self, id: u32) -> bool {
        self.certain[id as usize]
    }

    pub fn find_atom(&self, text: &str) -> Option<u32> {
        self.index.get(text).copied()
    }

    pub fn certain_atoms(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.texts.len() as u32).filter(|a| self.certain[*a as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn facts_become_certain_and_vanish_from_rules() {
        // p0.  p1 :- p0.  p2 | p3 :- p1, not p4.
        let g = GroundProgram::propositional(
            &names(5),
            vec![
                GroundRule::new(vec![0], vec![], vec![]),
                GroundRule::new(vec![1], vec![0], vec![]),
                GroundRule::new(vec![2, 3], vec![1], vec![4]),
            ],
        );
        assert_eq!(g.atom_count(), 4);
        assert!(g.is_certain(g.find_atom("p1").unwrap()));
        assert_eq!(g.rules().len(), 1);
        assert!(g.rules()[0].pos.is_empty() && g.rules()[0].neg.is_empty());
    }

    #[test]
    fn underivable_body_drops_rule() {
        let g = GroundProgram::propositional(&names(2), vec![GroundRule::new(vec![0], vec![1], vec![])]);
        assert_eq!(g.atom_count(), 0);
        assert!(g.rules().is_empty());
    }

    #[test]
    fn violated_constraint_survives_as_empty_rule() {
        let g = GroundProgram::propositional(
            &names(1),
            vec![GroundRule::new(vec![0], vec![], vec![]), GroundRule::new(vec![], vec![0], vec![])],
        );
        assert_eq!(g.rules(), &[GroundRule::default()]);
    }
}
