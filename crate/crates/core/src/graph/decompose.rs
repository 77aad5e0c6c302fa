//! Splitting long rules along a tree decomposition of their variable graph.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::{rule_graph, td_minfill, td_validate, TreeDecomposition, UGraph};
use crate::asp::{NonGroundAtom, NonGroundProgram, NonGroundRule, Term};
use crate::exec::{self, Parallelism};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("rule {rule} is unsafe")]
    Unsafe { rule: usize },
    #[error("decomposition supplied for rule {rule} is invalid: {detail}")]
    InvalidTd { rule: usize, detail: String },
    #[error("no bag covers atom {atom} of rule {rule}")]
    Uncovered { rule: usize, atom: String },
}

/// Splits `r` into one rule per decomposition node.
///
/// Node `t` below the root derives `tmp_<rule_id>_<t>` over the variables it
/// shares with its parent; the root keeps the original head. `td` must be
/// over the variables in [`rule_graph`] order and defaults to min-fill.
/// Rules whose decomposition has a single node come back unchanged.
pub fn decompose_rule(
    r: &NonGroundRule,
    rule_id: usize,
    td: Option<&TreeDecomposition>,
) -> Result<Vec<NonGroundRule>, DecomposeError> {
    decompose_with_prefix(r, rule_id, td, "tmp")
}

fn decompose_with_prefix(
    r: &NonGroundRule,
    rule_id: usize,
    td: Option<&TreeDecomposition>,
    prefix: &str,
) -> Result<Vec<NonGroundRule>, DecomposeError> {
    if !r.is_safe() {
        return Err(DecomposeError::Unsafe { rule: rule_id });
    }
    let (graph, names) = rule_graph(r);
    if names.is_empty() {
        return Ok(vec![r.clone()]);
    }
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let vars_of = |a: &NonGroundAtom| -> BTreeSet<usize> { a.vars().into_iter().map(|v| index[v]).collect() };
    let binding_of =
        |a: &NonGroundAtom| -> BTreeSet<usize> { a.binding_vars().into_iter().map(|v| index[v]).collect() };

    // An atom whose arithmetic mentions variables it cannot bind travels
    // together with one binder per such variable.
    let binders: Vec<Vec<usize>> = r
        .pos
        .iter()
        .map(|a| {
            let bound = binding_of(a);
            vars_of(a)
                .difference(&bound)
                .map(|u| {
                    (0..r.pos.len())
                        .filter(|&j| binding_of(&r.pos[j]).contains(u))
                        .min_by_key(|&j| (vars_of(&r.pos[j]).len(), j))
                        .expect("safe rules bind every variable")
                })
                .collect()
        })
        .collect();
    let unit_vars: Vec<BTreeSet<usize>> = (0..r.pos.len())
        .map(|i| {
            let mut s = vars_of(&r.pos[i]);
            for &b in &binders[i] {
                s.extend(vars_of(&r.pos[b]));
            }
            s
        })
        .collect();

    let mut td = match td {
        Some(td) => {
            let diags = td_validate(&graph, td);
            if let Some(d) = diags.first() {
                return Err(DecomposeError::InvalidTd { rule: rule_id, detail: d.to_string() });
            }
            td.clone()
        }
        None => {
            let mut aug: UGraph = graph.clone();
            for u in &unit_vars {
                aug.add_clique(&u.iter().copied().collect::<Vec<_>>());
            }
            td_minfill(&aug, 0)
        }
    };
    if td.node_count() == 1 {
        return Ok(vec![r.clone()]);
    }

    let mut bags: Vec<BTreeSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    let head_vars: BTreeSet<usize> = r.head.iter().flat_map(&vars_of).collect();
    for &h in &head_vars {
        let holders: Vec<usize> = (0..bags.len()).filter(|t| bags[*t].contains(&h)).collect();
        for mut t in holders {
            while let Some(p) = td.parent[t] {
                bags[p].insert(h);
                t = p;
            }
        }
    }
    td.bags = bags.iter().map(|b| b.iter().copied().collect()).collect();
    let depth = td.depths();
    let shallowest = |need: &BTreeSet<usize>, ok: &dyn Fn(usize) -> bool| -> Option<usize> {
        (0..bags.len()).filter(|&t| need.is_subset(&bags[t]) && ok(t)).min_by_key(|&t| (depth[t], t))
    };

    let k = bags.len();
    let mut pos_at: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for (i, a) in r.pos.iter().enumerate() {
        let t = shallowest(&unit_vars[i], &|_| true)
            .ok_or_else(|| DecomposeError::Uncovered { rule: rule_id, atom: a.to_string() })?;
        pos_at[t].insert(i);
        pos_at[t].extend(binders[i].iter().copied());
    }

    let children = td.children();
    let order = td.post_order();
    let shared: Vec<BTreeSet<usize>> =
        (0..k).map(|t| td.parent[t].map_or_else(BTreeSet::new, |p| &bags[t] & &bags[p])).collect();
    let mut bound: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
    for &t in &order {
        let mut b: BTreeSet<usize> = pos_at[t].iter().flat_map(|&i| binding_of(&r.pos[i])).collect();
        for &c in &children[t] {
            b.extend(shared[c].intersection(&bound[c]).copied());
        }
        bound[t] = b;
    }

    let mut neg_at: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, a) in r.neg.iter().enumerate() {
        let need = vars_of(a);
        match shallowest(&need, &|t| need.is_subset(&bound[t])) {
            Some(t) => neg_at[t].push(i),
            None => return Ok(vec![r.clone()]),
        }
    }

    let mut emitted: Vec<Option<NonGroundAtom>> = vec![None; k];
    let mut out = Vec::new();
    for &t in &order {
        let mut pos: Vec<NonGroundAtom> = pos_at[t].iter().map(|&i| r.pos[i].clone()).collect();
        pos.extend(children[t].iter().filter_map(|&c| emitted[c].clone()));
        let neg: Vec<NonGroundAtom> = neg_at[t].iter().map(|&i| r.neg[i].clone()).collect();
        if t == td.root {
            out.push(NonGroundRule::new(r.head.clone(), pos, neg));
        } else if !pos.is_empty() || !neg.is_empty() {
            let terms = shared[t].intersection(&bound[t]).map(|&v| Term::Var(names[v].clone())).collect();
            let head = NonGroundAtom::new(format!("{prefix}_{rule_id}_{t}"), terms);
            emitted[t] = Some(head.clone());
            out.push(NonGroundRule::new(vec![head], pos, neg));
        }
    }
    Ok(out)
}

/// Decomposes every rule; rule ids are 1-based positions. The temporary
/// predicate prefix is extended with underscores if the program already
/// uses names starting with it.
pub fn decompose_program(p: &NonGroundProgram, parallelism: Parallelism) -> Result<NonGroundProgram, DecomposeError> {
    let names: BTreeSet<String> = p.signatures().into_iter().map(|s| s.name).collect();
    let mut prefix = String::from("tmp");
    while names.iter().any(|n| n.starts_with(&format!("{prefix}_"))) {
        prefix.push('_');
    }
    let parts = exec::map_slice(parallelism, &p.rules, |i, r| decompose_with_prefix(r, i + 1, None, &prefix));
    let mut rules = Vec::new();
    for part in parts {
        rules.extend(part?);
    }
    Ok(NonGroundProgram { rules, projection: p.projection.clone() })
}
