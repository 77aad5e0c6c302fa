//! Grouping of solver witnesses of the translated program into candidate
//! world views.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use selp_core::syntax::WitnessSet;
use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Group {
    /// Every `g(·,·)` atom of the witness, as printed by the solver.
    pub guess: BTreeSet<String>,
    /// Atom names whose `v_check1(·,1)` atom occurs, one set per distinct witness.
    pub members: Vec<BTreeSet<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GroupedWorldViews {
    pub groups: Vec<Group>,
}

/// Splits `pred(args)` into the predicate and its top-level arguments.
fn split_atom(text: &str) -> Option<(&str, Vec<&str>)> {
    let open = text.find('(')?;
    let inner = text[open + 1..].strip_suffix(')')?;
    let mut args = Vec::new();
    let (mut depth, mut start) = (0usize, 0usize);
    for (i, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    args.push(inner[start..].trim());
    Some((&text[..open], args))
}

fn unquote(s: &str) -> String {
    match s.strip_prefix('"').and_then(|t| t.strip_suffix('"')) {
        Some(t) => t.replace("\\\"", "\"").replace("\\\\", "\\"),
        None => s.to_owned(),
    }
}

pub fn group_witnesses(ws: &WitnessSet) -> GroupedWorldViews {
    let mut by_guess: BTreeMap<BTreeSet<String>, BTreeSet<BTreeSet<String>>> = BTreeMap::new();
    for w in &ws.witnesses {
        let mut guess = BTreeSet::new();
        let mut member = BTreeSet::new();
        for atom in w {
            match split_atom(atom) {
                Some(("g", args)) if args.len() == 2 => {
                    guess.insert(atom.clone());
                }
                Some(("v_check1", args)) if args.len() == 2 && args[1] == "1" => {
                    member.insert(unquote(args[0]));
                }
                _ => {}
            }
        }
        by_guess.entry(guess).or_default().insert(member);
    }
    let groups =
        by_guess.into_iter().map(|(guess, members)| Group { guess, members: members.into_iter().collect() }).collect();
    GroupedWorldViews { groups }
}

fn braces<'a>(items: impl IntoIterator<Item = &'a String>) -> String {
    let v: Vec<&str> = items.into_iter().map(String::as_str).collect();
    format!("{{{}}}", v.join(", "))
}

/// One guess line per group followed by one indented line per member.
impl fmt::Display for GroupedWorldViews {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (i, g) in self.groups.iter().enumerate() {
            let _ = writeln!(out, "World view {}: {}", i + 1, braces(&g.guess));
            for m in &g.members {
                let _ = writeln!(out, "  {}", braces(m));
            }
        }
        f.write_str(&out)
    }
}
