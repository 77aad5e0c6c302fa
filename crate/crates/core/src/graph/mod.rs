//! Undirected graphs, tree decompositions and the min-fill heuristic.

mod decompose;

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::asp::NonGroundRule;
use crate::model::ElpProgram;

pub use decompose::{decompose_program, decompose_rule, DecomposeError};

/// Simple undirected graph over `0..n`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl UGraph {
    pub fn new(n: usize) -> Self {
        UGraph { adj: vec![BTreeSet::new(); n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Adds `{u, v}`; self-loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn add_clique(&mut self, vs: &[usize]) {
        for (i, &u) in vs.iter().enumerate() {
            for &v in &vs[i + 1..] {
                self.add_edge(u, v);
            }
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
    }
}

/// Rooted tree of bags. Node `root` has no parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
    pub root: usize,
}

impl TreeDecomposition {
    /// One node holding `0..n`.
    pub fn trivial(n: usize) -> Self {
        TreeDecomposition { bags: vec![(0..n).collect()], parent: vec![None], root: 0 }
    }

    pub fn node_count(&self) -> usize {
        self.bags.len()
    }

    /// Largest bag size minus one; 0 for decompositions of empty graphs.
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(t);
            }
        }
        ch
    }

    /// Nodes with every child before its parent, children in index order.
    pub fn post_order(&self) -> Vec<usize> {
        let ch = self.children();
        let mut out = Vec::with_capacity(self.bags.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, done)) = stack.pop() {
            if done {
                out.push(t);
            } else {
                stack.push((t, true));
                for &c in ch[t].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn depths(&self) -> Vec<usize> {
        let ch = self.children();
        let mut d = vec![0; self.bags.len()];
        let mut stack = vec![self.root];
        while let Some(t) = stack.pop() {
            for &c in &ch[t] {
                d[c] = d[t] + 1;
                stack.push(c);
            }
        }
        d
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TdDiagnostic {
    /// Parent links do not form a single tree rooted at `root`.
    NotATree(String),
    VertexUncovered(usize),
    EdgeUncovered(usize, usize),
    Disconnected(usize),
}

impl fmt::Display for TdDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdDiagnostic::NotATree(m) => write!(f, "not a tree: {m}"),
            TdDiagnostic::VertexUncovered(v) => write!(f, "vertex {v} is in no bag"),
            TdDiagnostic::EdgeUncovered(u, v) => write!(f, "edge {{{u},{v}}} is in no bag"),
            TdDiagnostic::Disconnected(v) => write!(f, "bags containing vertex {v} are not connected"),
        }
    }
}

/// Checks vertex coverage, edge coverage and connectedness.
pub fn td_validate(g: &UGraph, td: &TreeDecomposition) -> Vec<TdDiagnostic> {
    let k = td.bags.len();
    if k == 0 || td.parent.len() != k || td.root >= k {
        return vec![TdDiagnostic::NotATree("node count mismatch or missing root".into())];
    }
    if td.parent[td.root].is_some() {
        return vec![TdDiagnostic::NotATree("root has a parent".into())];
    }
    for (t, p) in td.parent.iter().enumerate() {
        match p {
            None if t != td.root => return vec![TdDiagnostic::NotATree(format!("node {t} is a second root"))],
            Some(p) if *p >= k => return vec![TdDiagnostic::NotATree(format!("node {t} has a dangling parent"))],
            _ => {}
        }
    }
    if td.post_order().len() != k {
        return vec![TdDiagnostic::NotATree("parent links contain a cycle".into())];
    }
    let n = g.vertex_count();
    if td.bags.iter().flatten().any(|v| *v >= n) {
        return vec![TdDiagnostic::NotATree("bag mentions a vertex outside the graph".into())];
    }
    let sets: Vec<BTreeSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    let mut out = Vec::new();
    let mut tops = vec![0usize; n];
    let mut seen = vec![false; n];
    for (t, bag) in sets.iter().enumerate() {
        for &v in bag {
            seen[v] = true;
            if td.parent[t].is_none_or(|p| !sets[p].contains(&v)) {
                tops[v] += 1;
            }
        }
    }
    out.extend((0..n).filter(|&v| !seen[v]).map(TdDiagnostic::VertexUncovered));
    for (u, v) in g.edges() {
        if seen[u] && seen[v] && !sets.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            out.push(TdDiagnostic::EdgeUncovered(u, v));
        }
    }
    out.extend((0..n).filter(|&v| tops[v] > 1).map(TdDiagnostic::Disconnected));
    out
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let ns: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in ns.iter().enumerate() {
        for &b in &ns[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Min-fill elimination ordering. Ties go to the lowest vertex index when
/// `seed == 0`, otherwise to a seeded random choice.
pub fn minfill_order(g: &UGraph, seed: u64) -> Vec<usize> {
    let n = g.vertex_count();
    let mut adj = g.adj.clone();
    let mut alive = vec![true; n];
    let mut fill: Vec<Option<usize>> = vec![None; n];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = usize::MAX;
        let mut ties = Vec::new();
        for v in (0..n).filter(|v| alive[*v]) {
            let f = *fill[v].get_or_insert_with(|| fill_in(&adj, v));
            if f < best {
                best = f;
                ties.clear();
            }
            if f == best {
                ties.push(v);
            }
        }
        let v = if seed == 0 { ties[0] } else { *ties.choose(&mut rng).expect("some vertex is alive") };
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for &a in &ns {
            adj[a].remove(&v);
        }
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        // fill values change only within distance two of v
        for &a in &ns {
            fill[a] = None;
            for &b in &adj[a] {
                fill[b] = None;
            }
        }
        adj[v].clear();
        alive[v] = false;
        order.push(v);
    }
    order
}

/// Tree decomposition from an elimination ordering: each vertex contributes
/// the bag of itself and its later neighbours in the fill graph.
pub fn td_from_order(g: &UGraph, order: &[usize]) -> TreeDecomposition {
    let n = g.vertex_count();
    if n == 0 {
        return TreeDecomposition { bags: vec![Vec::new()], parent: vec![None], root: 0 };
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut adj = g.adj.clone();
    let mut bags: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj[v].iter().copied().filter(|u| pos[*u] > i).collect();
        for (a, &x) in later.iter().enumerate() {
            for &y in &later[a + 1..] {
                adj[x].insert(y);
                adj[y].insert(x);
            }
        }
        parent[i] = later.iter().map(|u| pos[*u]).min();
        let mut bag = later;
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
    }
    // join component roots under the last eliminated vertex
    let root = n - 1;
    for (i, p) in parent.iter_mut().enumerate() {
        if p.is_none() && i != root {
            *p = Some(root);
        }
    }
    compact(TreeDecomposition { bags, parent, root })
}

/// Merges every bag that is a subset of its parent's bag into the parent
/// and renumbers nodes in pre-order.
fn compact(td: TreeDecomposition) -> TreeDecomposition {
    let k = td.bags.len();
    let mut rep: Vec<usize> = (0..k).collect();
    let order = td.post_order();
    let sets: Vec<BTreeSet<usize>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    let mut removed = vec![false; k];
    for &t in &order {
        if let Some(p) = td.parent[t] {
            if sets[t].is_subset(&sets[p]) {
                removed[t] = true;
                rep[t] = p;
            }
        }
    }
    let find = |mut t: usize| {
        while rep[t] != t {
            t = rep[t];
        }
        t
    };
    let mut new_parent: Vec<Option<usize>> = vec![None; k];
    for t in 0..k {
        if !removed[t] {
            new_parent[t] = td.parent[t].map(find);
        }
    }
    // pre-order renumbering
    let mut ch = vec![Vec::new(); k];
    for (t, parent) in new_parent.iter().enumerate() {
        if let Some(p) = *parent {
            ch[p].push(t);
        }
    }
    let mut index = HashMap::new();
    let mut stack = vec![td.root];
    let mut pre = Vec::new();
    while let Some(t) = stack.pop() {
        index.insert(t, pre.len());
        pre.push(t);
        for &c in ch[t].iter().rev() {
            stack.push(c);
        }
    }
    TreeDecomposition {
        bags: pre.iter().map(|&t| td.bags[t].clone()).collect(),
        parent: pre.iter().map(|&t| new_parent[t].map(|p| index[&p])).collect(),
        root: 0,
    }
}

/// Heuristic tree decomposition by min-fill elimination.
pub fn td_minfill(g: &UGraph, seed: u64) -> TreeDecomposition {
    td_from_order(g, &minfill_order(g, seed))
}

/// Atoms as vertices (atom `a_i` is vertex `i - 1`), joined when they occur
/// in a common rule.
pub fn primal_graph(p: &ElpProgram) -> UGraph {
    let mut g = UGraph::new(p.atoms.len());
    for r in &p.rules {
        let vs: Vec<usize> = r.occurrences().map(|a| a.pos()).collect();
        g.add_clique(&vs);
    }
    g
}

/// Variables as vertices, joined when they occur in a common atom. Returns
/// the graph and the variable names, indexed by vertex.
pub fn rule_graph(r: &NonGroundRule) -> (UGraph, Vec<String>) {
    let names: Vec<String> = r.variables().into_iter().map(str::to_owned).collect();
    let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut g = UGraph::new(names.len());
    for a in r.atoms() {
        let vs: Vec<usize> = a.vars().into_iter().map(|v| index[v]).collect();
        g.add_clique(&vs);
    }
    (g, names)
}

/// Min-fill width estimate of a rule's variable graph.
pub fn rule_width(r: &NonGroundRule) -> usize {
    td_minfill(&rule_graph(r).0, 0).width()
}

fn dot_label(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// DOT rendering of a graph with the given vertex labels.
pub fn graph_to_dot(g: &UGraph, labels: &[String]) -> String {
    let mut s = String::from("graph G {\n");
    for (v, l) in labels.iter().enumerate().take(g.vertex_count()) {
        let _ = writeln!(s, "  v{v} [label=\"{}\"];", dot_label(l));
    }
    for (u, v) in g.edges() {
        let _ = writeln!(s, "  v{u} -- v{v};");
    }
    s.push_str("}\n");
    s
}

/// DOT rendering of a decomposition; bags list vertex labels.
pub fn td_to_dot(td: &TreeDecomposition, labels: &[String]) -> String {
    let mut s = String::from("graph TD {\n  node [shape=box];\n");
    for (t, bag) in td.bags.iter().enumerate() {
        let names: Vec<String> = bag.iter().map(|v| dot_label(&labels[*v])).collect();
        let _ = writeln!(s, "  t{t} [label=\"{t}: {{{}}}\"];", names.join(", "));
    }
    for (t, p) in td.parent.iter().enumerate() {
        if let Some(p) = p {
            let _ = writeln!(s, "  t{p} -- t{t};");
        }
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_easp_not;

    fn path(n: usize) -> UGraph {
        let mut g = UGraph::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    #[test]
    fn widths_of_small_families() {
        let g = path(6);
        let td = td_minfill(&g, 0);
        assert!(td_validate(&g, &td).is_empty());
        assert_eq!(td.width(), 1);

        let mut k4 = UGraph::new(4);
        k4.add_clique(&[0, 1, 2, 3]);
        assert_eq!(td_minfill(&k4, 0).width(), 3);

        let e = UGraph::new(5);
        let td = td_minfill(&e, 0);
        assert!(td_validate(&e, &td).is_empty());
        assert_eq!(td.width(), 0);

        let empty = UGraph::new(0);
        assert!(td_validate(&empty, &td_minfill(&empty, 0)).is_empty());
    }

    #[test]
    fn validate_detects_problems() {
        let g = path(3);
        let missing = TreeDecomposition { bags: vec![vec![0, 1]], parent: vec![None], root: 0 };
        assert!(td_validate(&g, &missing).contains(&TdDiagnostic::VertexUncovered(2)));
        let split = TreeDecomposition {
            bags: vec![vec![0, 1], vec![1, 2], vec![0]],
            parent: vec![None, Some(0), Some(1)],
            root: 0,
        };
        assert_eq!(td_validate(&g, &split), vec![TdDiagnostic::Disconnected(0)]);
        let edge = TreeDecomposition { bags: vec![vec![0, 1], vec![2]], parent: vec![None, Some(0)], root: 0 };
        assert_eq!(td_validate(&g, &edge), vec![TdDiagnostic::EdgeUncovered(1, 2)]);
    }

    #[test]
    fn seeded_ties_still_valid() {
        let mut g = path(8);
        g.add_edge(0, 7);
        for seed in 0..10 {
            let td = td_minfill(&g, seed);
            assert!(td_validate(&g, &td).is_empty());
            assert_eq!(td.width(), 2);
        }
    }

    #[test]
    fn primal_graphs() {
        let p = parse_easp_not("p :- $not$ q.\nq :- $not$ p.").unwrap();
        let g = primal_graph(&p);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(td_minfill(&g, 0).width(), 1);
        let chain = parse_easp_not("a :- b. b :- c. c :- d. d :- e. e :- f.").unwrap();
        assert_eq!(primal_graph(&chain), path(6));
        assert_eq!(primal_graph(&parse_easp_not("a. b. c.").unwrap()).edge_count(), 0);
    }

    #[test]
    fn dot_output() {
        let g = path(2);
        let labels = vec!["a".to_owned(), "b".to_owned()];
        assert!(graph_to_dot(&g, &labels).contains("v0 -- v1;"));
        assert!(td_to_dot(&td_minfill(&g, 0), &labels).contains("{a, b}"));
    }
}
