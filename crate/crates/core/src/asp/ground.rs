//! Naive bottom-up grounder.
//!
//! Predicates are processed strongly-connected component by component in
//! dependency order; within a component rules are re-evaluated until no new
//! atom becomes derivable. Only instances whose positive body is potentially
//! derivable are kept. Negative literals never block instantiation.

use std::collections::{HashMap, HashSet};

use super::error::AspError;
use super::program::{GroundProgram, GroundRule};
use super::syntax::{NonGroundAtom, NonGroundProgram, Signature, Term};

/// Hard limits on grounding output. Exceeding one aborts with an error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundBudget {
    pub max_rules: usize,
    pub max_atoms: usize,
}

impl Default for GroundBudget {
    fn default() -> Self {
        GroundBudget { max_rules: 2_000_000, max_atoms: 100_000 }
    }
}

type TermId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum GTerm {
    Int(i64),
    Sym(Box<str>),
    Func(Box<str>, Box<[TermId]>),
}

#[derive(Default)]
struct TermStore {
    terms: Vec<GTerm>,
    map: HashMap<GTerm, TermId>,
}

impl TermStore {
    fn intern(&mut self, t: GTerm) -> TermId {
        if let Some(&id) = self.map.get(&t) {
            return id;
        }
        let id = self.terms.len() as TermId;
        self.terms.push(t.clone());
        self.map.insert(t, id);
        id
    }

    fn lookup_int(&self, i: i64) -> Option<TermId> {
        self.map.get(&GTerm::Int(i)).copied()
    }

    fn int_value(&self, id: TermId) -> Option<i64> {
        match self.terms[id as usize] {
            GTerm::Int(i) => Some(i),
            _ => None,
        }
    }

    fn render(&self, id: TermId, out: &mut String) {
        match &self.terms[id as usize] {
            GTerm::Int(i) => out.push_str(&i.to_string()),
            GTerm::Sym(s) => out.push_str(s),
            GTerm::Func(name, args) => {
                out.push_str(name);
                out.push('(');
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.render(*a, out);
                }
                out.push(')');
            }
        }
    }
}

#[derive(Clone, Debug)]
enum PTerm {
    Const(TermId),
    Var(usize),
    Func(Box<str>, Vec<PTerm>),
    Sub(Box<PTerm>, Box<PTerm>),
}

impl PTerm {
    fn binding_vars(&self, out: &mut Vec<usize>) {
        match self {
            PTerm::Var(v) => out.push(*v),
            PTerm::Func(_, args) => args.iter().for_each(|a| a.binding_vars(out)),
            PTerm::Const(_) | PTerm::Sub(..) => {}
        }
    }

    fn arith_vars(&self, inside: bool, out: &mut Vec<usize>) {
        match self {
            PTerm::Var(v) if inside => out.push(*v),
            PTerm::Var(_) | PTerm::Const(_) => {}
            PTerm::Func(_, args) => args.iter().for_each(|a| a.arith_vars(inside, out)),
            PTerm::Sub(a, b) => {
                a.arith_vars(true, out);
                b.arith_vars(true, out);
            }
        }
    }
}

#[derive(Clone, Debug)]
struct PAtom {
    pred: usize,
    args: Vec<PTerm>,
}

#[derive(Debug)]
struct CompiledRule {
    head: Vec<PAtom>,
    /// Positive body in join order.
    pos: Vec<PAtom>,
    neg: Vec<PAtom>,
    nvars: usize,
}

#[derive(Default)]
struct Relation {
    tuples: Vec<Box<[TermId]>>,
    atom_ids: Vec<u32>,
    index: HashMap<(u32, TermId), Vec<u32>>,
}

type Binding = Vec<Option<TermId>>;

struct Grounder<'b> {
    budget: &'b GroundBudget,
    terms: TermStore,
    preds: Vec<Signature>,
    pred_map: HashMap<Signature, usize>,
    relations: Vec<Relation>,
    atoms: Vec<(usize, Box<[TermId]>)>,
    atom_map: HashMap<(usize, Box<[TermId]>), u32>,
    possible: Vec<bool>,
    rules: Vec<GroundRule>,
    rule_set: HashSet<GroundRule>,
}

impl<'b> Grounder<'b> {
    fn new(budget: &'b GroundBudget) -> Self {
        Grounder {
            budget,
            terms: TermStore::default(),
            preds: Vec::new(),
            pred_map: HashMap::new(),
            relations: Vec::new(),
            atoms: Vec::new(),
            atom_map: HashMap::new(),
            possible: Vec::new(),
            rules: Vec::new(),
            rule_set: HashSet::new(),
        }
    }

    fn pred(&mut self, sig: Signature) -> usize {
        if let Some(&p) = self.pred_map.get(&sig) {
            return p;
        }
        let p = self.preds.len();
        self.preds.push(sig.clone());
        self.pred_map.insert(sig, p);
        self.relations.push(Relation::default());
        p
    }

    fn compile_term(&mut self, t: &Term, vars: &mut Vec<String>) -> PTerm {
        match t {
            Term::Int(i) => PTerm::Const(self.terms.intern(GTerm::Int(*i))),
            Term::Sym(s) => PTerm::Const(self.terms.intern(GTerm::Sym(s.as_str().into()))),
            Term::Var(v) => {
                let idx = match vars.iter().position(|x| x == v) {
                    Some(i) => i,
                    None => {
                        vars.push(v.clone());
                        vars.len() - 1
                    }
                };
                PTerm::Var(idx)
            }
            Term::Func(name, args) => {
                let args: Vec<PTerm> = args.iter().map(|a| self.compile_term(a, vars)).collect();
                if args.iter().all(|a| matches!(a, PTerm::Const(_))) {
                    let ids: Box<[TermId]> = args
                        .iter()
                        .map(|a| match a {
                            PTerm::Const(c) => *c,
                            _ => unreachable!(),
                        })
                        .collect();
                    PTerm::Const(self.terms.intern(GTerm::Func(name.as_str().into(), ids)))
                } else {
                    PTerm::Func(name.as_str().into(), args)
                }
            }
            Term::Sub(a, b) => {
                let a = self.compile_term(a, vars);
                let b = self.compile_term(b, vars);
                if let (PTerm::Const(x), PTerm::Const(y)) = (&a, &b) {
                    if let (Some(x), Some(y)) = (self.terms.int_value(*x), self.terms.int_value(*y)) {
                        if let Some(d) = x.checked_sub(y) {
                            return PTerm::Const(self.terms.intern(GTerm::Int(d)));
                        }
                    }
                }
                PTerm::Sub(Box::new(a), Box::new(b))
            }
        }
    }

    fn compile_atom(&mut self, a: &NonGroundAtom, vars: &mut Vec<String>) -> PAtom {
        let pred = self.pred(a.signature());
        let args = a.terms.iter().map(|t| self.compile_term(t, vars)).collect();
        PAtom { pred, args }
    }

    fn compile_rule(&mut self, index: usize, rule: &super::syntax::NonGroundRule) -> Result<CompiledRule, AspError> {
        let unsafe_vars = rule.unsafe_variables();
        if !unsafe_vars.is_empty() {
            return Err(AspError::Unsafe { rule: index, vars: unsafe_vars.iter().map(|s| s.to_string()).collect() });
        }
        let mut vars = Vec::new();
        let pos: Vec<PAtom> = rule.pos.iter().map(|a| self.compile_atom(a, &mut vars)).collect();
        let head = rule.head.iter().map(|a| self.compile_atom(a, &mut vars)).collect();
        let neg = rule.neg.iter().map(|a| self.compile_atom(a, &mut vars)).collect();
        let pos = join_order(pos, vars.len()).ok_or(AspError::JoinOrder(index))?;
        Ok(CompiledRule { head, pos, neg, nvars: vars.len() })
    }

    fn intern_atom(&mut self, pred: usize, args: Box<[TermId]>) -> Result<u32, AspError> {
        if let Some(&id) = self.atom_map.get(&(pred, args.clone())) {
            return Ok(id);
        }
        if self.atoms.len() >= self.budget.max_atoms {
            return Err(AspError::GroundBudget { what: "ground atoms", limit: self.budget.max_atoms });
        }
        let id = self.atoms.len() as u32;
        self.atoms.push((pred, args.clone()));
        self.atom_map.insert((pred, args), id);
        self.possible.push(false);
        Ok(id)
    }

    fn make_possible(&mut self, id: u32) -> bool {
        if self.possible[id as usize] {
            return false;
        }
        self.possible[id as usize] = true;
        let (pred, args) = self.atoms[id as usize].clone();
        let rel = &mut self.relations[pred];
        let t = rel.tuples.len() as u32;
        for (i, a) in args.iter().enumerate() {
            rel.index.entry((i as u32, *a)).or_default().push(t);
        }
        rel.tuples.push(args);
        rel.atom_ids.push(id);
        true
    }

    /// Instantiates `rule` against the current relations; returns whether
    /// any new atom became derivable.
    fn evaluate(&mut self, rule: &CompiledRule) -> Result<bool, AspError> {
        let mut found = Vec::new();
        let mut binding: Binding = vec![None; rule.nvars];
        join(&self.terms, &self.relations, &rule.pos, 0, &mut binding, &mut Vec::new(), &mut found);
        let mut changed = false;
        for (b, pos_ids) in found {
            let mut head = Vec::with_capacity(rule.head.len());
            let mut neg = Vec::with_capacity(rule.neg.len());
            let mut ok = true;
            for a in &rule.head {
                match self.instantiate_atom(a, &b)? {
                    Some(id) => head.push(id),
                    None => ok = false,
                }
            }
            for a in &rule.neg {
                // an undefined negated atom is simply false
                if let Some(id) = self.instantiate_atom(a, &b)? {
                    neg.push(id);
                }
            }
            if !ok {
                continue;
            }
            let g = GroundRule::new(head, pos_ids, neg);
            if self.rule_set.contains(&g) {
                continue;
            }
            if self.rules.len() >= self.budget.max_rules {
                return Err(AspError::GroundBudget { what: "ground rules", limit: self.budget.max_rules });
            }
            for &h in &g.head {
                changed |= self.make_possible(h);
            }
            self.rule_set.insert(g.clone());
            self.rules.push(g);
        }
        Ok(changed)
    }

    fn instantiate_term(&mut self, t: &PTerm, b: &Binding) -> Option<TermId> {
        match t {
            PTerm::Const(c) => Some(*c),
            PTerm::Var(v) => b[*v],
            PTerm::Func(name, args) => {
                let ids = args.iter().map(|a| self.instantiate_term(a, b)).collect::<Option<Box<[TermId]>>>()?;
                Some(self.terms.intern(GTerm::Func(name.clone(), ids)))
            }
            PTerm::Sub(..) => {
                let v = eval(&self.terms, t, b)?;
                Some(self.terms.intern(GTerm::Int(v)))
            }
        }
    }

    fn instantiate_atom(&mut self, a: &PAtom, b: &Binding) -> Result<Option<u32>, AspError> {
        let args = a.args.iter().map(|t| self.instantiate_term(t, b)).collect::<Option<Box<[TermId]>>>();
        match args {
            Some(args) => self.intern_atom(a.pred, args).map(Some),
            None => Ok(None),
        }
    }

    fn atom_text(&self, id: u32) -> String {
        let (pred, args) = &self.atoms[id as usize];
        let mut s = self.preds[*pred].name.clone();
        if !args.is_empty() {
            s.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                self.terms.render(*a, &mut s);
            }
            s.push(')');
        }
        s
    }
}

fn eval(terms: &TermStore, t: &PTerm, b: &Binding) -> Option<i64> {
    match t {
        PTerm::Const(c) => terms.int_value(*c),
        PTerm::Var(v) => b[*v].and_then(|id| terms.int_value(id)),
        PTerm::Sub(x, y) => eval(terms, x, b)?.checked_sub(eval(terms, y, b)?),
        PTerm::Func(..) => None,
    }
}

/// Greedy join order: repeatedly pick the atom with the fewest unbound
/// variables among those whose arithmetic can be evaluated once the atom
/// itself is matched. Ties keep source order.
fn join_order(pos: Vec<PAtom>, nvars: usize) -> Option<Vec<PAtom>> {
    let mut bound = vec![false; nvars];
    let mut remaining: Vec<Option<PAtom>> = pos.into_iter().map(Some).collect();
    let mut out = Vec::with_capacity(remaining.len());
    while out.len() < remaining.len() {
        let mut best: Option<(usize, usize)> = None;
        for (i, a) in remaining.iter().enumerate() {
            let Some(a) = a else { continue };
            let mut bvars = Vec::new();
            a.args.iter().for_each(|t| t.binding_vars(&mut bvars));
            let mut avars = Vec::new();
            a.args.iter().for_each(|t| t.arith_vars(false, &mut avars));
            if avars.iter().any(|v| !bound[*v] && !bvars.contains(v)) {
                continue;
            }
            let mut unbound: Vec<usize> = bvars.into_iter().filter(|v| !bound[*v]).collect();
            unbound.sort_unstable();
            unbound.dedup();
            if best.is_none_or(|(_, n)| unbound.len() < n) {
                best = Some((i, unbound.len()));
            }
        }
        let (i, _) = best?;
        let a = remaining[i].take().unwrap();
        let mut bvars = Vec::new();
        a.args.iter().for_each(|t| t.binding_vars(&mut bvars));
        for v in bvars {
            bound[v] = true;
        }
        out.push(a);
    }
    Some(out)
}

fn match_term(terms: &TermStore, p: &PTerm, t: TermId, b: &mut Binding, trail: &mut Vec<usize>, arith: bool) -> bool {
    match p {
        PTerm::Const(c) => *c == t,
        PTerm::Var(v) => match b[*v] {
            Some(x) => x == t,
            None => {
                b[*v] = Some(t);
                trail.push(*v);
                true
            }
        },
        PTerm::Func(name, args) => match &terms.terms[t as usize] {
            GTerm::Func(n2, a2) if n2 == name && a2.len() == args.len() => {
                args.iter().zip(a2.iter()).all(|(p, t)| match_term(terms, p, *t, b, trail, arith))
            }
            _ => false,
        },
        PTerm::Sub(..) => !arith || eval(terms, p, b).is_some_and(|v| terms.int_value(t) == Some(v)),
    }
}

fn key_for(terms: &TermStore, p: &PTerm, b: &Binding) -> Option<Option<TermId>> {
    match p {
        PTerm::Const(c) => Some(Some(*c)),
        PTerm::Var(v) => b[*v].map(Some),
        PTerm::Sub(..) => eval(terms, p, b).map(|v| terms.lookup_int(v)),
        PTerm::Func(..) => None,
    }
}

fn join(
    terms: &TermStore,
    relations: &[Relation],
    atoms: &[PAtom],
    depth: usize,
    b: &mut Binding,
    ids: &mut Vec<u32>,
    out: &mut Vec<(Binding, Vec<u32>)>,
) {
    if depth == atoms.len() {
        out.push((b.clone(), ids.clone()));
        return;
    }
    let atom = &atoms[depth];
    let rel = &relations[atom.pred];
    let mut candidates: Option<&[u32]> = None;
    for (i, p) in atom.args.iter().enumerate() {
        match key_for(terms, p, b) {
            Some(Some(tid)) => {
                let list = rel.index.get(&(i as u32, tid)).map(Vec::as_slice).unwrap_or(&[]);
                if candidates.is_none_or(|c| list.len() < c.len()) {
                    candidates = Some(list);
                }
            }
            // value not interned, so nothing can match
            Some(None) => return,
            None => {}
        }
    }
    let mut trail = Vec::new();
    let mut visit = |t: usize, b: &mut Binding, ids: &mut Vec<u32>, out: &mut Vec<(Binding, Vec<u32>)>| {
        let tuple = &rel.tuples[t];
        if tuple.len() != atom.args.len() {
            return;
        }
        trail.clear();
        let ok = atom.args.iter().zip(tuple.iter()).all(|(p, v)| match_term(terms, p, *v, b, &mut trail, false))
            && atom.args.iter().zip(tuple.iter()).all(|(p, v)| match_term(terms, p, *v, b, &mut trail, true));
        if ok {
            ids.push(rel.atom_ids[t]);
            join(terms, relations, atoms, depth + 1, b, ids, out);
            ids.pop();
        }
        for v in trail.drain(..) {
            b[v] = None;
        }
    };
    match candidates {
        Some(list) => {
            for &t in list {
                visit(t as usize, b, ids, out);
            }
        }
        None => {
            for t in 0..rel.tuples.len() {
                visit(t, b, ids, out);
            }
        }
    }
}

/// Tarjan's algorithm; returns components in reverse topological order of
/// the condensation (sinks first).
fn tarjan(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    struct State<'a> {
        adj: &'a [Vec<usize>],
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for i in 0..s.adj[v].len() {
            let w = s.adj[v][i];
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                Some(_) => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            loop {
                let w = s.stack.pop().unwrap();
                s.on_stack[w] = false;
                comp.push(w);
                if w == v {
                    break;
                }
            }
            s.out.push(comp);
        }
    }
    let mut s = State {
        adj,
        index: vec![None; n],
        low: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..n {
        if s.index[v].is_none() {
            visit(&mut s, v);
        }
    }
    s.out
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut x = x;
    while parent[x] != r {
        let next = parent[x];
        parent[x] = r;
        x = next;
    }
    r
}

/// Grounds `p` by relevance-based bottom-up instantiation.
pub fn ground(p: &NonGroundProgram, budget: &GroundBudget) -> Result<GroundProgram, AspError> {
    let mut g = Grounder::new(budget);
    let compiled = p.rules.iter().enumerate().map(|(i, r)| g.compile_rule(i, r)).collect::<Result<Vec<_>, _>>()?;

    // Head predicates of one rule share a component so that a rule is
    // evaluated exactly when all of its heads are being computed.
    let np = g.preds.len();
    let mut uf: Vec<usize> = (0..np).collect();
    for r in &compiled {
        for w in r.head.windows(2) {
            let (a, b) = (find(&mut uf, w[0].pred), find(&mut uf, w[1].pred));
            uf[a] = b;
        }
    }
    let class: Vec<usize> = (0..np).map(|p| find(&mut uf, p)).collect();
    let mut adj = vec![Vec::new(); np];
    for r in &compiled {
        if let Some(h) = r.head.first() {
            for b in &r.pos {
                adj[class[b.pred]].push(class[h.pred]);
            }
        }
    }
    let mut comps = tarjan(np, &adj);
    comps.reverse();
    let mut comp_of = vec![0; np];
    for (ci, comp) in comps.iter().enumerate() {
        for &c in comp {
            comp_of[c] = ci;
        }
    }
    let mut by_comp: Vec<Vec<usize>> = vec![Vec::new(); comps.len()];
    let mut constraints = Vec::new();
    for (ri, r) in compiled.iter().enumerate() {
        match r.head.first() {
            Some(h) => by_comp[comp_of[class[h.pred]]].push(ri),
            None => constraints.push(ri),
        }
    }
    for (ci, rules) in by_comp.iter().enumerate() {
        let recursive = comps[ci].len() > 1
            || rules.iter().any(|&ri| compiled[ri].pos.iter().any(|b| comp_of[class[b.pred]] == ci));
        loop {
            let mut changed = false;
            for &ri in rules {
                changed |= g.evaluate(&compiled[ri])?;
            }
            if !recursive || !changed {
                break;
            }
        }
    }
    for &ri in &constraints {
        g.evaluate(&compiled[ri])?;
    }

    let texts: Vec<String> = (0..g.atoms.len() as u32).map(|id| g.atom_text(id)).collect();
    let sigs: Vec<Signature> = g.atoms.iter().map(|(p, _)| g.preds[*p].clone()).collect();
    let mut out = GroundProgram::from_rules(texts.into_iter().zip(sigs).collect(), g.rules);
    out.projection = p.projection.clone();
    Ok(out)
}
