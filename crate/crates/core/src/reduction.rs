//! Translation of a ground ELP into a non-ground ASP program of bounded arity
//! whose answer sets encode the guesses that yield candidate world views.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::asp::{
    ground, has_answer_set, project_answer_sets, AspError, GroundBudget, NonGroundAtom, NonGroundProgram,
    NonGroundRule, Signature, Term,
};
use crate::exec::{self, Parallelism};
use crate::graph::{primal_graph, td_minfill, TreeDecomposition};
use crate::model::{
    validate, AtomId, AtomTable, BodyElement, ElpProgram, ElpRule, EpistemicLiteral, Guess, Interpretation, WorldView,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BssMode {
    #[default]
    Naive,
    /// Strict-subset check split along a tree decomposition of the primal graph.
    TdGuided,
}

impl FromStr for BssMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(BssMode::Naive),
            "td" | "td-guided" => Ok(BssMode::TdGuided),
            other => Err(format!("unknown subset-check mode {other:?} (expected naive or td)")),
        }
    }
}

impl fmt::Display for BssMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BssMode::Naive => "naive",
            BssMode::TdGuided => "td",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReductionOptions {
    pub bss: BssMode,
    pub emit_projection: bool,
    pub td_seed: u64,
    pub parallelism: Parallelism,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("invalid program: {0}")]
    Invalid(String),
    #[error("subset check needs at least one atom")]
    NoAtoms,
    #[error("decomposition does not fit the program: {0}")]
    BadDecomposition(String),
    #[error(transparent)]
    Asp(#[from] AspError),
}

/// Which copy of the assignment relation a block reads from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Context {
    Check1,
    /// The k-th epistemic literal in first-occurrence order, 1-based.
    Elit(usize),
    Check3,
}

impl Context {
    pub fn predicate(self) -> String {
        match self {
            Context::Check1 => "v_check1".into(),
            Context::Elit(k) => format!("v_e{k}"),
            Context::Check3 => "v_check3".into(),
        }
    }
}

fn atom(pred: &str, terms: Vec<Term>) -> NonGroundAtom {
    NonGroundAtom::new(pred, terms)
}

fn or(a: Term, b: Term, c: Term) -> NonGroundAtom {
    atom("or", vec![a, b, c])
}

fn int(v: i64) -> Term {
    Term::Int(v)
}

/// `a ↦ a`, `¬a ↦ neg(a)`.
pub fn literal_constant(atoms: &AtomTable, e: EpistemicLiteral) -> Term {
    let name = Term::sym(atoms.name(e.inner.atom));
    if e.inner.negated {
        Term::Func("neg".into(), vec![name])
    } else {
        name
    }
}

pub fn atom_constant(atoms: &AtomTable, a: AtomId) -> Term {
    Term::sym(atoms.name(a))
}

/// `X1..Xn` or `Y1..Yn`, indexed by atom position.
pub fn atom_vars(prefix: &str, n: usize) -> Vec<Term> {
    (1..=n).map(|i| Term::var(format!("{prefix}{i}"))).collect()
}

pub fn build_facts(p: &ElpProgram) -> Vec<NonGroundRule> {
    let mut out: Vec<NonGroundRule> =
        p.atoms.ids().map(|a| NonGroundRule::fact(atom("atom", vec![atom_constant(&p.atoms, a)]))).collect();
    out.extend(p.elits().into_iter().map(|e| NonGroundRule::fact(atom("elit", vec![literal_constant(&p.atoms, e)]))));
    for (a, b) in [(0, 0), (0, 1), (1, 1)] {
        out.push(NonGroundRule::fact(atom("leq", vec![int(a), int(b)])));
    }
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        out.push(NonGroundRule::fact(or(int(a), int(b), int(a | b))));
    }
    out
}

pub fn build_guess() -> NonGroundRule {
    let l = Term::var("L");
    NonGroundRule::new(
        vec![atom("g", vec![l.clone(), int(1)]), atom("g", vec![l.clone(), int(0)])],
        vec![atom("elit", vec![l])],
        vec![],
    )
}

/// Left-folded split of a k-ary `or` into ternary atoms; helper variables
/// are named `<helper>1`, `<helper>2`, ….
pub fn flatten_or(args: &[Term], result: Term, helper: &str) -> Vec<NonGroundAtom> {
    assert!(args.len() >= 2, "or needs at least two arguments");
    let mut out = Vec::with_capacity(args.len() - 1);
    let mut acc = args[0].clone();
    for (k, a) in args[1..].iter().enumerate() {
        let last = k + 2 == args.len();
        let next = if last { result.clone() } else { Term::var(format!("{helper}{}", k + 1)) };
        out.push(or(acc, a.clone(), next.clone()));
        acc = next;
    }
    out
}

/// Evaluates rule `r` (1-based index `ri`) to `result`: 1 iff the reduct of
/// `r` is satisfied when head and positive atoms are read from `y` and
/// negated atoms from `x`.
pub fn b_sat(atoms: &AtomTable, r: &ElpRule, ri: usize, x: &[Term], y: &[Term], result: Term) -> Vec<NonGroundAtom> {
    let m = r.head.len() + r.body.len();
    if m == 0 {
        return match result {
            Term::Int(0) => Vec::new(),
            other => vec![or(int(0), int(0), other)],
        };
    }
    let r_var = |j: usize| -> Term {
        if j == 0 {
            int(0)
        } else if j == m {
            result.clone()
        } else {
            Term::var(format!("R_r{ri}_{j}"))
        }
    };
    let mut out = Vec::new();
    for (idx, &h) in r.head.iter().enumerate() {
        let j = idx + 1;
        out.push(or(r_var(j - 1), y[h.pos()].clone(), r_var(j)));
    }
    for (idx, b) in r.body.iter().enumerate() {
        let j = r.head.len() + idx + 1;
        let (prev, next) = (r_var(j - 1), r_var(j));
        match *b {
            BodyElement::Plain(l) if !l.negated => out.push(or(prev, Term::one_minus(y[l.atom.pos()].clone()), next)),
            BodyElement::Plain(l) => out.push(or(prev, x[l.atom.pos()].clone(), next)),
            BodyElement::Elit { elit, negated } => {
                let a = elit.inner.atom.pos();
                let n = Term::var(format!("N_r{ri}_{j}"));
                out.push(atom("g", vec![literal_constant(atoms, elit), n.clone()]));
                match (negated, elit.inner.negated) {
                    (false, false) | (false, true) => {
                        let t = Term::var(format!("T_r{ri}_{j}"));
                        let inner = if elit.inner.negated { y[a].clone() } else { Term::one_minus(x[a].clone()) };
                        out.push(or(n, inner, t.clone()));
                        out.push(or(prev, Term::one_minus(t), next));
                    }
                    (true, false) => out.extend(flatten_or(
                        &[prev, n, Term::one_minus(y[a].clone())],
                        next,
                        &format!("H_r{ri}_{j}_"),
                    )),
                    (true, true) => out.extend(flatten_or(&[prev, n, x[a].clone()], next, &format!("H_r{ri}_{j}_"))),
                }
            }
        }
    }
    out
}

/// `Y ⊊ X` over all atoms, as one chain of `or` atoms.
pub fn b_ss_naive(x: &[Term], y: &[Term]) -> Result<Vec<NonGroundAtom>, ReductionError> {
    let n = x.len();
    if n == 0 {
        return Err(ReductionError::NoAtoms);
    }
    let chain = |i: usize| -> Term {
        if i == 0 {
            int(0)
        } else if i == n {
            int(1)
        } else {
            Term::var(format!("Ns{i}"))
        }
    };
    let mut out = Vec::with_capacity(2 * n);
    for i in 1..=n {
        out.push(atom("leq", vec![y[i - 1].clone(), x[i - 1].clone()]));
        out.push(or(chain(i - 1), Term::minus(x[i - 1].clone(), y[i - 1].clone()), chain(i)));
    }
    Ok(out)
}

/// `Y ⊊ X` built bag by bag: every node ORs the differences of its bag with
/// its children's results and the root's result is fixed to 1.
pub fn b_ss_td(x: &[Term], y: &[Term], td: &TreeDecomposition) -> Result<Vec<NonGroundAtom>, ReductionError> {
    let n = x.len();
    if n == 0 {
        return Err(ReductionError::NoAtoms);
    }
    let mut covered = vec![false; n];
    for bag in &td.bags {
        for &v in bag {
            if v >= n {
                return Err(ReductionError::BadDecomposition(format!("vertex {v} is not an atom position")));
            }
            covered[v] = true;
        }
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return Err(ReductionError::BadDecomposition(format!("atom position {v} is in no bag")));
    }
    if td.root >= td.bags.len() || td.parent.len() != td.bags.len() {
        return Err(ReductionError::BadDecomposition("malformed tree".into()));
    }
    let children = td.children();
    let mut value: Vec<Term> = vec![int(0); td.bags.len()];
    let mut out = Vec::new();
    for t in td.post_order() {
        let is_root = t == td.root;
        let bag = &td.bags[t];
        let kids = &children[t];
        let m = bag.len();
        let node_value = if is_root { int(1) } else { Term::var(format!("Nt{t}")) };
        let step = |j: usize| -> Term {
            if j == 0 {
                int(0)
            } else if j == m && kids.is_empty() {
                node_value.clone()
            } else {
                Term::var(format!("Nt{t}_{j}"))
            }
        };
        for (idx, &i) in bag.iter().enumerate() {
            let j = idx + 1;
            out.push(atom("leq", vec![y[i].clone(), x[i].clone()]));
            out.push(or(step(j - 1), Term::minus(x[i].clone(), y[i].clone()), step(j)));
        }
        if kids.is_empty() {
            value[t] = if m == 0 { int(0) } else { node_value.clone() };
            if is_root && m == 0 {
                out.push(or(int(0), int(0), int(1)));
            }
        } else {
            let mut args = vec![step(m)];
            args.extend(kids.iter().map(|&c| value[c].clone()));
            out.extend(flatten_or(&args, node_value.clone(), &format!("Ht{t}_")));
            value[t] = node_value;
        }
    }
    Ok(out)
}

/// `v_C(a_i, X_i)` for the given atoms.
pub fn b_val(
    ctx: Context,
    atoms: &AtomTable,
    which: impl IntoIterator<Item = AtomId>,
    x: &[Term],
) -> Vec<NonGroundAtom> {
    let pred = ctx.predicate();
    which.into_iter().map(|a| atom(&pred, vec![atom_constant(atoms, a), x[a.pos()].clone()])).collect()
}

/// Some `Y ⊊ X` satisfies every rule of the reduct relative to `X`.
pub fn b_red(
    ctx: Context,
    p: &ElpProgram,
    td: Option<&TreeDecomposition>,
) -> Result<Vec<NonGroundAtom>, ReductionError> {
    let n = p.atoms.len();
    let (x, y) = (atom_vars("X", n), atom_vars("Y", n));
    let mut out = b_val(ctx, &p.atoms, p.atoms.ids(), &x);
    out.extend(match td {
        Some(td) => b_ss_td(&x, &y, td)?,
        None => b_ss_naive(&x, &y)?,
    });
    for (ri, r) in p.rules.iter().enumerate() {
        out.extend(b_sat(&p.atoms, r, ri + 1, &x, &y, int(1)));
    }
    Ok(out)
}

fn h_val(ctx: Context, guard: Option<Term>) -> NonGroundRule {
    let pred = ctx.predicate();
    let a = Term::var("A");
    let mut body = vec![atom("atom", vec![a.clone()])];
    if let Some(c) = guard {
        body.push(atom("g", vec![c, int(1)]));
    }
    NonGroundRule::new(vec![atom(&pred, vec![a.clone(), int(1)]), atom(&pred, vec![a, int(0)])], body, vec![])
}

/// `B_val` over the atoms of `r` together with `B_sat(r; X, X, 0)`.
fn violated(ctx: Context, p: &ElpProgram, ri: usize) -> Vec<NonGroundAtom> {
    let r = &p.rules[ri];
    let x = atom_vars("X", p.atoms.len());
    let mut body = b_val(ctx, &p.atoms, r.occurrences(), &x);
    body.extend(b_sat(&p.atoms, r, ri + 1, &x, &x, int(0)));
    body
}

fn minimality(
    ctx: Context,
    p: &ElpProgram,
    td: Option<&TreeDecomposition>,
) -> Result<Option<Vec<NonGroundAtom>>, ReductionError> {
    if p.atoms.is_empty() {
        return Ok(None);
    }
    b_red(ctx, p, td).map(Some)
}

pub fn build_check1(p: &ElpProgram, td: Option<&TreeDecomposition>) -> Result<Vec<NonGroundRule>, ReductionError> {
    let ctx = Context::Check1;
    let mut out = vec![h_val(ctx, None)];
    out.extend((0..p.rules.len()).map(|ri| NonGroundRule::constraint(violated(ctx, p, ri), vec![])));
    if let Some(red) = minimality(ctx, p, td)? {
        out.push(NonGroundRule::constraint(red, vec![]));
    }
    Ok(out)
}

pub fn build_check2(p: &ElpProgram, td: Option<&TreeDecomposition>) -> Result<Vec<NonGroundRule>, ReductionError> {
    let mut out = Vec::new();
    for (k, e) in p.elits().into_iter().enumerate() {
        let ctx = Context::Elit(k + 1);
        let c = literal_constant(&p.atoms, e);
        out.push(h_val(ctx, Some(c.clone())));
        let eta = i64::from(e.inner.negated);
        // Guarded so that v_e<k> stays empty when the literal is not guessed.
        out.push(NonGroundRule::new(
            vec![atom(&ctx.predicate(), vec![atom_constant(&p.atoms, e.inner.atom), int(eta)])],
            vec![atom("g", vec![c, int(1)])],
            vec![],
        ));
        out.extend((0..p.rules.len()).map(|ri| NonGroundRule::constraint(violated(ctx, p, ri), vec![])));
        if let Some(red) = minimality(ctx, p, td)? {
            out.push(NonGroundRule::constraint(red, vec![]));
        }
    }
    Ok(out)
}

pub fn build_check3(p: &ElpProgram, td: Option<&TreeDecomposition>) -> Result<Vec<NonGroundRule>, ReductionError> {
    let ctx = Context::Check3;
    let pred = ctx.predicate();
    let sat = || atom("sat", vec![]);
    let a = Term::var("A");
    let mut out = vec![h_val(ctx, None)];
    for v in [0, 1] {
        out.push(NonGroundRule::new(
            vec![atom(&pred, vec![a.clone(), int(v)])],
            vec![sat(), atom("atom", vec![a.clone()])],
            vec![],
        ));
    }
    out.push(NonGroundRule::constraint(vec![], vec![sat()]));
    out.extend((0..p.rules.len()).map(|ri| NonGroundRule::new(vec![sat()], violated(ctx, p, ri), vec![])));
    if let Some(red) = minimality(ctx, p, td)? {
        out.push(NonGroundRule::new(vec![sat()], red, vec![]));
    }
    let mut last = Vec::new();
    for (k, e) in p.elits().into_iter().enumerate() {
        let (n, x) = (Term::var(format!("Ne{}", k + 1)), Term::var(format!("Xe{}", k + 1)));
        last.push(atom("g", vec![literal_constant(&p.atoms, e), n.clone()]));
        last.push(atom(&pred, vec![atom_constant(&p.atoms, e.inner.atom), x.clone()]));
        let truth = if e.inner.negated { Term::one_minus(x) } else { x };
        last.push(or(n, truth, int(1)));
    }
    out.push(NonGroundRule::new(vec![sat()], last, vec![]));
    Ok(out)
}

/// The full translation: facts, guess, and the three checks, in that order.
pub fn reduce(p: &ElpProgram, opts: &ReductionOptions) -> Result<NonGroundProgram, ReductionError> {
    let diags = validate(p);
    if !diags.is_empty() {
        let text: Vec<String> = diags.iter().map(ToString::to_string).collect();
        return Err(ReductionError::Invalid(text.join("; ")));
    }
    let td = match opts.bss {
        BssMode::TdGuided if !p.atoms.is_empty() => Some(td_minfill(&primal_graph(p), opts.td_seed)),
        _ => None,
    };
    let td = td.as_ref();
    let parts = exec::map_range(opts.parallelism, 5, |i| match i {
        0 => Ok(build_facts(p)),
        1 => Ok(vec![build_guess()]),
        2 => build_check1(p, td),
        3 => build_check2(p, td),
        _ => build_check3(p, td),
    });
    let mut rules = Vec::new();
    for part in parts {
        rules.extend(part?);
    }
    let mut out = NonGroundProgram::new(rules);
    if opts.emit_projection {
        out.projection = Some(vec![Signature::new("g", 2), Signature::new("v_check1", 2)]);
    }
    Ok(out)
}

/// Groups projected answer sets of the translation by their guess. Atoms
/// are compared in the text form the grounder prints, e.g. `g(neg(a),1)`.
pub fn decode_world_views(p: &ElpProgram, witnesses: &[BTreeSet<String>]) -> Vec<WorldView> {
    let elits = p.elits();
    let chosen: HashMap<String, EpistemicLiteral> =
        elits.iter().map(|&e| (format!("g({},1)", literal_constant(&p.atoms, e)), e)).collect();
    let truth: HashMap<String, AtomId> =
        p.atoms.ids().map(|a| (format!("v_check1({},1)", atom_constant(&p.atoms, a)), a)).collect();
    let mut groups: BTreeMap<u64, BTreeSet<Interpretation>> = BTreeMap::new();
    for w in witnesses {
        let guess = Guess::new(w.iter().filter_map(|s| chosen.get(s).copied()));
        let m: Interpretation = w.iter().filter_map(|s| truth.get(s).copied()).collect();
        let mask = guess.to_mask(&elits).expect("guess drawn from the program's literals");
        groups.entry(mask).or_default().insert(m);
    }
    groups
        .into_iter()
        .map(|(mask, answer_sets)| WorldView { guess: Guess::from_mask(&elits, mask), answer_sets })
        .collect()
}

/// All candidate world views, computed by grounding and solving the
/// translation; ordered like the oracle's enumeration.
pub fn world_views_via_reduction(
    p: &ElpProgram,
    opts: &ReductionOptions,
    budget: &GroundBudget,
) -> Result<Vec<WorldView>, ReductionError> {
    let g = ground(&reduce(p, opts)?, budget)?;
    let show = [Signature::new("g", 2), Signature::new("v_check1", 2)];
    Ok(decode_world_views(p, &project_answer_sets(&g, &show, 0)?))
}

pub fn consistent_via_reduction(
    p: &ElpProgram,
    opts: &ReductionOptions,
    budget: &GroundBudget,
) -> Result<bool, ReductionError> {
    Ok(has_answer_set(&ground(&reduce(p, opts)?, budget)?)?)
}
