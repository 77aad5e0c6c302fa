//! Non-ground ASP programs in the gringo-compatible subset used by the
//! translation: disjunctive heads, default negation, and integer
//! subtraction in terms.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Int(i64),
    Sym(String),
    Func(String, Vec<Term>),
    Var(String),
    /// `minuend - subtrahend`, evaluated over integers during grounding.
    Sub(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn sym(name: impl Into<String>) -> Self {
        Term::Sym(name.into())
    }

    pub fn minus(a: Term, b: Term) -> Self {
        Term::Sub(Box::new(a), Box::new(b))
    }

    /// `1 - t`, the Boolean complement used throughout the translation.
    pub fn one_minus(t: Term) -> Self {
        Term::minus(Term::Int(1), t)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Int(_) | Term::Sym(_) => true,
            Term::Var(_) => false,
            Term::Func(_, args) => args.iter().all(Term::is_ground),
            Term::Sub(a, b) => a.is_ground() && b.is_ground(),
        }
    }

    /// Variables in order of first occurrence.
    pub fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Int(_) | Term::Sym(_) => {}
            Term::Var(v) => {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
            Term::Func(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Sub(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Variables that can be bound by matching this term against a ground
    /// value, i.e. those not hidden inside arithmetic.
    fn collect_binding_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Func(_, args) => args.iter().for_each(|a| a.collect_binding_vars(out)),
            Term::Int(_) | Term::Sym(_) | Term::Sub(..) => {}
        }
    }

    fn symbols(&self) -> usize {
        match self {
            Term::Int(_) | Term::Sym(_) | Term::Var(_) => 1,
            Term::Func(_, args) => 1 + args.iter().map(Term::symbols).sum::<usize>(),
            Term::Sub(a, b) => 1 + a.symbols() + b.symbols(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Int(i) => write!(f, "{i}"),
            Term::Sym(s) | Term::Var(s) => f.write_str(s),
            Term::Func(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Sub(a, b) => {
                write!(f, "{a}-")?;
                match **b {
                    Term::Sub(..) => write!(f, "({b})"),
                    Term::Int(i) if i < 0 => write!(f, "({b})"),
                    _ => write!(f, "{b}"),
                }
            }
        }
    }
}

/// Predicate name and arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub name: String,
    pub arity: usize,
}

impl Signature {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Signature { name: name.into(), arity }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NonGroundAtom {
    pub predicate: String,
    pub terms: Vec<Term>,
}

impl NonGroundAtom {
    pub fn new(predicate: impl Into<String>, terms: Vec<Term>) -> Self {
        NonGroundAtom { predicate: predicate.into(), terms }
    }

    pub fn signature(&self) -> Signature {
        Signature::new(self.predicate.clone(), self.terms.len())
    }

    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.terms.iter().for_each(|t| t.collect_vars(&mut out));
        out
    }

    pub fn is_ground(&self) -> bool {
        self.terms.iter().all(Term::is_ground)
    }

    /// Variables occurring outside arithmetic.
    pub fn binding_vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.terms.iter().for_each(|t| t.collect_binding_vars(&mut out));
        out
    }

    pub fn symbol_count(&self) -> usize {
        1 + self.terms.iter().map(Term::symbols).sum::<usize>()
    }
}

impl fmt::Display for NonGroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.terms.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.terms.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// `h_1 | … | h_k :- p_1, …, p_m, not n_1, …, not n_l.`
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NonGroundRule {
    pub head: Vec<NonGroundAtom>,
    pub pos: Vec<NonGroundAtom>,
    pub neg: Vec<NonGroundAtom>,
}

impl NonGroundRule {
    pub fn new(head: Vec<NonGroundAtom>, pos: Vec<NonGroundAtom>, neg: Vec<NonGroundAtom>) -> Self {
        NonGroundRule { head, pos, neg }
    }

    pub fn fact(atom: NonGroundAtom) -> Self {
        NonGroundRule { head: vec![atom], ..Default::default() }
    }

    pub fn constraint(pos: Vec<NonGroundAtom>, neg: Vec<NonGroundAtom>) -> Self {
        NonGroundRule { head: Vec::new(), pos, neg }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &NonGroundAtom> {
        self.head.iter().chain(&self.pos).chain(&self.neg)
    }

    /// All variables, in order of first occurrence (head, positive body,
    /// negative body).
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for a in self.atoms() {
            a.terms.iter().for_each(|t| t.collect_vars(&mut out));
        }
        out
    }

    /// Every variable occurs outside arithmetic in some positive body atom.
    pub fn is_safe(&self) -> bool {
        self.unsafe_variables().is_empty()
    }

    pub fn unsafe_variables(&self) -> Vec<&str> {
        let mut bound = BTreeSet::new();
        for a in &self.pos {
            a.terms.iter().for_each(|t| t.collect_binding_vars(&mut bound));
        }
        self.variables().into_iter().filter(|v| !bound.contains(v)).collect()
    }

    pub fn symbol_count(&self) -> usize {
        self.atoms().map(NonGroundAtom::symbol_count).sum()
    }
}

impl fmt::Display for NonGroundRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{h}")?;
        }
        let body_len = self.pos.len() + self.neg.len();
        if body_len == 0 {
            return if self.head.is_empty() { f.write_str(":- .") } else { f.write_str(".") };
        }
        if self.head.is_empty() {
            f.write_str(":- ")?;
        } else {
            f.write_str(" :- ")?;
        }
        let body = self.pos.iter().map(|a| a.to_string()).chain(self.neg.iter().map(|a| format!("not {a}")));
        let body: Vec<_> = body.collect();
        write!(f, "{}.", body.join(", "))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NonGroundProgram {
    pub rules: Vec<NonGroundRule>,
    /// Predicates to keep when enumerating answer sets; `None` shows all.
    pub projection: Option<Vec<Signature>>,
}

impl NonGroundProgram {
    pub fn new(rules: Vec<NonGroundRule>) -> Self {
        NonGroundProgram { rules, projection: None }
    }

    pub fn symbol_count(&self) -> usize {
        self.rules.iter().map(NonGroundRule::symbol_count).sum()
    }

    pub fn max_arity(&self) -> usize {
        self.rules.iter().flat_map(|r| r.atoms()).map(|a| a.terms.len()).max().unwrap_or(0)
    }

    pub fn signatures(&self) -> BTreeSet<Signature> {
        self.rules.iter().flat_map(|r| r.atoms()).map(NonGroundAtom::signature).collect()
    }
}

/// gringo-dialect text: one statement per line, `#show` directives last.
pub fn render_asp(p: &NonGroundProgram) -> String {
    let mut out = String::new();
    for r in &p.rules {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    if let Some(proj) = &p.projection {
        for sig in proj {
            out.push_str(&format!("#show {sig}.\n"));
        }
    }
    out
}

impl fmt::Display for NonGroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_asp(self))
    }
}
