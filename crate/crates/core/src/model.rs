//! In-memory representation of ground epistemic logic programs.
//!
//! Atoms are interned in an [`AtomTable`] and referred to by 1-based
//! [`AtomId`]s, so that atom `a_i` of a program with `n` atoms maps directly
//! onto the `X_i`/`Y_i` variables used by the ASP translation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

/// Marker reserved for auxiliary atoms introduced by [`normalize_duplicates`].
/// Input atom names containing it are rejected by the parsers.
pub const DUP_MARKER: &str = "__dup";

/// 1-based atom index into an [`AtomTable`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomId(pub u32);

impl AtomId {
    /// Zero-based position, for indexing into per-atom vectors.
    pub fn pos(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_pos(pos: usize) -> Self {
        AtomId(pos as u32 + 1)
    }
}

impl fmt::Display for AtomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Ordered list of distinct atom names.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtomTable {
    names: Vec<String>,
    index: HashMap<String, AtomId>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, adding it if unseen.
    pub fn intern(&mut self, name: &str) -> AtomId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        self.names.push(name.to_owned());
        let id = AtomId(self.names.len() as u32);
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn get(&self, name: &str) -> Option<AtomId> {
        self.index.get(name).copied()
    }

    /// Panics on an id outside the table; use [`AtomTable::contains`] first
    /// when the id is untrusted.
    pub fn name(&self, id: AtomId) -> &str {
        &self.names[id.pos()]
    }

    pub fn contains(&self, id: AtomId) -> bool {
        id.0 >= 1 && id.pos() < self.names.len()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = AtomId> + '_ {
        (0..self.names.len()).map(AtomId::from_pos)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }
}

impl<S: AsRef<str>> FromIterator<S> for AtomTable {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        let mut table = AtomTable::new();
        for name in iter {
            table.intern(name.as_ref());
        }
        table
    }
}

/// An atom or its default negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: AtomId,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: AtomId) -> Self {
        Literal { atom, negated: false }
    }

    pub fn neg(atom: AtomId) -> Self {
        Literal { atom, negated: true }
    }

    /// Classical truth of the literal in a set of true atoms.
    pub fn holds_in(self, truth: impl Fn(AtomId) -> bool) -> bool {
        truth(self.atom) != self.negated
    }
}

/// `not ℓ` with `not` the epistemic negation operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EpistemicLiteral {
    pub inner: Literal,
}

impl EpistemicLiteral {
    pub fn of_atom(atom: AtomId) -> Self {
        EpistemicLiteral { inner: Literal::pos(atom) }
    }

    pub fn of_negated(atom: AtomId) -> Self {
        EpistemicLiteral { inner: Literal::neg(atom) }
    }
}

/// One conjunct of an ELP rule body.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BodyElement {
    Plain(Literal),
    /// An epistemic literal, optionally under an outer default negation.
    Elit {
        elit: EpistemicLiteral,
        negated: bool,
    },
}

impl BodyElement {
    pub fn atom(&self) -> AtomId {
        match self {
            BodyElement::Plain(l) => l.atom,
            BodyElement::Elit { elit, .. } => elit.inner.atom,
        }
    }

    fn with_atom(self, atom: AtomId) -> Self {
        match self {
            BodyElement::Plain(l) => BodyElement::Plain(Literal { atom, ..l }),
            BodyElement::Elit { elit, negated } => {
                BodyElement::Elit { elit: EpistemicLiteral { inner: Literal { atom, ..elit.inner } }, negated }
            }
        }
    }
}

/// `h_1 ∨ … ∨ h_k ← body`. An empty head makes the rule a constraint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ElpRule {
    pub head: Vec<AtomId>,
    /// Kept in source order; the translation numbers disjuncts by position.
    pub body: Vec<BodyElement>,
}

impl ElpRule {
    pub fn new(head: Vec<AtomId>, body: Vec<BodyElement>) -> Self {
        ElpRule { head, body }
    }

    /// Atom occurrences in translation order: head first, then body.
    pub fn occurrences(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.head.iter().copied().chain(self.body.iter().map(BodyElement::atom))
    }

    pub fn elits(&self) -> impl Iterator<Item = EpistemicLiteral> + '_ {
        self.body.iter().filter_map(|b| match b {
            BodyElement::Elit { elit, .. } => Some(*elit),
            BodyElement::Plain(_) => None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ElpProgram {
    pub atoms: AtomTable,
    pub rules: Vec<ElpRule>,
}

impl ElpProgram {
    pub fn new(atoms: AtomTable, rules: Vec<ElpRule>) -> Self {
        ElpProgram { atoms, rules }
    }

    /// Epistemic literals of the program, deduplicated, in order of first
    /// occurrence. The position in this list is the literal's guess bit.
    pub fn elits(&self) -> Vec<EpistemicLiteral> {
        let mut seen = HashSet::new();
        self.rules.iter().flat_map(ElpRule::elits).filter(|e| seen.insert(*e)).collect()
    }

    pub fn atom_name(&self, id: AtomId) -> &str {
        self.atoms.name(id)
    }

    pub fn literal_string(&self, l: Literal) -> String {
        if l.negated {
            format!("not {}", self.atom_name(l.atom))
        } else {
            self.atom_name(l.atom).to_owned()
        }
    }

    pub fn elit_string(&self, e: EpistemicLiteral) -> String {
        format!("$not$ {}", self.literal_string(e.inner))
    }

    pub fn guess_string(&self, guess: &Guess) -> String {
        let parts: Vec<_> = guess.chosen.iter().map(|e| self.elit_string(*e)).collect();
        format!("{{{}}}", parts.join(", "))
    }

    pub fn interpretation_string(&self, interp: &Interpretation) -> String {
        let parts: Vec<_> = interp.iter().map(|a| self.atom_name(a)).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// `elitof(p)`: the set of epistemic literals occurring in `p`.
pub fn elitof(p: &ElpProgram) -> BTreeSet<EpistemicLiteral> {
    p.rules.iter().flat_map(ElpRule::elits).collect()
}

/// A subset Φ of the epistemic literals of a program.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Guess {
    pub chosen: BTreeSet<EpistemicLiteral>,
}

impl Guess {
    pub fn new(chosen: impl IntoIterator<Item = EpistemicLiteral>) -> Self {
        Guess { chosen: chosen.into_iter().collect() }
    }

    /// Guess selecting `elits[i]` for every set bit `i` of `mask`.
    pub fn from_mask(elits: &[EpistemicLiteral], mask: u64) -> Self {
        Guess::new(elits.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e))
    }

    /// Inverse of [`Guess::from_mask`]; `None` if the guess mentions a
    /// literal outside `elits`.
    pub fn to_mask(&self, elits: &[EpistemicLiteral]) -> Option<u64> {
        let mut mask = 0u64;
        for e in &self.chosen {
            let i = elits.iter().position(|x| x == e)?;
            mask |= 1 << i;
        }
        Some(mask)
    }

    pub fn contains(&self, e: &EpistemicLiteral) -> bool {
        self.chosen.contains(e)
    }
}

/// A set of true atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation(pub BTreeSet<AtomId>);

impl Interpretation {
    pub fn from_mask(mask: u64) -> Self {
        Interpretation((0..64).filter(|i| mask >> i & 1 == 1).map(|i| AtomId::from_pos(i as usize)).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0.iter().fold(0, |m, a| m | 1 << a.pos())
    }

    pub fn contains(&self, a: AtomId) -> bool {
        self.0.contains(&a)
    }

    pub fn iter(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<AtomId> for Interpretation {
    fn from_iter<T: IntoIterator<Item = AtomId>>(iter: T) -> Self {
        Interpretation(iter.into_iter().collect())
    }
}

/// A guess together with the answer sets of its epistemic reduct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WorldView {
    pub guess: Guess,
    pub answer_sets: BTreeSet<Interpretation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    DanglingAtom(AtomId),
    DuplicateAtom(AtomId),
    EmptyAtomName(AtomId),
    DuplicateAtomName(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Zero-based rule index, `None` for atom-table problems.
    pub rule: Option<usize>,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.rule {
            write!(f, "rule {}: ", r + 1)?;
        }
        match &self.kind {
            DiagnosticKind::DanglingAtom(a) => write!(f, "dangling atom index {}", a.0),
            DiagnosticKind::DuplicateAtom(a) => write!(f, "duplicate atom index {} in rule", a.0),
            DiagnosticKind::EmptyAtomName(a) => write!(f, "atom {} has an empty name", a.0),
            DiagnosticKind::DuplicateAtomName(n) => write!(f, "atom name {n:?} occurs twice"),
        }
    }
}

/// Checks the structural invariants of `p`, one diagnostic per violation.
pub fn validate(p: &ElpProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut names = HashSet::new();
    for id in p.atoms.ids() {
        let name = p.atoms.name(id);
        if name.is_empty() {
            out.push(Diagnostic { rule: None, kind: DiagnosticKind::EmptyAtomName(id) });
        }
        if !names.insert(name) {
            out.push(Diagnostic { rule: None, kind: DiagnosticKind::DuplicateAtomName(name.to_owned()) });
        }
    }
    for (ri, rule) in p.rules.iter().enumerate() {
        let mut seen = HashSet::new();
        for a in rule.occurrences() {
            if !p.atoms.contains(a) {
                out.push(Diagnostic { rule: Some(ri), kind: DiagnosticKind::DanglingAtom(a) });
            } else if !seen.insert(a) {
                out.push(Diagnostic { rule: Some(ri), kind: DiagnosticKind::DuplicateAtom(a) });
            }
        }
    }
    out
}

/// Strips the auxiliary-atom suffix added by [`normalize_duplicates`].
pub fn base_name(name: &str) -> &str {
    match name.find(DUP_MARKER) {
        Some(i) => &name[..i],
        None => name,
    }
}

/// Rewrites every rule so that no atom occurs in it twice.
///
/// Repeated occurrences of an atom `a` are replaced by a fresh atom `a′`
/// (named `a__dup<k>`) and the rules `a′ ← a` and `a ← a′` are appended.
/// Epistemic occurrences keep the original atom when possible, then head
/// occurrences, then plain body literals. Compliant programs come back
/// unchanged.
pub fn normalize_duplicates(p: &ElpProgram) -> ElpProgram {
    if p.rules.iter().all(|r| {
        let mut seen = HashSet::new();
        r.occurrences().all(|a| seen.insert(a))
    }) {
        return p.clone();
    }
    let mut atoms = p.atoms.clone();
    let mut counter = 0usize;
    let mut rules = Vec::with_capacity(p.rules.len());
    let mut links = Vec::new();
    let mut fresh = |atoms: &mut AtomTable, of: AtomId, links: &mut Vec<ElpRule>| {
        let base = atoms.name(of).to_owned();
        let name = loop {
            counter += 1;
            let candidate = format!("{base}{DUP_MARKER}{counter}");
            if atoms.get(&candidate).is_none() {
                break candidate;
            }
        };
        let id = atoms.intern(&name);
        links.push(ElpRule::new(vec![id], vec![BodyElement::Plain(Literal::pos(of))]));
        links.push(ElpRule::new(vec![of], vec![BodyElement::Plain(Literal::pos(id))]));
        id
    };
    for rule in &p.rules {
        let mut seen = HashSet::new();
        let mut body = rule.body.clone();
        let mut head = rule.head.clone();
        for b in body.iter_mut().filter(|b| matches!(b, BodyElement::Elit { .. })) {
            if !seen.insert(b.atom()) {
                *b = b.with_atom(fresh(&mut atoms, b.atom(), &mut links));
            }
        }
        for h in head.iter_mut() {
            if !seen.insert(*h) {
                *h = fresh(&mut atoms, *h, &mut links);
            }
        }
        for b in body.iter_mut().filter(|b| matches!(b, BodyElement::Plain(_))) {
            if !seen.insert(b.atom()) {
                *b = b.with_atom(fresh(&mut atoms, b.atom(), &mut links));
            }
        }
        rules.push(ElpRule { head, body });
    }
    rules.extend(links);
    ElpProgram { atoms, rules }
}
