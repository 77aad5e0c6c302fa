//! ∃∀∃ QBFs in CNF: QDIMACS input, clause splitting, the restricted
//! extension, the encoding into an ELP, and a brute-force validity check.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::{self, Parallelism};
use crate::model::{AtomId, AtomTable, BodyElement, ElpProgram, ElpRule, EpistemicLiteral, Literal};

pub const MAX_BRUTE_FORCE_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QbfLiteral {
    pub var: String,
    pub positive: bool,
}

impl QbfLiteral {
    pub fn new(var: impl Into<String>, positive: bool) -> Self {
        QbfLiteral { var: var.into(), positive }
    }
}

/// `∃X ∀Y ∃Z φ` with φ a list of clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Qbf3 {
    pub x: Vec<String>,
    pub y: Vec<String>,
    pub z: Vec<String>,
    pub clauses: Vec<Vec<QbfLiteral>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QbfError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("quantifier prefix is not of the form e a e")]
    Alternation,
    #[error("variable {var} is out of range 1..={max}")]
    OutOfRange { var: i64, max: usize },
    #[error("empty clause")]
    EmptyClause,
    #[error("{count} variables exceed the brute-force cap of {cap}")]
    Cap { count: usize, cap: usize },
    #[error("formula is not restricted")]
    NotRestricted,
}

impl Qbf3 {
    pub fn variables(&self) -> impl Iterator<Item = &String> {
        self.x.iter().chain(&self.y).chain(&self.z)
    }

    pub fn variable_count(&self) -> usize {
        self.x.len() + self.y.len() + self.z.len()
    }

    fn names(&self) -> BTreeSet<String> {
        self.variables().cloned().collect()
    }
}

fn syntax(line: usize, message: impl Into<String>) -> QbfError {
    QbfError::Syntax { line, message: message.into() }
}

/// Reads QDIMACS with at most the prefix `e a e`. Variable `k` is named
/// `q<k>`; variables missing from the prefix join the outer ∃ block.
pub fn parse_qdimacs_eae(text: &str) -> Result<Qbf3, QbfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut blocks: Vec<(char, Vec<i64>)> = Vec::new();
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let first = tokens.next().unwrap_or_default();
        if first == "p" {
            if header.is_some() {
                return Err(syntax(line, "second header"));
            }
            let fields: Vec<&str> = tokens.collect();
            match fields.as_slice() {
                ["cnf", v, c] => {
                    let v = v.parse().map_err(|_| syntax(line, "bad variable count"))?;
                    let c = c.parse().map_err(|_| syntax(line, "bad clause count"))?;
                    header = Some((v, c));
                }
                _ => return Err(syntax(line, "expected 'p cnf <vars> <clauses>'")),
            }
            continue;
        }
        let Some((nvars, _)) = header else {
            return Err(syntax(line, "missing header"));
        };
        let check = |v: i64| -> Result<i64, QbfError> {
            if v == 0 || v.unsigned_abs() as usize > nvars {
                Err(QbfError::OutOfRange { var: v, max: nvars })
            } else {
                Ok(v)
            }
        };
        if first == "e" || first == "a" {
            if !clauses.is_empty() || !current.is_empty() {
                return Err(syntax(line, "quantifier line after clauses"));
            }
            let q = first.chars().next().unwrap_or('e');
            let mut vars = Vec::new();
            let mut closed = false;
            for t in tokens {
                let v: i64 = t.parse().map_err(|_| syntax(line, format!("bad token {t:?}")))?;
                if v == 0 {
                    closed = true;
                    break;
                }
                if v < 0 {
                    return Err(syntax(line, "negative variable in prefix"));
                }
                vars.push(check(v)?);
            }
            if !closed {
                return Err(syntax(line, "quantifier line not terminated by 0"));
            }
            match blocks.last_mut() {
                Some((k, vs)) if *k == q => vs.extend(vars),
                _ => blocks.push((q, vars)),
            }
            continue;
        }
        for t in std::iter::once(first).chain(tokens) {
            let v: i64 = t.parse().map_err(|_| syntax(line, format!("bad token {t:?}")))?;
            if v == 0 {
                if current.is_empty() {
                    return Err(QbfError::EmptyClause);
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(check(v)?);
            }
        }
    }
    let Some((nvars, nclauses)) = header else {
        return Err(syntax(last_line.max(1), "missing header"));
    };
    if !current.is_empty() {
        return Err(syntax(last_line, "clause not terminated by 0"));
    }
    if clauses.len() != nclauses {
        return Err(syntax(last_line, format!("header announces {nclauses} clauses, found {}", clauses.len())));
    }
    let kinds: Vec<char> = blocks.iter().map(|(k, _)| *k).collect();
    let slots: &[usize] = match kinds.as_slice() {
        [] => &[],
        ['e'] => &[0],
        ['a'] => &[1],
        ['e', 'a'] => &[0, 1],
        ['a', 'e'] => &[1, 2],
        ['e', 'a', 'e'] => &[0, 1, 2],
        _ => return Err(QbfError::Alternation),
    };
    let name = |v: i64| format!("q{}", v.unsigned_abs());
    let mut out = Qbf3::default();
    let mut seen = vec![false; nvars + 1];
    for ((_, vars), &slot) in blocks.iter().zip(slots) {
        for &v in vars {
            if std::mem::replace(&mut seen[v as usize], true) {
                continue;
            }
            [&mut out.x, &mut out.y, &mut out.z][slot].push(name(v));
        }
    }
    for c in &clauses {
        for &l in c {
            if !std::mem::replace(&mut seen[l.unsigned_abs() as usize], true) {
                out.x.push(name(l));
            }
        }
    }
    out.clauses = clauses
        .iter()
        .map(|c| {
            let mut lits: Vec<QbfLiteral> = Vec::new();
            for &l in c {
                let lit = QbfLiteral::new(name(l), l > 0);
                if !lits.contains(&lit) {
                    lits.push(lit);
                }
            }
            lits
        })
        .collect();
    Ok(out)
}

/// QDIMACS text with variables numbered in block order.
pub fn render_qdimacs(q: &Qbf3) -> String {
    let index: HashMap<&str, usize> = q.variables().enumerate().map(|(i, v)| (v.as_str(), i + 1)).collect();
    let mut out = format!("p cnf {} {}\n", q.variable_count(), q.clauses.len());
    for (tag, block) in [('e', &q.x), ('a', &q.y), ('e', &q.z)] {
        if !block.is_empty() {
            out.push(tag);
            for v in block {
                let _ = write!(out, " {}", index[v.as_str()]);
            }
            out.push_str(" 0\n");
        }
    }
    for c in &q.clauses {
        for l in c {
            let v = index[l.var.as_str()] as i64;
            let _ = write!(out, "{} ", if l.positive { v } else { -v });
        }
        out.push_str("0\n");
    }
    out
}

/// Reassigns every variable to one of the three blocks uniformly at random.
pub fn split_blocks_random(q: &Qbf3, seed: u64) -> Qbf3 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Qbf3 { clauses: q.clauses.clone(), ..Qbf3::default() };
    for v in q.variables() {
        [&mut out.x, &mut out.y, &mut out.z][rng.gen_range(0..3)].push(v.clone());
    }
    out
}

fn fresh(prefix: &str, used: &mut BTreeSet<String>) -> String {
    let mut i = 1usize;
    loop {
        let name = format!("{prefix}{i}");
        if used.insert(name.clone()) {
            return name;
        }
        i += 1;
    }
}

/// Splits clauses longer than three literals with fresh innermost ∃ variables.
pub fn normalize_3cnf(q: &Qbf3) -> Qbf3 {
    let mut used = q.names();
    let mut out = Qbf3 { x: q.x.clone(), y: q.y.clone(), z: q.z.clone(), clauses: Vec::new() };
    for c in &q.clauses {
        if c.len() <= 3 {
            out.clauses.push(c.clone());
            continue;
        }
        let k = c.len();
        let chain: Vec<String> = (0..k - 3).map(|_| fresh("s", &mut used)).collect();
        out.z.extend(chain.iter().cloned());
        out.clauses.push(vec![c[0].clone(), c[1].clone(), QbfLiteral::new(&chain[0], true)]);
        for i in 1..k - 3 {
            out.clauses.push(vec![
                QbfLiteral::new(&chain[i - 1], false),
                c[i + 1].clone(),
                QbfLiteral::new(&chain[i], true),
            ]);
        }
        out.clauses.push(vec![QbfLiteral::new(&chain[k - 4], false), c[k - 2].clone(), c[k - 1].clone()]);
    }
    out
}

/// Adds a fresh universal `c<i>` to clause `i`, yielding a restricted QBF.
pub fn extend(q: &Qbf3) -> Qbf3 {
    let mut used = q.names();
    let mut out = q.clone();
    for c in &mut out.clauses {
        let v = fresh("c", &mut used);
        c.push(QbfLiteral::new(&v, true));
        out.y.push(v);
    }
    out
}

struct Masks {
    pos: Vec<(u64, u64)>,
    index: HashMap<String, usize>,
}

fn masks(q: &Qbf3) -> Result<Masks, QbfError> {
    let count = q.variable_count();
    if count > MAX_BRUTE_FORCE_VARS {
        return Err(QbfError::Cap { count, cap: MAX_BRUTE_FORCE_VARS });
    }
    let index: HashMap<String, usize> = q.variables().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let pos = q
        .clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u64, 0u64), |(p, n), l| {
                let bit = 1u64 << index[&l.var];
                if l.positive {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect();
    Ok(Masks { pos, index })
}

fn all_clauses_hold(clauses: &[(u64, u64)], assignment: u64) -> bool {
    clauses.iter().all(|&(p, n)| assignment & p != 0 || !assignment & n != 0)
}

fn spread(bits: u64, positions: &[usize]) -> u64 {
    positions.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).fold(0, |acc, (_, &p)| acc | 1 << p)
}

/// `∃σX ∀σY ∃σZ` every clause holds, by exhaustive enumeration.
pub fn qbf_validity_bruteforce(q: &Qbf3, parallelism: Parallelism) -> Result<bool, QbfError> {
    let m = masks(q)?;
    let positions = |block: &[String]| -> Vec<usize> { block.iter().map(|v| m.index[v]).collect() };
    let (px, py, pz) = (positions(&q.x), positions(&q.y), positions(&q.z));
    Ok(exec::any_in_range(parallelism, 1 << px.len(), |sx| {
        let ax = spread(sx, &px);
        (0..1u64 << py.len()).all(|sy| {
            let axy = ax | spread(sy, &py);
            (0..1u64 << pz.len()).any(|sz| all_clauses_hold(&m.pos, axy | spread(sz, &pz)))
        })
    }))
}

/// Whether φ with every universal set true is a tautology over X ∪ Z.
pub fn is_restricted(q: &Qbf3) -> Result<bool, QbfError> {
    let outer = q.x.len() + q.z.len();
    if outer > MAX_BRUTE_FORCE_VARS {
        return Err(QbfError::Cap { count: outer, cap: MAX_BRUTE_FORCE_VARS });
    }
    let universal: BTreeSet<&String> = q.y.iter().collect();
    let index: HashMap<&String, usize> = q.x.iter().chain(&q.z).enumerate().map(|(i, v)| (v, i)).collect();
    let mut rest = Vec::new();
    for c in &q.clauses {
        if c.iter().any(|l| l.positive && universal.contains(&l.var)) {
            continue;
        }
        let (mut p, mut n) = (0u64, 0u64);
        for l in c.iter().filter(|l| !universal.contains(&l.var)) {
            let bit = 1u64 << index[&l.var];
            if l.positive {
                p |= bit;
            } else {
                n |= bit;
            }
        }
        rest.push((p, n));
    }
    Ok((0..1u64 << outer).all(|a| all_clauses_hold(&rest, a)))
}

/// Atom names for the encoding: `w`, `w_bar`, and the two reserved atoms.
struct Naming {
    used: BTreeSet<String>,
}

impl Naming {
    fn bar(&self, w: &str) -> String {
        let mut name = format!("{w}_bar");
        while self.used.contains(&name) {
            name.push('_');
        }
        name
    }

    fn reserved(&self, base: &str) -> String {
        let mut name = base.to_owned();
        while self.used.contains(&name) {
            name.insert_str(0, "r_");
        }
        name
    }
}

/// The ELP whose consistency equals the validity of a restricted `q`. With
/// `checked`, restrictedness is verified first.
pub fn encode_restricted(q: &Qbf3, checked: bool) -> Result<ElpProgram, QbfError> {
    if checked && !is_restricted(q)? {
        return Err(QbfError::NotRestricted);
    }
    let mut naming = Naming { used: q.names() };
    let bars: HashMap<&String, String> = q.variables().map(|v| (v, naming.bar(v))).collect();
    naming.used.extend(bars.values().cloned());
    let (u_name, v_name) = (naming.reserved("u"), naming.reserved("v"));

    let mut atoms = AtomTable::new();
    for v in q.variables() {
        atoms.intern(v);
        atoms.intern(&bars[v]);
    }
    let u = atoms.intern(&u_name);
    let v = atoms.intern(&v_name);
    let id = |atoms: &AtomTable, name: &str| -> AtomId { atoms.get(name).expect("interned above") };
    let eneg = |a: AtomId| BodyElement::Elit { elit: EpistemicLiteral::of_atom(a), negated: false };
    let not = |a: AtomId| BodyElement::Plain(Literal::neg(a));
    let pos = |a: AtomId| BodyElement::Plain(Literal::pos(a));

    let mut rules = Vec::new();
    for w in &q.x {
        let (a, b) = (id(&atoms, w), id(&atoms, &bars[w]));
        rules.push(ElpRule::new(vec![a], vec![eneg(b)]));
        rules.push(ElpRule::new(vec![b], vec![eneg(a)]));
    }
    for w in &q.y {
        let (a, b) = (id(&atoms, w), id(&atoms, &bars[w]));
        rules.push(ElpRule::new(vec![a], vec![not(b)]));
        rules.push(ElpRule::new(vec![b], vec![not(a)]));
    }
    for w in &q.z {
        rules.push(ElpRule::new(vec![id(&atoms, w), id(&atoms, &bars[w])], vec![]));
    }
    for c in &q.clauses {
        let mut body: Vec<BodyElement> = Vec::new();
        for l in c {
            let target = if l.positive { id(&atoms, &bars[&l.var]) } else { id(&atoms, &l.var) };
            if !body.iter().any(|b| b.atom() == target) {
                body.push(pos(target));
            }
        }
        rules.push(ElpRule::new(vec![u], body));
    }
    for w in &q.z {
        rules.push(ElpRule::new(vec![id(&atoms, w)], vec![pos(u)]));
        rules.push(ElpRule::new(vec![id(&atoms, &bars[w])], vec![pos(u)]));
    }
    rules.push(ElpRule::new(
        vec![v],
        vec![eneg(v), BodyElement::Elit { elit: EpistemicLiteral::of_negated(u), negated: false }],
    ));
    Ok(ElpProgram::new(atoms, rules))
}

/// The full pipeline: optional random block split, clause splitting,
/// extension and encoding.
pub fn qbf_to_elp(q: &Qbf3, split_seed: Option<u64>) -> Result<ElpProgram, QbfError> {
    let q = match split_seed {
        Some(seed) => split_blocks_random(q, seed),
        None => q.clone(),
    };
    encode_restricted(&extend(&normalize_3cnf(&q)), false)
}
