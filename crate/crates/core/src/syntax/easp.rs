//! EASP programs with `$not$` epistemic negation, optionally extended by the
//! `K$` and `M$` modal operators.
//!
//! ```text
//! rule     := [head] [":-" body] "."
//! head     := atom ("|" atom)*
//! body     := elem ("," elem)*
//! elem     := ["not"] "$not$" ["not"] atom
//!           | ["not"] ("K$" | "M$") atom        (KM dialect only)
//!           | ["not"] atom
//! ```

use std::fmt;
use std::str::FromStr;

use crate::model::{
    normalize_duplicates, AtomTable, BodyElement, ElpProgram, ElpRule, EpistemicLiteral, Literal, DUP_MARKER,
};

/// Position of a token in the source text. Columns count characters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    ReservedName(String),
    EmptyRule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.span.line, self.span.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => f.write_str(m),
            ParseErrorKind::ReservedName(n) => write!(f, "atom name {n:?} contains the reserved marker {DUP_MARKER:?}"),
            ParseErrorKind::EmptyRule => f.write_str("empty rule"),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Dialect {
    #[default]
    Not,
    Km,
}

impl FromStr for Dialect {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "not" => Ok(Dialect::Not),
            "km" => Ok(Dialect::Km),
            _ => Err(format!("unknown dialect {s:?} (expected \"not\" or \"km\")")),
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dialect::Not => "not",
            Dialect::Km => "km",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Not,
    Eneg,
    K,
    M,
    If,
    Dot,
    Comma,
    Bar,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom '{a}'"),
            Tok::Not => "'not'".into(),
            Tok::Eneg => "'$not$'".into(),
            Tok::K => "'K$'".into(),
            Tok::M => "'M$'".into(),
            Tok::If => "':-'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Comma => "','".into(),
            Tok::Bar => "'|'".into(),
        }
    }
}

fn syntax(span: SourceSpan, msg: impl Into<String>) -> ParseError {
    ParseError { span, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn lex(text: &str, dialect: Dialect) -> Result<(Vec<(Tok, SourceSpan)>, SourceSpan), ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = SourceSpan { line, column: col, length: 1 };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let rest = &chars[i..];
        let starts = |s: &str| rest.iter().take(s.len()).copied().eq(s.chars());
        let (tok, len) = if starts("$not$") {
            (Tok::Eneg, 5)
        } else if starts("K$") || starts("M$") {
            if dialect == Dialect::Not {
                return Err(syntax(SourceSpan { length: 2, ..start }, "modal operators need the KM dialect"));
            }
            (if c == 'K' { Tok::K } else { Tok::M }, 2)
        } else if starts(":-") {
            (Tok::If, 2)
        } else if c.is_ascii_lowercase() {
            let len = rest.iter().take_while(|c| c.is_ascii_alphanumeric() || **c == '_').count();
            let word: String = rest[..len].iter().collect();
            if word == "not" {
                (Tok::Not, len)
            } else {
                if word.contains(DUP_MARKER) {
                    return Err(ParseError {
                        span: SourceSpan { length: len, ..start },
                        kind: ParseErrorKind::ReservedName(word),
                    });
                }
                (Tok::Atom(word), len)
            }
        } else {
            match c {
                '.' => (Tok::Dot, 1),
                ',' => (Tok::Comma, 1),
                '|' => (Tok::Bar, 1),
                _ => return Err(syntax(start, format!("unexpected character {c:?}"))),
            }
        };
        out.push((tok, SourceSpan { length: len, ..start }));
        i += len;
        col += len;
    }
    Ok((out, SourceSpan { line, column: col, length: 0 }))
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
    eof: SourceSpan,
    atoms: AtomTable,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn span(&self) -> SourceSpan {
        self.toks.get(self.pos).map_or(self.eof, |t| t.1)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        let found = self.peek().map_or("end of input".to_owned(), Tok::describe);
        syntax(self.span(), format!("expected {wanted}, found {found}"))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn atom(&mut self) -> Result<crate::model::AtomId, ParseError> {
        match self.peek() {
            Some(Tok::Atom(a)) => {
                let a = a.clone();
                let id = self.atoms.intern(&a);
                self.pos += 1;
                Ok(id)
            }
            _ => Err(self.unexpected("an atom")),
        }
    }

    fn element(&mut self) -> Result<BodyElement, ParseError> {
        let outer = self.eat(&Tok::Not);
        if self.eat(&Tok::Eneg) {
            let inner = self.eat(&Tok::Not);
            let a = self.atom()?;
            let elit = if inner { EpistemicLiteral::of_negated(a) } else { EpistemicLiteral::of_atom(a) };
            return Ok(BodyElement::Elit { elit, negated: outer });
        }
        if self.eat(&Tok::K) {
            // K a = not $not$ a; not K a collapses to $not$ a
            let a = self.atom()?;
            return Ok(BodyElement::Elit { elit: EpistemicLiteral::of_atom(a), negated: !outer });
        }
        if self.eat(&Tok::M) {
            // M a = $not$ not a
            let a = self.atom()?;
            return Ok(BodyElement::Elit { elit: EpistemicLiteral::of_negated(a), negated: outer });
        }
        let a = self.atom()?;
        Ok(BodyElement::Plain(if outer { Literal::neg(a) } else { Literal::pos(a) }))
    }

    fn rule(&mut self) -> Result<ElpRule, ParseError> {
        let start = self.span();
        let mut rule = ElpRule::default();
        if matches!(self.peek(), Some(Tok::Atom(_))) {
            rule.head.push(self.atom()?);
            while self.eat(&Tok::Bar) {
                rule.head.push(self.atom()?);
            }
        }
        if self.eat(&Tok::If) && self.peek() != Some(&Tok::Dot) {
            loop {
                rule.body.push(self.element()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        if !self.eat(&Tok::Dot) {
            let wanted = if rule.body.is_empty() && !rule.head.is_empty() { "'|', ':-' or '.'" } else { "',' or '.'" };
            return Err(self.unexpected(wanted));
        }
        if rule.head.is_empty() && rule.body.is_empty() {
            return Err(ParseError { span: start, kind: ParseErrorKind::EmptyRule });
        }
        Ok(rule)
    }
}

/// Parses `text` in the given dialect; the result is duplicate-normalized.
pub fn parse_easp(text: &str, dialect: Dialect) -> Result<ElpProgram, ParseError> {
    let (toks, eof) = lex(text, dialect)?;
    let mut p = Parser { toks, pos: 0, eof, atoms: AtomTable::new() };
    let mut rules = Vec::new();
    while p.peek().is_some() {
        rules.push(p.rule()?);
    }
    Ok(normalize_duplicates(&ElpProgram::new(p.atoms, rules)))
}

pub fn parse_easp_not(text: &str) -> Result<ElpProgram, ParseError> {
    parse_easp(text, Dialect::Not)
}

pub fn parse_easp_km(text: &str) -> Result<ElpProgram, ParseError> {
    parse_easp(text, Dialect::Km)
}

fn render_element(p: &ElpProgram, b: &BodyElement, dialect: Dialect) -> String {
    match *b {
        BodyElement::Plain(l) => p.literal_string(l),
        BodyElement::Elit { elit, negated } => {
            let name = p.atom_name(elit.inner.atom);
            match (dialect, elit.inner.negated, negated) {
                (Dialect::Km, false, true) => format!("K$ {name}"),
                (Dialect::Km, false, false) => format!("not K$ {name}"),
                (Dialect::Km, true, false) => format!("M$ {name}"),
                (Dialect::Km, true, true) => format!("not M$ {name}"),
                (Dialect::Not, _, outer) => {
                    let e = p.elit_string(elit);
                    if outer {
                        format!("not {e}")
                    } else {
                        e
                    }
                }
            }
        }
    }
}

/// Renders one rule per line without a trailing newline.
///
/// Atoms that occur in no rule are not represented in the text, and the
/// empty rule renders as `:- .`, which the parser rejects.
pub fn render_elp(p: &ElpProgram, dialect: Dialect) -> String {
    let lines: Vec<String> = p
        .rules
        .iter()
        .map(|r| {
            let head: Vec<&str> = r.head.iter().map(|a| p.atom_name(*a)).collect();
            let body: Vec<String> = r.body.iter().map(|b| render_element(p, b, dialect)).collect();
            match (head.is_empty(), body.is_empty()) {
                (false, true) => format!("{}.", head.join(" | ")),
                (false, false) => format!("{} :- {}.", head.join(" | "), body.join(", ")),
                (true, _) => format!(":- {}.", body.join(", ")),
            }
        })
        .collect();
    lines.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AtomId;

    fn elit(a: u32, inner_neg: bool, outer: bool) -> BodyElement {
        let atom = AtomId(a);
        let elit = if inner_neg { EpistemicLiteral::of_negated(atom) } else { EpistemicLiteral::of_atom(atom) };
        BodyElement::Elit { elit, negated: outer }
    }

    #[test]
    fn two_views_text() {
        let p = parse_easp_not("p :- $not$ q.\nq :- $not$ p.").unwrap();
        assert_eq!(p.atoms.names(), ["p", "q"]);
        assert_eq!(p.rules[0], ElpRule::new(vec![AtomId(1)], vec![elit(2, false, false)]));
        assert_eq!(render_elp(&p, Dialect::Not), "p :- $not$ q.\nq :- $not$ p.");
    }

    #[test]
    fn empty_text() {
        let p = parse_easp_not("").unwrap();
        assert!(p.atoms.is_empty() && p.rules.is_empty());
        assert_eq!(render_elp(&p, Dialect::Not), "");
    }

    #[test]
    fn disjunction_and_constraint() {
        let p = parse_easp_not("a | b. :- a, not b.").unwrap();
        let (a, b) = (AtomId(1), AtomId(2));
        let expected = vec![
            ElpRule::new(vec![a, b], vec![]),
            ElpRule::new(vec![], vec![BodyElement::Plain(Literal::pos(a)), BodyElement::Plain(Literal::neg(b))]),
        ];
        assert_eq!(p.rules, expected);
    }

    #[test]
    fn modal_identities() {
        let k = parse_easp_km("p :- K$ q.").unwrap();
        assert_eq!(k.rules[0].body, vec![elit(2, false, true)]);
        let m = parse_easp_km("p :- M$ q.").unwrap();
        assert_eq!(m.rules[0].body, vec![elit(2, true, false)]);
        let nk = parse_easp_km("p :- not K$ q.").unwrap();
        assert_eq!(nk.rules[0].body, vec![elit(2, false, false)]);
        let nm = parse_easp_km("p :- not M$ q.").unwrap();
        assert_eq!(nm.rules[0].body, vec![elit(2, true, true)]);
        assert_eq!(render_elp(&k, Dialect::Km), "p :- K$ q.");
        assert_eq!(render_elp(&k, Dialect::Not), "p :- not $not$ q.");
        assert_eq!(render_elp(&nm, Dialect::Not), "p :- not $not$ not q.");
    }

    #[test]
    fn errors_carry_spans() {
        let e = parse_easp_not("p :- q\nr.").unwrap_err();
        assert_eq!(e.span, SourceSpan { line: 2, column: 1, length: 1 });
        let e = parse_easp_not("p :- K$ q.").unwrap_err();
        assert_eq!(e.span.column, 6);
        let e = parse_easp_not("a__dup1.").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ReservedName(_)));
        assert_eq!(parse_easp_not("  :- .").unwrap_err().kind, ParseErrorKind::EmptyRule);
        assert_eq!(parse_easp_not(".").unwrap_err().kind, ParseErrorKind::EmptyRule);
        assert!(parse_easp_not("p :- not not q.").is_err());
        assert!(parse_easp_not("P.").is_err());
    }

    #[test]
    fn comments_ignored() {
        let p = parse_easp_not("% header\np. % trailing\n").unwrap();
        assert_eq!(p.rules.len(), 1);
    }

    #[test]
    fn duplicates_normalized() {
        let p = parse_easp_not("a :- a.").unwrap();
        assert_eq!(p.atoms.names(), ["a", "a__dup1"]);
        assert!(crate::model::validate(&p).is_empty());
    }
}
