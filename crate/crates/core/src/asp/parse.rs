//! Parser for the ASP subset emitted by [`render_asp`](super::render_asp).

use super::error::AspError;
use super::syntax::{NonGroundAtom, NonGroundProgram, NonGroundRule, Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    Show,
    If,
    Not,
    Dot,
    Comma,
    Bar,
    Minus,
    Slash,
    LParen,
    RParen,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> AspError {
    AspError::Parse { line, column, message: message.into() }
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|(_, c)| *c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, AspError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if c == '%' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
                continue;
            }
            let tok = if c.is_ascii_alphabetic() || c == '_' || c == '#' {
                let mut s = String::new();
                s.push(self.bump().unwrap());
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
                    s.push(self.bump().unwrap());
                }
                match s.as_str() {
                    "not" => Tok::Not,
                    "#show" => Tok::Show,
                    _ if s.starts_with('#') => return Err(err(line, col, format!("unsupported directive {s}"))),
                    _ if s.starts_with(|c: char| c.is_ascii_uppercase() || c == '_') => Tok::Var(s),
                    _ => Tok::Ident(s),
                }
            } else if c.is_ascii_digit() {
                let mut s = String::new();
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    s.push(self.bump().unwrap());
                }
                Tok::Int(s.parse().map_err(|_| err(line, col, "integer out of range"))?)
            } else {
                self.bump();
                match c {
                    ':' => {
                        if self.peek() == Some('-') {
                            self.bump();
                            Tok::If
                        } else {
                            return Err(err(line, col, "expected ':-'"));
                        }
                    }
                    '.' => Tok::Dot,
                    ',' => Tok::Comma,
                    '|' | ';' => Tok::Bar,
                    '-' => Tok::Minus,
                    '/' => Tok::Slash,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => return Err(err(line, col, format!("unexpected character '{c}'"))),
                }
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|t| (t.1, t.2)).unwrap_or(self.end)
    }

    fn fail<T>(&self, msg: &str) -> Result<T, AspError> {
        let (l, c) = self.here();
        Err(err(l, c, msg))
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), AspError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(&format!("expected {what}"))
        }
    }

    fn primary(&mut self) -> Result<Term, AspError> {
        match self.next() {
            Some(Tok::Int(i)) => Ok(Term::Int(i)),
            Some(Tok::Minus) => match self.next() {
                Some(Tok::Int(i)) => Ok(Term::Int(-i)),
                _ => {
                    self.pos -= 1;
                    self.fail("expected integer after unary minus")
                }
            },
            Some(Tok::Var(v)) => Ok(Term::Var(v)),
            Some(Tok::Ident(s)) => {
                if self.eat(&Tok::LParen) {
                    let args = self.terms()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(Term::Func(s, args))
                } else {
                    Ok(Term::Sym(s))
                }
            }
            Some(Tok::LParen) => {
                let t = self.term()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => {
                self.pos -= 1;
                self.fail("expected a term")
            }
        }
    }

    fn term(&mut self) -> Result<Term, AspError> {
        let mut t = self.primary()?;
        while self.eat(&Tok::Minus) {
            t = Term::minus(t, self.primary()?);
        }
        Ok(t)
    }

    fn terms(&mut self) -> Result<Vec<Term>, AspError> {
        let mut v = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            v.push(self.term()?);
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<NonGroundAtom, AspError> {
        match self.next() {
            Some(Tok::Ident(name)) => {
                let terms = if self.eat(&Tok::LParen) {
                    let t = self.terms()?;
                    self.expect(&Tok::RParen, "')'")?;
                    t
                } else {
                    Vec::new()
                };
                Ok(NonGroundAtom::new(name, terms))
            }
            _ => {
                self.pos -= 1;
                self.fail("expected an atom")
            }
        }
    }

    fn body(&mut self, rule: &mut NonGroundRule) -> Result<(), AspError> {
        if self.peek() == Some(&Tok::Dot) {
            return Ok(());
        }
        loop {
            if self.eat(&Tok::Not) {
                rule.neg.push(self.atom()?);
            } else {
                rule.pos.push(self.atom()?);
            }
            if !self.eat(&Tok::Comma) {
                return Ok(());
            }
        }
    }

    fn program(&mut self) -> Result<NonGroundProgram, AspError> {
        let mut rules = Vec::new();
        let mut shows: Option<Vec<Signature>> = None;
        while self.peek().is_some() {
            if self.eat(&Tok::Show) {
                let name = match self.next() {
                    Some(Tok::Ident(s)) => s,
                    _ => {
                        self.pos -= 1;
                        return self.fail("expected predicate name");
                    }
                };
                self.expect(&Tok::Slash, "'/'")?;
                let arity = match self.next() {
                    Some(Tok::Int(i)) if i >= 0 => i as usize,
                    _ => {
                        self.pos -= 1;
                        return self.fail("expected arity");
                    }
                };
                self.expect(&Tok::Dot, "'.'")?;
                shows.get_or_insert_with(Vec::new).push(Signature::new(name, arity));
                continue;
            }
            let mut rule = NonGroundRule::default();
            if self.eat(&Tok::If) {
                self.body(&mut rule)?;
            } else {
                rule.head.push(self.atom()?);
                while self.eat(&Tok::Bar) {
                    rule.head.push(self.atom()?);
                }
                if self.eat(&Tok::If) {
                    self.body(&mut rule)?;
                }
            }
            self.expect(&Tok::Dot, "'.'")?;
            rules.push(rule);
        }
        let mut p = NonGroundProgram::new(rules);
        p.projection = shows;
        Ok(p)
    }
}

/// Parses ASP text.
pub fn parse_asp(text: &str) -> Result<NonGroundProgram, AspError> {
    let lexer = Lexer { chars: text.char_indices().peekable(), line: 1, col: 1 };
    let toks = lexer.tokens()?;
    let lines = text.split('\n').count();
    let last = text.rsplit('\n').next().map_or(0, |l| l.chars().count());
    Parser { toks, pos: 0, end: (lines, last + 1) }.program()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asp::render_asp;

    #[test]
    fn round_trip_rendered_text() {
        let src =
            "g(L,1) | g(L,0) :- elit(L).\n:- v(X), or(0,1-(1-X),X), not w(1-X).\n:- .\nfact(neg(a),-2).\n#show g/2.\n";
        let p = parse_asp(src).unwrap();
        assert_eq!(p.rules.len(), 4);
        assert_eq!(render_asp(&p), src);
        assert_eq!(parse_asp(&render_asp(&p)).unwrap(), p);
    }

    #[test]
    fn errors_have_positions() {
        match parse_asp("a :- b\nc.") {
            Err(AspError::Parse { line: 2, column: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_asp("a :- &.").is_err());
    }

    #[test]
    fn comments_and_semicolons() {
        let p = parse_asp("% hi\na ; b. % tail\n").unwrap();
        assert_eq!(p.rules[0].head.len(), 2);
    }
}
