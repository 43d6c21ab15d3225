//! Query syntax: `q(x1,x2) :- taught(x1,x2), Prof(x2).`
//!
//! Bare identifiers are variables, quoted identifiers (`'kr'` or `"kr"`)
//! are individuals. Unary atoms are concept atoms and binary atoms are role
//! atoms; `#` starts a comment.

use super::{ConjunctiveQuery, QueryError};
use crate::kb::{Concept, Individual, Role};
use crate::rewrite::{Atom, Term};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Turnstile,
}

fn syntax(column: usize, message: impl Into<String>) -> QueryError {
    QueryError::Syntax {
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => out.push((Tok::LParen, col)),
            ')' => out.push((Tok::RParen, col)),
            ',' => out.push((Tok::Comma, col)),
            '.' => out.push((Tok::Dot, col)),
            ':' if chars.get(i + 1) == Some(&'-') => {
                out.push((Tok::Turnstile, col));
                i += 1;
            }
            '\'' | '"' => {
                let start = i + 1;
                let end = chars[start..]
                    .iter()
                    .position(|&d| d == c)
                    .map(|p| start + p)
                    .ok_or_else(|| syntax(col, "unterminated quoted individual"))?;
                let name: String = chars[start..end].iter().collect();
                if name.is_empty() {
                    return Err(syntax(col, "empty individual name"));
                }
                out.push((Tok::Quoted(name), col));
                i = end;
            }
            c if c.is_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
                continue;
            }
            other => return Err(syntax(col, format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), QueryError> {
        let col = self.column();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(col, format!("expected {what}"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, QueryError> {
        let col = self.column();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => Err(syntax(col, format!("expected {what}"))),
        }
    }

    fn term(&mut self) -> Result<Term, QueryError> {
        let col = self.column();
        match self.next() {
            Some(Tok::Ident(s)) => Ok(Term::Var(s)),
            Some(Tok::Quoted(s)) => Ok(Term::Named(Individual::new(s))),
            _ => Err(syntax(col, "expected a variable or a quoted individual")),
        }
    }

    fn atom(&mut self) -> Result<Atom, QueryError> {
        let col = self.column();
        let name = self.ident("an atom")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut args = vec![self.term()?];
        while self.peek() == Some(&Tok::Comma) {
            self.next();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen, "`)`")?;
        if name == "eq" {
            return Err(QueryError::EqualityAtom);
        }
        if name == "Bot" {
            return Err(QueryError::BottomAtom);
        }
        match args.len() {
            1 => {
                let c = if name == "Top" {
                    Concept::Top
                } else {
                    Concept::Atomic(name)
                };
                Ok(Atom::concept(c, args.pop().expect("one argument")))
            }
            2 => {
                let t = args.pop().expect("two arguments");
                let s = args.pop().expect("two arguments");
                Ok(Atom::role(Role::new(name), s, t))
            }
            n => Err(syntax(
                col,
                format!("atom `{name}` has {n} arguments, expected 1 or 2"),
            )),
        }
    }
}

/// Parses a conjunctive query; see the module docs for the syntax.
pub fn parse_query(text: &str) -> Result<ConjunctiveQuery, QueryError> {
    let toks = tokenize(text)?;
    let end = text.chars().count() + 1;
    let mut cur = Cursor { toks, pos: 0, end };
    cur.ident("a query name")?;
    cur.expect(Tok::LParen, "`(`")?;
    let mut head = Vec::new();
    if cur.peek() != Some(&Tok::RParen) {
        loop {
            let col = cur.column();
            match cur.term()? {
                Term::Var(v) => head.push(v),
                _ => return Err(syntax(col, "answer positions must be variables")),
            }
            if cur.peek() != Some(&Tok::Comma) {
                break;
            }
            cur.next();
        }
    }
    cur.expect(Tok::RParen, "`)`")?;
    cur.expect(Tok::Turnstile, "`:-`")?;
    let mut atoms = vec![cur.atom()?];
    while cur.peek() == Some(&Tok::Comma) {
        cur.next();
        atoms.push(cur.atom()?);
    }
    cur.expect(Tok::Dot, "`.`")?;
    if cur.peek().is_some() {
        return Err(syntax(cur.column(), "trailing input after the query"));
    }
    ConjunctiveQuery::new(head, atoms)
}
