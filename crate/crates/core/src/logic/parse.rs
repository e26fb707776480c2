//! Parser for the clause grammar shared by programs, mode files and windows.
//!
//! ```text
//! clause   := literal [ ":-" literal { "," literal } ] "."
//! literal  := [ "not" ] term
//! term     := primary { ("+" | "-") primary }
//! primary  := Var | Int | ident [ "(" term { "," term } ")" ] | ("+" | "-" | "#") ident
//! ```
//!
//! `%` starts a comment that runs to the end of the line.

use crate::error::{Error, Result};
use crate::logic::term::{Clause, Literal, Program, Term};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Neck,
    Plus,
    Minus,
    Hash,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(src: &str, first_line: usize) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, first_line, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: tl, col: tc });
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            ',' => push(&mut out, Tok::Comma),
            '.' => push(&mut out, Tok::Dot),
            '+' => push(&mut out, Tok::Plus),
            '-' => push(&mut out, Tok::Minus),
            '#' => push(&mut out, Tok::Hash),
            ':' if chars.get(i + 1) == Some(&'-') => {
                push(&mut out, Tok::Neck);
                i += 2;
                col += 2;
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value = text.parse::<i64>().map_err(|_| Error::Syntax {
                    line: tl,
                    col: tc,
                    msg: format!("integer `{text}` out of range"),
                })?;
                push(&mut out, Tok::Int(value));
                col += i - start;
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let tok = if c.is_uppercase() || c == '_' { Tok::Var(text) } else { Tok::Ident(text) };
                push(&mut out, tok);
                col += i - start;
                continue;
            }
            other => return Err(Error::Syntax { line: tl, col: tc, msg: format!("unexpected character `{other}`") }),
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

/// A parsed clause whose head may carry a negation flag; used where explicit
/// negative facts are legal (window narratives).
#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub head: Literal,
    pub body: Vec<Literal>,
    pub line: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof_line: usize,
}

impl Parser {
    fn new(src: &str, first_line: usize) -> Result<Self> {
        let toks = tokenize(src, first_line)?;
        let eof_line = first_line + src.lines().count().max(1) - 1;
        Ok(Parser { toks, pos: 0, eof_line })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => (self.eof_line, 1),
        };
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn term(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        while let Some(op @ (Tok::Plus | Tok::Minus)) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.primary()?;
            let f = if op == Tok::Plus { "+" } else { "-" };
            t = Term::compound(f, vec![t, rhs]);
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Term::Var(v))
            }
            Some(Tok::Int(i)) => {
                self.pos += 1;
                Ok(Term::Int(i))
            }
            Some(Tok::Minus) if matches!(self.peek_at(1), Some(Tok::Int(_))) => {
                self.pos += 1;
                match self.next() {
                    Some(Tok::Int(i)) => Ok(Term::Int(-i)),
                    _ => unreachable!(),
                }
            }
            Some(p @ (Tok::Plus | Tok::Minus | Tok::Hash)) => {
                self.pos += 1;
                let marker = match p {
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    _ => "#",
                };
                match self.next() {
                    Some(Tok::Ident(ty)) => Ok(Term::compound(marker, vec![Term::Const(ty)])),
                    _ => {
                        self.pos -= 1;
                        self.err("expected a type name after placemarker")
                    }
                }
            }
            Some(Tok::Ident(name)) if name == "not" => {
                self.pos += 1;
                let inner = self.term()?;
                Ok(Term::compound("not", vec![inner]))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() != Some(&Tok::LParen) {
                    return Ok(Term::Const(name));
                }
                self.pos += 1;
                let mut args = vec![self.term()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.pos += 1;
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                Ok(Term::Compound(name, args))
            }
            _ => self.err("expected a term"),
        }
    }

    fn literal(&mut self) -> Result<Literal> {
        let t = self.term()?;
        Ok(match t {
            Term::Compound(f, mut args) if f == "not" && args.len() == 1 => Literal::neg(args.remove(0)),
            t => Literal::pos(t),
        })
    }

    fn statement(&mut self) -> Result<Statement> {
        let line = self.toks[self.pos].line;
        let head = self.literal()?;
        let mut body = Vec::new();
        if self.peek() == Some(&Tok::Neck) {
            self.pos += 1;
            body.push(self.literal()?);
            while self.peek() == Some(&Tok::Comma) {
                self.pos += 1;
                body.push(self.literal()?);
            }
        }
        self.expect(Tok::Dot, "`.` at end of clause")?;
        Ok(Statement { head, body, line })
    }
}

/// Parses statements, allowing negated heads. `first_line` offsets reported positions.
pub fn parse_statements_at(src: &str, first_line: usize) -> Result<Vec<Statement>> {
    let mut p = Parser::new(src, first_line)?;
    let mut out = Vec::new();
    while !p.at_end() {
        out.push(p.statement()?);
    }
    Ok(out)
}

pub fn parse_statements(src: &str) -> Result<Vec<Statement>> {
    parse_statements_at(src, 1)
}

pub fn parse_program(src: &str) -> Result<Program> {
    parse_statements(src)?
        .into_iter()
        .map(|s| {
            if s.head.negated {
                Err(Error::Syntax { line: s.line, col: 1, msg: "clause head cannot be negated".into() })
            } else {
                Ok(Clause::new(s.head.atom, s.body))
            }
        })
        .collect()
}

pub fn parse_clause(src: &str) -> Result<Clause> {
    let prog = parse_program(src)?;
    match prog.clauses.len() {
        1 => Ok(prog.clauses.into_iter().next().unwrap()),
        n => Err(Error::Syntax { line: 1, col: 1, msg: format!("expected one clause, found {n}") }),
    }
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Parser::new(src, 1)?;
    let t = p.term()?;
    if !p.at_end() {
        return p.err("trailing input after term");
    }
    Ok(t)
}

pub fn parse_literal(src: &str) -> Result<Literal> {
    let mut p = Parser::new(src, 1)?;
    let l = p.literal()?;
    if !p.at_end() {
        return p.err("trailing input after literal");
    }
    Ok(l)
}

impl std::str::FromStr for Term {
    type Err = Error;
    fn from_str(s: &str) -> Result<Term> {
        parse_term(s)
    }
}

impl std::str::FromStr for Clause {
    type Err = Error;
    fn from_str(s: &str) -> Result<Clause> {
        parse_clause(s)
    }
}

impl std::str::FromStr for Program {
    type Err = Error;
    fn from_str(s: &str) -> Result<Program> {
        parse_program(s)
    }
}
