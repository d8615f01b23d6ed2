//! S-expression reading and canonical rendering of types and terms.
//!
//! ```text
//! type ::= "(" "tv" STR ")" | "(" "tc" STR type* ")"
//! term ::= "(" "const" STR type ")" | "(" "free" STR type ")"
//!        | "(" "bound" NAT ")"      | "(" "abs" STR type term ")"
//!        | "(" "app" term term ")"  | "(" "hole" NAT type ")"
//! ```

use std::fmt::Write as _;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::term::Term;
use super::types::TypeExpr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Open,
    Close,
    Str(String),
    Atom(String),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn err<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            offset,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start_matches([' ', '\t', '\n', '\r']);
        self.pos += rest.len() - trimmed.len();
    }

    /// Next token with its starting offset, or `None` at end of input.
    fn next(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut chars = self.src[start..].chars();
        let Some(c) = chars.next() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.pos += 1;
                Ok(Some((start, Tok::Open)))
            }
            ')' => {
                self.pos += 1;
                Ok(Some((start, Tok::Close)))
            }
            '"' => {
                let mut out = String::new();
                let mut i = start + 1;
                let bytes = self.src.as_bytes();
                loop {
                    let Some(ch) = self.src[i..].chars().next() else {
                        return self.err(start, "unterminated string");
                    };
                    match ch {
                        '"' => {
                            self.pos = i + 1;
                            return Ok(Some((start, Tok::Str(out))));
                        }
                        '\\' => match bytes.get(i + 1) {
                            Some(b'"') => {
                                out.push('"');
                                i += 2;
                            }
                            Some(b'\\') => {
                                out.push('\\');
                                i += 2;
                            }
                            _ => return self.err(i, "invalid escape"),
                        },
                        other => {
                            out.push(other);
                            i += other.len_utf8();
                        }
                    }
                }
            }
            _ => {
                let len = self.src[start..]
                    .find(|ch: char| ch.is_whitespace() || ch == '(' || ch == ')' || ch == '"')
                    .unwrap_or(self.src.len() - start);
                self.pos = start + len;
                Ok(Some((start, Tok::Atom(self.src[start..start + len].to_string()))))
            }
        }
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    peeked: Option<Option<(usize, Tok)>>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            lex: Lexer::new(src),
            peeked: None,
        }
    }

    fn peek(&mut self) -> Result<&Option<(usize, Tok)>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = Some(self.lex.next()?);
        }
        Ok(self.peeked.as_ref().unwrap())
    }

    fn bump(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        match self.peeked.take() {
            Some(t) => Ok(t),
            None => self.lex.next(),
        }
    }

    fn offset_here(&mut self) -> Result<usize, ParseError> {
        let end = self.lex.src.len();
        Ok(self.peek()?.as_ref().map_or(end, |(o, _)| *o))
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let end = self.lex.src.len();
        match self.bump()? {
            Some((_, t)) if t == want => Ok(()),
            Some((o, _)) => self.lex.err(o, format!("expected {what}")),
            None => self.lex.err(end, format!("expected {what}, found end of input")),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let end = self.lex.src.len();
        match self.bump()? {
            Some((_, Tok::Str(s))) => Ok(s),
            Some((o, _)) => self.lex.err(o, "expected string literal"),
            None => self.lex.err(end, "expected string literal, found end of input"),
        }
    }

    fn nat(&mut self) -> Result<u32, ParseError> {
        let end = self.lex.src.len();
        match self.bump()? {
            Some((o, Tok::Atom(a))) => {
                if !a.bytes().all(|b| b.is_ascii_digit()) {
                    return self.lex.err(o, "expected natural number");
                }
                a.parse().or_else(|_| self.lex.err(o, "number out of range"))
            }
            Some((o, _)) => self.lex.err(o, "expected natural number"),
            None => self.lex.err(end, "expected natural number, found end of input"),
        }
    }

    fn keyword(&mut self) -> Result<(usize, String), ParseError> {
        let end = self.lex.src.len();
        match self.bump()? {
            Some((o, Tok::Atom(a))) => Ok((o, a)),
            Some((o, _)) => self.lex.err(o, "expected keyword"),
            None => self.lex.err(end, "expected keyword, found end of input"),
        }
    }

    fn ty(&mut self) -> Result<TypeExpr, ParseError> {
        self.expect(Tok::Open, "'('")?;
        let (o, kw) = self.keyword()?;
        let t = match kw.as_str() {
            "tv" => TypeExpr::Var(self.string()?),
            "tc" => {
                let name = self.string()?;
                let mut args = Vec::new();
                while matches!(self.peek()?, Some((_, Tok::Open))) {
                    args.push(self.ty()?);
                }
                TypeExpr::Con(name, args)
            }
            other => return self.lex.err(o, format!("unknown type form '{other}'")),
        };
        self.expect(Tok::Close, "')'")?;
        Ok(t)
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        self.expect(Tok::Open, "'('")?;
        let (o, kw) = self.keyword()?;
        let t = match kw.as_str() {
            "const" => {
                let name = self.string()?;
                Term::Const { name, ty: self.ty()? }
            }
            "free" => {
                let name = self.string()?;
                Term::Free { name, ty: self.ty()? }
            }
            "bound" => Term::Bound(self.nat()?),
            "abs" => {
                let binder = self.string()?;
                let ty = self.ty()?;
                Term::Abs {
                    binder,
                    ty,
                    body: Box::new(self.term()?),
                }
            }
            "app" => {
                let f = self.term()?;
                Term::App(Box::new(f), Box::new(self.term()?))
            }
            "hole" => {
                let index = self.nat()?;
                if index == 0 {
                    return self.lex.err(o, "hole indices start at 1");
                }
                Term::Hole { index, ty: self.ty()? }
            }
            other => return self.lex.err(o, format!("unknown term form '{other}'")),
        };
        self.expect(Tok::Close, "')'")?;
        Ok(t)
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        let o = self.offset_here()?;
        if self.peek()?.is_some() {
            return self.lex.err(o, "trailing input");
        }
        Ok(())
    }
}

pub fn parse_type(text: &str) -> Result<TypeExpr, ParseError> {
    let mut p = Parser::new(text);
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser::new(text);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

fn push_str_lit(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

fn write_type(out: &mut String, t: &TypeExpr) {
    match t {
        TypeExpr::Var(v) => {
            out.push_str("(tv ");
            push_str_lit(out, v);
            out.push(')');
        }
        TypeExpr::Con(name, args) => {
            out.push_str("(tc ");
            push_str_lit(out, name);
            for a in args {
                out.push(' ');
                write_type(out, a);
            }
            out.push(')');
        }
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Const { name, ty } => {
            out.push_str("(const ");
            push_str_lit(out, name);
            out.push(' ');
            write_type(out, ty);
            out.push(')');
        }
        Term::Free { name, ty } => {
            out.push_str("(free ");
            push_str_lit(out, name);
            out.push(' ');
            write_type(out, ty);
            out.push(')');
        }
        Term::Bound(i) => {
            let _ = write!(out, "(bound {i})");
        }
        Term::Abs { binder, ty, body } => {
            out.push_str("(abs ");
            push_str_lit(out, binder);
            out.push(' ');
            write_type(out, ty);
            out.push(' ');
            write_term(out, body);
            out.push(')');
        }
        Term::App(f, x) => {
            out.push_str("(app ");
            write_term(out, f);
            out.push(' ');
            write_term(out, x);
            out.push(')');
        }
        Term::Hole { index, ty } => {
            let _ = write!(out, "(hole {index} ");
            write_type(out, ty);
            out.push(')');
        }
    }
}

pub fn render_type(t: &TypeExpr) -> String {
    let mut out = String::new();
    write_type(&mut out, t);
    out
}

pub fn render_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

impl Serialize for TypeExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_type(self))
    }
}

impl<'de> Deserialize<'de> for TypeExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_type(&text).map_err(D::Error::custom)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_term(self))
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_term(&text).map_err(D::Error::custom)
    }
}
