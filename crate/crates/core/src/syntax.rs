//! Concrete syntax for terms.
//!
//! ```text
//! term := sum
//! sum  := seq ( "+" seq )*
//! seq  := star ( "." seq )?
//! star := atom ( "*" atom )*
//! atom := "0" | ident | "(" term ")"
//! ```
//!
//! `*` binds tightest and associates to the left, `.` is right associative,
//! `+` is loosest and associates to the left.

use thiserror::Error;

use crate::term::{Action, Term, TermKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {message}")]
pub struct SyntaxError {
    pub pos: usize,
    pub message: String,
}

impl SyntaxError {
    pub(crate) fn new(pos: usize, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Zero,
    Ident(String),
    Plus,
    Dot,
    Star,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'0' => Tok::Zero,
            b'+' => Tok::Plus,
            b'.' => Tok::Dot,
            b'*' => Tok::Star,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::new(i, format!("unexpected character {ch:?}")));
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn sum(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.seq()?;
        while self.peek() == Some(&Tok::Plus) {
            self.pos += 1;
            let rhs = self.seq()?;
            acc = Term::plus(acc, rhs);
        }
        Ok(acc)
    }

    fn seq(&mut self) -> Result<Term, SyntaxError> {
        let head = self.star()?;
        if self.peek() == Some(&Tok::Dot) {
            self.pos += 1;
            let tail = self.seq()?;
            return Ok(Term::mult(head, tail));
        }
        Ok(head)
    }

    fn star(&mut self) -> Result<Term, SyntaxError> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            let rhs = self.atom()?;
            acc = Term::star(acc, rhs);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term, SyntaxError> {
        let at = self.offset();
        match self.toks.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Tok::Zero) => {
                self.pos += 1;
                Ok(Term::zero())
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Term::action(Action::new(&name)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(SyntaxError::new(self.offset(), "expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(t) => Err(SyntaxError::new(at, format!("unexpected token {t:?}"))),
            None => Err(SyntaxError::new(at, "unexpected end of input")),
        }
    }
}

/// Parses a term.
pub fn parse(text: &str) -> Result<Term, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let t = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(SyntaxError::new(p.offset(), "trailing input"));
    }
    Ok(t)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Seq,
    Star,
    Atom,
}

fn level_of(t: &Term) -> Level {
    match t.kind() {
        TermKind::Zero | TermKind::Act(_) => Level::Atom,
        TermKind::Plus(..) => Level::Sum,
        TermKind::Mult(..) => Level::Seq,
        TermKind::Star(..) => Level::Star,
    }
}

fn write_at(out: &mut String, t: &Term, min: Level) {
    if level_of(t) < min {
        out.push('(');
        write_term(out, t);
        out.push(')');
    } else {
        write_term(out, t);
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t.kind() {
        TermKind::Zero => out.push('0'),
        TermKind::Act(a) => out.push_str(a.name()),
        TermKind::Plus(l, r) => {
            write_at(out, l, Level::Sum);
            out.push_str(" + ");
            write_at(out, r, Level::Seq);
        }
        TermKind::Mult(l, r) => {
            write_at(out, l, Level::Star);
            out.push_str(" . ");
            write_at(out, r, Level::Seq);
        }
        TermKind::Star(l, r) => {
            write_at(out, l, Level::Star);
            out.push_str(" * ");
            write_at(out, r, Level::Atom);
        }
    }
}

/// Renders a term with the minimal parenthesization that reparses to the
/// same tree.
pub fn render(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: &str) -> Term {
        Term::act(n)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse("0").unwrap(), Term::zero());
        assert_eq!(
            parse("a * b . c").unwrap(),
            Term::mult(Term::star(a("a"), a("b")), a("c"))
        );
        assert_eq!(
            parse("a . b . c").unwrap(),
            Term::mult(a("a"), Term::mult(a("b"), a("c")))
        );
        assert_eq!(
            parse("a + b + c").unwrap(),
            Term::plus(Term::plus(a("a"), a("b")), a("c"))
        );
        assert_eq!(
            parse("a*b*c").unwrap(),
            Term::star(Term::star(a("a"), a("b")), a("c"))
        );
    }

    #[test]
    fn render_examples() {
        assert_eq!(render(&Term::zero()), "0");
        assert_eq!(
            render(&Term::mult(Term::star(a("a"), a("b")), a("c"))),
            "a * b . c"
        );
        assert_eq!(
            render(&Term::plus(
                Term::mult(a("a"), a("b")),
                Term::mult(a("a"), a("c"))
            )),
            "a . b + a . c"
        );
        assert_eq!(render(&parse("a*(b*c)").unwrap()), "a * (b * c)");
        assert_eq!(render(&parse("(a.b).c").unwrap()), "(a . b) . c");
        assert_eq!(render(&parse("a+(b+c)").unwrap()), "a + (b + c)");
        assert_eq!(render(&parse("(a+b)*(c.d)").unwrap()), "(a + b) * (c . d)");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert_eq!(parse("").unwrap_err().pos, 0);
        assert_eq!(parse("a +").unwrap_err().pos, 3);
        assert_eq!(parse("a b").unwrap_err().pos, 2);
        assert_eq!(parse("(a").unwrap_err().pos, 2);
        assert_eq!(parse("a # b").unwrap_err().pos, 2);
        assert!(parse("A").is_err());
        assert!(parse("a)").is_err());
    }

    #[test]
    fn identifiers() {
        assert_eq!(parse("send_1 . recv").unwrap().size(), 3);
        assert_eq!(
            parse("  a\n*\t0 ").unwrap(),
            Term::star(a("a"), Term::zero())
        );
    }
}
