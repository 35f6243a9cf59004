//! Single-pass recursive-descent parser for the rule text format.
//!
//! ```text
//! program  := (rule)*
//! rule     := [IDENT ":"] literal ((":-" | "<-") body)? ("@" interval)? "."
//! body     := element ("," element)*
//! element  := ["not"] literal | interval
//! literal  := ["-"] IDENT ["(" term ("," term)* ")"]
//! interval := "[" NUM "," NUM "]"
//! ```
//!
//! `%` starts a comment running to the end of the line. Terms starting with
//! an uppercase letter or `_` are variables.

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Atom, BodyElement, Literal, Program, Rule, RuleId, Term};
use crate::interval::TruthInterval;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: invalid interval [{lo},{hi}]: must satisfy 0 <= lo <= hi <= 1")]
    WeightBounds {
        line: usize,
        col: usize,
        lo: f64,
        hi: f64,
    },
    #[error("{line}:{col}: duplicate rule label `{label}`")]
    DuplicateLabel {
        line: usize,
        col: usize,
        label: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64, String),
    LBrack,
    RBrack,
    LParen,
    RParen,
    Comma,
    Colon,
    Arrow,
    At,
    Dot,
    Minus,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Num(_, s) => format!("number `{s}`"),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`:-`".into(),
            Tok::At => "`@`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                bump(1, &mut i, &mut col);
                continue;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            _ => {}
        }
        let tok = match c {
            '[' => {
                bump(1, &mut i, &mut col);
                Tok::LBrack
            }
            ']' => {
                bump(1, &mut i, &mut col);
                Tok::RBrack
            }
            '(' => {
                bump(1, &mut i, &mut col);
                Tok::LParen
            }
            ')' => {
                bump(1, &mut i, &mut col);
                Tok::RParen
            }
            ',' => {
                bump(1, &mut i, &mut col);
                Tok::Comma
            }
            '@' => {
                bump(1, &mut i, &mut col);
                Tok::At
            }
            '.' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                bump(1, &mut i, &mut col);
                Tok::Dot
            }
            ':' if chars.get(i + 1) == Some(&'-') => {
                bump(2, &mut i, &mut col);
                Tok::Arrow
            }
            ':' => {
                bump(1, &mut i, &mut col);
                Tok::Colon
            }
            '<' if chars.get(i + 1) == Some(&'-') => {
                bump(2, &mut i, &mut col);
                Tok::Arrow
            }
            '-' => {
                bump(1, &mut i, &mut col);
                Tok::Minus
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len()
                    && chars[i] == '.'
                    && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
                {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let v = s
                    .parse::<f64>()
                    .map_err(|_| syntax(start_line, start_col, format!("bad number `{s}`")))?;
                Tok::Num(v, s)
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                Tok::Ident(chars[start..i].iter().collect())
            }
            other => {
                return Err(syntax(
                    start_line,
                    start_col,
                    format!("unexpected character `{other}`"),
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

struct RawRule {
    label: Option<(String, usize, usize)>,
    head: Literal,
    body: Vec<BodyElement>,
    weight: TruthInterval,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Spanned, ParseError> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(syntax(
                t.line,
                t.col,
                format!("expected {what}, found {}", t.tok.describe()),
            ))
        }
    }

    fn program(&mut self) -> Result<Vec<RawRule>, ParseError> {
        let mut rules = Vec::new();
        while self.peek().tok != Tok::Eof {
            rules.push(self.rule()?);
        }
        Ok(rules)
    }

    fn rule(&mut self) -> Result<RawRule, ParseError> {
        let label = match (&self.peek().tok, self.peek_at(1)) {
            (Tok::Ident(name), Tok::Colon) => {
                let (name, line, col) = (name.clone(), self.peek().line, self.peek().col);
                self.next();
                self.next();
                Some((name, line, col))
            }
            _ => None,
        };
        let head = self.literal()?;
        let mut body = Vec::new();
        if self.peek().tok == Tok::Arrow {
            self.next();
            body.push(self.element()?);
            while self.peek().tok == Tok::Comma {
                self.next();
                body.push(self.element()?);
            }
        }
        let weight = if self.peek().tok == Tok::At {
            self.next();
            self.interval()?
        } else {
            TruthInterval::TRUE
        };
        self.expect(Tok::Dot, "`.` at end of rule")?;
        Ok(RawRule {
            label,
            head,
            body,
            weight,
        })
    }

    fn element(&mut self) -> Result<BodyElement, ParseError> {
        match &self.peek().tok {
            Tok::LBrack => Ok(BodyElement::Const(self.interval()?)),
            Tok::Ident(s) if s == "not" => {
                self.next();
                Ok(BodyElement::Naf(self.literal()?))
            }
            _ => Ok(BodyElement::Lit(self.literal()?)),
        }
    }

    fn literal(&mut self) -> Result<Literal, ParseError> {
        let negated = if self.peek().tok == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        let predicate = match t.tok {
            Tok::Ident(s) if s != "not" => s,
            other => {
                return Err(syntax(
                    t.line,
                    t.col,
                    format!("expected a predicate name, found {}", other.describe()),
                ))
            }
        };
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.next();
            args.push(self.term()?);
            while self.peek().tok == Tok::Comma {
                self.next();
                args.push(self.term()?);
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(Literal {
            atom: Atom { predicate, args },
            negated,
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => {
                if s.starts_with(|c: char| c.is_uppercase() || c == '_') {
                    Ok(Term::Var(s))
                } else {
                    Ok(Term::Const(s))
                }
            }
            Tok::Num(_, s) => Ok(Term::Const(s)),
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected a term, found {}", other.describe()),
            )),
        }
    }

    fn interval(&mut self) -> Result<TruthInterval, ParseError> {
        let open = self.expect(Tok::LBrack, "`[`")?;
        let lo = self.number()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = self.number()?;
        self.expect(Tok::RBrack, "`]`")?;
        TruthInterval::new(lo, hi).map_err(|_| ParseError::WeightBounds {
            line: open.line,
            col: open.col,
            lo,
            hi,
        })
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Num(v, _) => Ok(v),
            Tok::Minus => match self.next().tok {
                // Negative bounds are syntactically numbers but never valid.
                Tok::Num(v, _) => Ok(-v),
                other => Err(syntax(
                    t.line,
                    t.col,
                    format!("expected a number, found {}", other.describe()),
                )),
            },
            other => Err(syntax(
                t.line,
                t.col,
                format!("expected a number, found {}", other.describe()),
            )),
        }
    }
}

/// Parses a program. Unlabelled rules are named `r1`, `r2`, ... in order,
/// skipping names that are used as explicit labels; a missing weight means
/// `[1,1]`.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let raw = parser.program()?;

    let mut explicit = BTreeSet::new();
    for r in &raw {
        if let Some((name, line, col)) = &r.label {
            if !explicit.insert(name.clone()) {
                return Err(ParseError::DuplicateLabel {
                    line: *line,
                    col: *col,
                    label: name.clone(),
                });
            }
        }
    }

    let mut counter = 0usize;
    let mut rules = Vec::with_capacity(raw.len());
    for r in raw {
        let id = match r.label {
            Some((name, _, _)) => name,
            None => loop {
                counter += 1;
                let candidate = format!("r{counter}");
                if !explicit.contains(&candidate) {
                    break candidate;
                }
            },
        };
        rules.push(Rule {
            id: RuleId(id),
            head: r.head,
            body: r.body,
            weight: r.weight,
        });
    }
    Ok(Program::new(rules).expect("labels checked above"))
}
