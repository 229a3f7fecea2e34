//! Precedence-climbing parser for field expressions.
//!
//! Binding strength, loosest first: `+ -`, `* /`, unary `-`, `^`. Binary
//! operators of equal strength associate to the left, and `^` takes only a
//! literal nonnegative integer on its right, so `-x^2` reads as `-(x^2)`.

use super::expr::{BinOp, FieldExpr, Var};
use super::FieldError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Int(u32, f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) | Tok::Int(_, v) => format!("{v}"),
            Tok::Ident(s) => s.clone(),
            Tok::Op(c) => c.to_string(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, FieldError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let end = t.1 == Tok::End;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next(&mut self) -> Result<(usize, Tok), FieldError> {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += self.peek().map_or(0, char::len_utf8);
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((start, Tok::End));
        };
        if c.is_ascii_digit() || c == '.' {
            return self.number(start).map(|t| (start, t));
        }
        if c.is_alphabetic() || c == '_' {
            while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                self.pos += self.peek().map_or(0, char::len_utf8);
            }
            return Ok((start, Tok::Ident(self.src[start..self.pos].to_string())));
        }
        self.pos += c.len_utf8();
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(FieldError::Syntax {
                    position: start,
                    expected: "expression".into(),
                    found: other.to_string(),
                })
            }
        };
        Ok((start, tok))
    }

    fn number(&mut self, start: usize) -> Result<Tok, FieldError> {
        let bytes = self.src.as_bytes();
        let mut end = start;
        let mut integral = true;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < bytes.len() && bytes[end] == b'.' {
            integral = false;
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                integral = false;
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        self.pos = end;
        let value: f64 = text.parse().map_err(|_| FieldError::Syntax {
            position: start,
            expected: "number".into(),
            found: text.to_string(),
        })?;
        if integral {
            if let Ok(n) = text.parse::<u32>() {
                return Ok(Tok::Int(n, value));
            }
        }
        Ok(Tok::Num(value))
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

const UNARY_MINUS_BP: u8 = 5;
const POW_BP: u8 = 7;

fn infix_bp(op: char) -> Option<(u8, u8)> {
    match op {
        '+' | '-' => Some((1, 2)),
        '*' | '/' => Some((3, 4)),
        _ => None,
    }
}

impl Parser {
    fn peek(&self) -> &(usize, Tok) {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> (usize, Tok) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> FieldError {
        let (pos, tok) = self.peek();
        FieldError::Syntax {
            position: *pos,
            expected: expected.into(),
            found: tok.describe(),
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<FieldExpr, FieldError> {
        let (pos, tok) = self.peek().clone();
        if matches!(tok, Tok::End | Tok::RParen | Tok::Op('+' | '*' | '/' | '^')) {
            return Err(self.error("expression"));
        }
        self.bump();
        let mut lhs = match tok {
            Tok::Num(v) | Tok::Int(_, v) => FieldExpr::Num(v),
            Tok::Ident(name) => match Var::from_name(&name) {
                Some(v) => FieldExpr::Var(v),
                None => return Err(FieldError::UnknownVariable { name, position: pos }),
            },
            Tok::LParen => {
                let inner = self.expr(0)?;
                if self.peek().1 != Tok::RParen {
                    return Err(self.error("')'"));
                }
                self.bump();
                inner
            }
            _ => FieldExpr::neg(self.expr(UNARY_MINUS_BP)?),
        };

        loop {
            let op = match &self.peek().1 {
                Tok::Op(c) => *c,
                _ => break,
            };
            if op == '^' {
                if POW_BP < min_bp {
                    break;
                }
                self.bump();
                match self.peek().1.clone() {
                    Tok::Int(n, _) => {
                        self.bump();
                        lhs = FieldExpr::pow(lhs, n);
                    }
                    _ => return Err(self.error("nonnegative integer exponent")),
                }
                continue;
            }
            let Some((l_bp, r_bp)) = infix_bp(op) else { break };
            if l_bp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(r_bp)?;
            let op = match op {
                '+' => BinOp::Add,
                '-' => BinOp::Sub,
                '*' => BinOp::Mul,
                _ => BinOp::Div,
            };
            lhs = FieldExpr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }
}

/// Parses one scalar component, e.g. `x^2 - y^2`.
pub fn parse_field(text: &str) -> Result<FieldExpr, FieldError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr(0)?;
    if p.peek().1 != Tok::End {
        return Err(p.error("operator or end of input"));
    }
    Ok(e)
}
