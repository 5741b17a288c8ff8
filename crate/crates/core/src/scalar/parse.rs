use num::{BigInt, BigRational, Zero};

use crate::error::{Error, Result};

use super::exact::ExactScalar;

/// Parses an exact amplitude literal such as `1/(2*sqrt2)`, `-7/24` or
/// `i/(2*sqrt2)`.
///
/// Grammar (usual precedence, `*` and `/` bind tighter than `+`/`-`):
///
/// ```text
/// expr   := [+|-] term { (+|-) term }
/// term   := factor { (*|/) factor }
/// factor := integer | "i" | "sqrt2" | "(" expr ")"
/// ```
///
/// Division is exact field division, so `1/sqrt2` becomes `sqrt2/2`.
pub fn parse_amplitude(text: &str) -> Result<ExactScalar> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let value = p.expr()?;
    match p.peek() {
        Some(t) => Err(err_at(t.pos, "unexpected trailing input")),
        None => Ok(value),
    }
}

/// Renders a scalar in the literal grammar accepted by [`parse_amplitude`].
pub fn render_exact(x: &ExactScalar) -> String {
    let mut terms: Vec<(bool, String)> = Vec::new();
    push_term(&mut terms, x.coeff_a(), None);
    push_term(&mut terms, x.coeff_b(), Some("sqrt2"));
    push_term(&mut terms, x.coeff_c(), Some("i"));
    push_term(&mut terms, x.coeff_d(), Some("i*sqrt2"));
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (neg, body)) in terms.iter().enumerate() {
        if k == 0 {
            if *neg {
                out.push('-');
            }
        } else {
            out.push_str(if *neg { " - " } else { " + " });
        }
        out.push_str(body);
    }
    out
}

fn push_term(terms: &mut Vec<(bool, String)>, coeff: &BigRational, basis: Option<&str>) {
    use num::Signed;
    if coeff.is_zero() {
        return;
    }
    let neg = coeff.is_negative();
    let mag = coeff.abs();
    let body = match basis {
        None => rational_string(&mag),
        Some(b) => {
            if mag == BigRational::from_integer(BigInt::from(1)) {
                b.to_string()
            } else {
                format!("{}*{}", rational_string(&mag), b)
            }
        }
    };
    terms.push((neg, body));
}

fn rational_string(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Int(BigInt),
    I,
    Sqrt2,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    pos: usize,
}

fn err_at(pos: usize, message: &str) -> Error {
    Error::Parse {
        position: pos,
        message: message.to_string(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let kind = match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => TokenKind::Plus,
            b'-' => TokenKind::Minus,
            b'*' => TokenKind::Star,
            b'/' => TokenKind::Slash,
            b'(' => TokenKind::LParen,
            b')' => TokenKind::RParen,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let n: BigInt = digits.parse().expect("digit run parses as integer");
                tokens.push(Token {
                    kind: TokenKind::Int(n),
                    pos: start,
                });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let kind = match word {
                    "i" => TokenKind::I,
                    "sqrt2" => TokenKind::Sqrt2,
                    _ => return Err(err_at(start, &format!("unknown symbol `{word}`"))),
                };
                tokens.push(Token { kind, pos: start });
                continue;
            }
            _ => return Err(err_at(i, &format!("unexpected character `{}`", b as char))),
        };
        tokens.push(Token { kind, pos: i });
        i += 1;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_pos(&self) -> usize {
        self.tokens.last().map(|t| t.pos + 1).unwrap_or(0)
    }

    fn expr(&mut self) -> Result<ExactScalar> {
        let mut negate = false;
        if let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Plus => {
                    self.advance();
                }
                TokenKind::Minus => {
                    self.advance();
                    negate = true;
                }
                _ => {}
            }
        }
        let mut acc = self.term()?;
        if negate {
            acc = -acc;
        }
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Plus => {
                    self.advance();
                    let rhs = self.term()?;
                    acc = acc + rhs;
                }
                TokenKind::Minus => {
                    self.advance();
                    let rhs = self.term()?;
                    acc = acc - rhs;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<ExactScalar> {
        let mut acc = self.factor()?;
        while let Some(t) = self.peek() {
            match t.kind {
                TokenKind::Star => {
                    self.advance();
                    let rhs = self.factor()?;
                    acc = acc * rhs;
                }
                TokenKind::Slash => {
                    let at = t.pos;
                    self.advance();
                    let rhs = self.factor()?;
                    acc = acc
                        .checked_div(&rhs)
                        .ok_or_else(|| err_at(at, "division by zero"))?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<ExactScalar> {
        let end = self.end_pos();
        let t = self
            .advance()
            .ok_or_else(|| err_at(end, "unexpected end of input"))?;
        match t.kind {
            TokenKind::Int(n) => Ok(ExactScalar::from_rational(BigRational::from_integer(n))),
            TokenKind::I => Ok(ExactScalar::i()),
            TokenKind::Sqrt2 => Ok(ExactScalar::sqrt2()),
            TokenKind::LParen => {
                let inner = self.expr()?;
                match self.advance() {
                    Some(Token {
                        kind: TokenKind::RParen,
                        ..
                    }) => Ok(inner),
                    Some(t) => Err(err_at(t.pos, "expected `)`")),
                    None => Err(err_at(self.end_pos(), "expected `)`")),
                }
            }
            _ => Err(err_at(t.pos, "expected a number, `i`, `sqrt2` or `(`")),
        }
    }
}
