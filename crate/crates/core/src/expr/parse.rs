//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := base ('^' '-'? integer)?
//! base   := number | 'x' | 'y' | 'alpha' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`.

use std::fmt;

use thiserror::Error;

use super::{Expr, Func, Var};

/// What went wrong while parsing, with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    /// Found something other than one of the expected tokens.
    Unexpected {
        found: String,
        expected: Vec<&'static str>,
    },
    UnknownIdentifier(String),
    BadNumber(String),
    BadExponent(String),
}

impl ParseError {
    /// Expected-token set for syntax errors; empty for the other kinds.
    pub fn expected(&self) -> &[&'static str] {
        match &self.kind {
            ParseErrorKind::Unexpected { expected, .. } => expected,
            _ => &[],
        }
    }

    /// One-based line and column of the error within `source`.
    pub fn line_column(&self, source: &str) -> (usize, usize) {
        let upto = &source[..self.offset.min(source.len())];
        let line = upto.matches('\n').count() + 1;
        let col = upto.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
        (line, col)
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Unexpected { found, expected } => write!(
                f,
                "syntax error at offset {}: found {found}, expected one of {}",
                self.offset,
                expected.join(", ")
            ),
            ParseErrorKind::UnknownIdentifier(id) => {
                write!(f, "unknown identifier '{id}' at offset {}", self.offset)
            }
            ParseErrorKind::BadNumber(s) => {
                write!(f, "malformed number '{s}' at offset {}", self.offset)
            }
            ParseErrorKind::BadExponent(s) => {
                write!(
                    f,
                    "exponent must be an integer literal, found '{s}' at offset {}",
                    self.offset
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number '{s}'"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

const OPERAND: &[&str] = &["number", "x", "y", "alpha", "function", "'('", "'-'"];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                let t = match c {
                    b'+' => Tok::Plus,
                    b'-' => Tok::Minus,
                    b'*' => Tok::Star,
                    b'/' => Tok::Slash,
                    b'^' => Tok::Caret,
                    b'(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push((i, t));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                })?;
                out.push((start, Tok::Num(v, text.to_string())));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: i,
                    kind: ParseErrorKind::Unexpected {
                        found: format!("'{ch}'"),
                        expected: OPERAND.to_vec(),
                    },
                });
            }
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected {
                found: self.peek().describe(),
                expected: expected.to_vec(),
            },
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let offset = self.offset();
        match self.bump() {
            Tok::Num(_, text) => {
                let n: i32 = text.parse().map_err(|_| ParseError {
                    offset,
                    kind: ParseErrorKind::BadExponent(text.clone()),
                })?;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            _ => {
                self.pos -= 1;
                Err(self.unexpected(&["integer"]))
            }
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v, _) => {
                self.bump();
                Ok(Expr::Const(v))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => Ok(Expr::Var(Var::X)),
                    "y" => Ok(Expr::Var(Var::Y)),
                    "alpha" => Ok(Expr::Var(Var::Alpha)),
                    _ => match Func::from_name(&name) {
                        Some(func) => {
                            self.expect(Tok::LParen, "'('")?;
                            let arg = self.expr()?;
                            self.expect(Tok::RParen, "')'")?;
                            Ok(Expr::Call(func, Box::new(arg)))
                        }
                        None => Err(ParseError {
                            offset,
                            kind: ParseErrorKind::UnknownIdentifier(name),
                        }),
                    },
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(self.unexpected(OPERAND)),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }
}

/// Parses a complete expression. Trailing input is an error.
pub fn parse_expression(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(source)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(&["operator", "end of input"]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Box<Expr> {
        Box::new(Expr::Var(Var::X))
    }

    #[test]
    fn builds_left_associative_sums() {
        let e = parse_expression("x + x^2 + alpha").unwrap();
        let expected = Expr::Add(
            Box::new(Expr::Add(x(), Box::new(Expr::Pow(x(), 2)))),
            Box::new(Expr::Var(Var::Alpha)),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn cubic_difference() {
        assert_eq!(
            parse_expression("x - x^3").unwrap(),
            Expr::Sub(x(), Box::new(Expr::Pow(x(), 3)))
        );
    }

    #[test]
    fn reports_offset_of_stray_operator() {
        let err = parse_expression("x + * 2").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(err.expected().contains(&"number"));
    }

    #[test]
    fn unary_minus_is_looser_than_power() {
        let e = parse_expression("-x^2").unwrap();
        assert_eq!(e, Expr::Neg(Box::new(Expr::Pow(x(), 2))));
    }

    #[test]
    fn negative_exponents_and_comments() {
        let e = parse_expression("x^-2 # trailing note").unwrap();
        assert_eq!(e, Expr::Pow(x(), -2));
    }

    #[test]
    fn rejects_unknown_names_and_fractional_powers() {
        let err = parse_expression("x + z").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("z".into()));
        assert_eq!(err.offset, 4);
        let err = parse_expression("x^2.5").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::BadExponent(_)));
        assert!(parse_expression("x^y").is_err());
        assert!(parse_expression("(x").is_err());
        assert!(parse_expression("x)").is_err());
        assert!(parse_expression("").is_err());
        assert!(parse_expression("sin x").is_err());
    }

    #[test]
    fn line_column_counts_from_one() {
        let src = "x +\n  * 2";
        let err = parse_expression(src).unwrap_err();
        assert_eq!(err.line_column(src), (2, 3));
    }
}
