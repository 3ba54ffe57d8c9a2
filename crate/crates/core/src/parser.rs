//! Surface syntax for symbolic expressions.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | power
//! power  := atom ('^' integer)?
//! atom   := number | identifier | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Decimals convert exactly (`0.5` is `1/2`). Scientific notation and
//! implicit multiplication are rejected.

use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use crate::kernel::{Expr, KernelError, ParamEnv};

const MAX_DEPTH: usize = 200;
const MAX_EXPONENT: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Number,
    Ident,
    Sqrt,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Number => "number",
            TokenKind::Ident => "identifier",
            TokenKind::Sqrt => "`sqrt`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Slash => "`/`",
            TokenKind::Caret => "`^`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::Comma => "`,`",
            TokenKind::End => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    /// Character offsets into the source.
    pub span: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    pub span: Range<usize>,
    pub expected: Vec<TokenKind>,
}

impl ParseError {
    fn new(message: impl Into<String>, span: Range<usize>) -> Self {
        ParseError { message: message.into(), span, expected: Vec::new() }
    }

    fn expecting(mut self, kinds: &[TokenKind]) -> Self {
        self.expected = kinds.to_vec();
        self
    }

    /// One-based column of the error start.
    pub fn column(&self) -> usize {
        self.span.start + 1
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at column {}", self.message, self.column())?;
        if !self.expected.is_empty() {
            let names: Vec<String> = self.expected.iter().map(|k| k.to_string()).collect();
            write!(f, " (expected {})", names.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                if !(i < chars.len() && chars[i].is_ascii_digit()) {
                    return Err(ParseError::new("digits expected after decimal point", start..i));
                }
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                let msg = if matches!(chars[i], 'e' | 'E') {
                    "scientific notation is not supported; write the number out"
                } else {
                    "a number must be separated from what follows by an operator"
                };
                return Err(ParseError::new(msg, start..i + 1));
            }
            TokenKind::Number
        } else if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "sqrt" {
                TokenKind::Sqrt
            } else {
                TokenKind::Ident
            }
        } else {
            i += 1;
            match c {
                '+' => TokenKind::Plus,
                '-' => TokenKind::Minus,
                '*' => TokenKind::Star,
                '/' => TokenKind::Slash,
                '^' => TokenKind::Caret,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                ',' => TokenKind::Comma,
                _ => return Err(ParseError::new(format!("unexpected character `{c}`"), start..i)),
            }
        };
        out.push(Token { kind, lexeme: chars[start..i].iter().collect(), span: start..i });
    }
    Ok(out)
}

/// Parses `src` into a canonical expression over `env`.
pub fn parse_expr(src: &str, env: &ParamEnv) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let end = src.chars().count();
    let mut p = Parser { tokens, pos: 0, env, end, depth: 0 };
    let e = p.expr()?;
    if p.pos < p.tokens.len() {
        let t = &p.tokens[p.pos];
        return Err(ParseError::new(format!("unexpected `{}`", t.lexeme), t.span.clone()).expecting(&[
            TokenKind::Plus,
            TokenKind::Minus,
            TokenKind::Star,
            TokenKind::Slash,
            TokenKind::End,
        ]));
    }
    Ok(e.0)
}

/// Parses a plain number such as `8`, `0.25` or `-3/4` exactly.
pub fn parse_rational(src: &str) -> Result<BigRational, ParseError> {
    let env = ParamEnv::new();
    let e = parse_expr(src, &env)?;
    e.as_rational().ok_or_else(|| ParseError::new("expected a rational number", 0..src.chars().count()))
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    env: &'a ParamEnv,
    end: usize,
    depth: usize,
}

type Spanned = (Expr, Range<usize>);

fn kernel_error(e: KernelError, span: Range<usize>) -> ParseError {
    ParseError::new(e.to_string(), span)
}

impl Parser<'_> {
    fn peek(&self) -> TokenKind {
        self.tokens.get(self.pos).map(|t| t.kind).unwrap_or(TokenKind::End)
    }

    fn here(&self) -> Range<usize> {
        self.tokens.get(self.pos).map(|t| t.span.clone()).unwrap_or(self.end..self.end)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek() == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[kind]))
        }
    }

    fn unexpected(&self, expected: &[TokenKind]) -> ParseError {
        let msg = match self.tokens.get(self.pos) {
            Some(t) => format!("unexpected `{}`", t.lexeme),
            None => "unexpected end of input".to_string(),
        };
        ParseError::new(msg, self.here()).expecting(expected)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new("expression nested too deeply", self.here()));
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Spanned, ParseError> {
        self.enter()?;
        let (mut acc, mut span) = self.term()?;
        loop {
            let op = self.peek();
            if !matches!(op, TokenKind::Plus | TokenKind::Minus) {
                break;
            }
            self.bump();
            let (rhs, rs) = self.term()?;
            acc = if op == TokenKind::Plus { &acc + &rhs } else { &acc - &rhs };
            span = span.start..rs.end;
        }
        self.depth -= 1;
        Ok((acc, span))
    }

    fn term(&mut self) -> Result<Spanned, ParseError> {
        let (mut acc, mut span) = self.factor()?;
        loop {
            let op = self.peek();
            if !matches!(op, TokenKind::Star | TokenKind::Slash) {
                break;
            }
            self.bump();
            let (rhs, rs) = self.factor()?;
            acc = if op == TokenKind::Star {
                &acc * &rhs
            } else {
                acc.checked_div(&rhs).map_err(|e| kernel_error(e, rs.clone()))?
            };
            span = span.start..rs.end;
        }
        Ok((acc, span))
    }

    fn factor(&mut self) -> Result<Spanned, ParseError> {
        if self.peek() == TokenKind::Minus {
            let start = self.bump().span.start;
            self.enter()?;
            let (e, s) = self.factor()?;
            self.depth -= 1;
            return Ok((-e, start..s.end));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Spanned, ParseError> {
        let (base, span) = self.atom()?;
        if self.peek() != TokenKind::Caret {
            return Ok((base, span));
        }
        self.bump();
        if self.peek() != TokenKind::Number {
            let mut err = self.unexpected(&[TokenKind::Number]);
            err.message = format!("{}; exponents must be non-negative integer literals", err.message);
            return Err(err);
        }
        let t = self.bump();
        let n: u32 = match t.lexeme.parse() {
            Ok(n) if n <= MAX_EXPONENT => n,
            Ok(_) | Err(_) if !t.lexeme.contains('.') => {
                return Err(ParseError::new(format!("exponent larger than {MAX_EXPONENT}"), t.span))
            }
            _ => {
                return Err(ParseError::new("exponents must be integers; use sqrt for square roots", t.span))
            }
        };
        let full = span.start..t.span.end;
        let e = base.pow(n as i32).map_err(|e| kernel_error(e, full.clone()))?;
        Ok((e, full))
    }

    fn atom(&mut self) -> Result<Spanned, ParseError> {
        match self.peek() {
            TokenKind::Number => {
                let t = self.bump();
                Ok((Expr::constant(self.env, &decimal(&t.lexeme)), t.span))
            }
            TokenKind::Ident => {
                let t = self.bump();
                let sym = self.env.symbol(&t.lexeme).map_err(|_| {
                    ParseError::new(format!("unknown identifier `{}`", t.lexeme), t.span.clone())
                })?;
                Ok((Expr::symbol(self.env, sym), t.span))
            }
            TokenKind::Sqrt => {
                let start = self.bump().span.start;
                self.expect(TokenKind::LParen)?;
                let (inner, is) = self.expr()?;
                let close = self.expect(TokenKind::RParen)?;
                let e = inner.sqrt().map_err(|e| kernel_error(e, is))?;
                Ok((e, start..close.span.end))
            }
            TokenKind::LParen => {
                let start = self.bump().span.start;
                let (inner, _) = self.expr()?;
                let close = self.expect(TokenKind::RParen)?;
                Ok((inner, start..close.span.end))
            }
            _ => Err(self.unexpected(&[
                TokenKind::Number,
                TokenKind::Ident,
                TokenKind::Sqrt,
                TokenKind::LParen,
                TokenKind::Minus,
            ])),
        }
    }
}

fn decimal(lexeme: &str) -> BigRational {
    match lexeme.split_once('.') {
        None => BigRational::from_integer(lexeme.parse().expect("digits")),
        Some((int, frac)) => {
            let digits: BigInt = format!("{int}{frac}").parse().expect("digits");
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            debug_assert!(!scale.is_zero());
            BigRational::new(digits, scale)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> ParamEnv {
        ParamEnv::with_symbols(&["EA", "L", "H", "P"]).unwrap()
    }

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn tokens() {
        use TokenKind::*;
        assert_eq!(kinds("2/3"), vec![Number, Slash, Number]);
        assert_eq!(kinds("EA*L"), vec![Ident, Star, Ident]);
        assert_eq!(kinds("sqrt(x_1 , 0.25)"), vec![Sqrt, LParen, Ident, Comma, Number, RParen]);
        let err = tokenize("1e3").unwrap_err();
        assert!(err.message.contains("scientific"));
        assert_eq!(err.span.start, 0);
        assert!(tokenize("2L").is_err());
        assert_eq!(tokenize("a # b").unwrap_err().span, 2..3);
    }

    #[test]
    fn precedence_and_values() {
        let e = env();
        let l = Expr::var(&e, "L").unwrap();
        assert_eq!(parse_expr("3*L", &e).unwrap(), l.scale_int(3));
        assert_eq!(parse_expr("-P", &e).unwrap(), -Expr::var(&e, "P").unwrap());
        assert_eq!(parse_expr("-2^2", &e).unwrap(), Expr::from_int(&e, -4));
        assert_eq!(parse_expr("2-3-4", &e).unwrap(), Expr::from_int(&e, -5));
        assert_eq!(parse_expr("12/2/3", &e).unwrap(), Expr::from_int(&e, 2));
        assert_eq!(parse_expr("0.5", &e).unwrap(), parse_expr("1/2", &e).unwrap());
        assert_eq!(parse_expr("(L+H)*P", &e).unwrap(), parse_expr("L*P+H*P", &e).unwrap());
        let r = parse_expr("sqrt(4*H^2+L^2)/(2*L)", &e).unwrap();
        let sq = &r * &r;
        assert_eq!(sq, parse_expr("(4*H^2+L^2)/(4*L^2)", &e).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let e = env();
        let err = parse_expr("L + Q", &e).unwrap_err();
        assert_eq!(err.span, 4..5);
        assert!(err.message.contains("unknown identifier"));
        let err = parse_expr("L^0.5", &e).unwrap_err();
        assert_eq!(err.span, 2..5);
        let err = parse_expr("L^H", &e).unwrap_err();
        assert_eq!(err.expected, vec![TokenKind::Number]);
        let err = parse_expr("(L", &e).unwrap_err();
        assert_eq!(err.span, 2..2);
        assert!(parse_expr("L/(H-H)", &e).unwrap_err().message.contains("division"));
        assert!(parse_expr("sqrt(-4)", &e).is_err());
        assert!(parse_expr("", &e).is_err());
        assert!(parse_expr("L H", &e).is_err());
        let deep = "(".repeat(5000) + "L" + &")".repeat(5000);
        assert!(parse_expr(&deep, &e).is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-3/4").unwrap(), BigRational::new((-3).into(), 4.into()));
        assert_eq!(parse_rational("80000").unwrap(), BigRational::from_integer(80000.into()));
        assert!(parse_rational("x").is_err());
    }
}
