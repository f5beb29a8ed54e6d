//! Tokenizer and parsers for coefficient expressions and linear forms.
//!
//! Coefficients are sums of terms `q`, `q*z^k`, `z^k` or `z`, where `q` is an
//! integer or fraction and `z` denotes the primitive root of unity of the
//! surrounding file's order. Linear forms are sums of coefficient-weighted
//! variables `x1 … xℓ` (with `a`, `b`, `c`, `d` accepted for `x1 … x4`), e.g.
//! `a - z^2*b + (1 + z)*d`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::exactnum::{reduce_mod_cyclotomic, CycNum, Rational};

/// A syntax error at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

/// Position of a text fragment inside its file, for error reporting.
#[derive(Debug, Clone, Copy)]
pub struct Span {
    pub line: usize,
    /// 1-based column of the fragment's first character.
    pub column: usize,
}

impl Span {
    pub fn new(line: usize, column: usize) -> Self {
        Span { line, column }
    }

    fn error(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.column + offset, message)
    }
}

fn tokenize(text: &str, span: Span) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits.parse::<BigInt>().expect("ascii digits");
            out.push(Token {
                tok: Tok::Int(value),
                col: start,
            });
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                col: start,
            });
        } else if "+-*/^()".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                col: i,
            });
            i += 1;
        } else {
            return Err(span.error(i, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    span: Span,
    end_col: usize,
    order: u32,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, span: Span, order: u32) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text, span)?,
            pos: 0,
            span,
            end_col: text.chars().count(),
            order,
            _text: text,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.col)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        self.span.error(self.col(), message)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn is_zeta(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == "z")
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = v.clone();
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.err("expected integer")),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let num = self.int()?;
        if self.eat_sym('/') {
            let at = self.col();
            let den = self.int()?;
            if den.is_zero() {
                return Err(self.span.error(at, "zero denominator"));
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }

    /// `z` or `z^k`, returning `k`.
    fn zeta_power(&mut self) -> Result<usize, ParseError> {
        if !self.is_zeta() {
            return Err(self.err("expected 'z'"));
        }
        self.pos += 1;
        if self.eat_sym('^') {
            let at = self.col();
            self.int()?
                .to_usize()
                .ok_or_else(|| self.span.error(at, "exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn monomial(&self, q: Rational, k: usize) -> Result<CycNum, ParseError> {
        let mut poly = vec![Rational::zero(); k + 1];
        poly[k] = q;
        reduce_mod_cyclotomic(&poly, self.order).map_err(|e| self.err(e.to_string()))
    }

    /// `rational ["*" z-power] | z-power`
    fn coefficient_term(&mut self) -> Result<CycNum, ParseError> {
        if self.is_zeta() {
            let k = self.zeta_power()?;
            return self.monomial(Rational::from_integer(1.into()), k);
        }
        let q = self.rational()?;
        let save = self.pos;
        if self.eat_sym('*') && self.is_zeta() {
            let k = self.zeta_power()?;
            return self.monomial(q, k);
        }
        self.pos = save;
        self.monomial(q, 0)
    }

    fn coefficient_sum(&mut self) -> Result<CycNum, ParseError> {
        let mut acc = CycNum::zero(self.order);
        let mut negate = if self.eat_sym('-') {
            true
        } else {
            self.eat_sym('+');
            false
        };
        loop {
            let term = self.coefficient_term()?;
            acc = if negate { &acc - &term } else { &acc + &term };
            if self.eat_sym('+') {
                negate = false;
            } else if self.eat_sym('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn variable(&mut self, dim: usize) -> Result<usize, ParseError> {
        let at = self.col();
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.err("expected variable")),
        };
        let index = match name.as_str() {
            "a" => 0,
            "b" => 1,
            "c" => 2,
            "d" => 3,
            s if s.len() > 1 && s.starts_with('x') => match s[1..].parse::<usize>() {
                Ok(k) if k >= 1 => k - 1,
                _ => return Err(self.span.error(at, format!("bad variable '{s}'"))),
            },
            s => return Err(self.span.error(at, format!("unknown variable '{s}'"))),
        };
        if index >= dim {
            return Err(self.span.error(
                at,
                format!("variable '{name}' out of range for dimension {dim}"),
            ));
        }
        self.pos += 1;
        Ok(index)
    }

    /// Coefficient part of a linear term, if any, up to the variable.
    fn linear_coefficient(&mut self) -> Result<Option<CycNum>, ParseError> {
        let coef = match self.peek() {
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let c = self.coefficient_sum()?;
                self.expect_sym(')')?;
                c
            }
            Some(Tok::Int(_)) => self.coefficient_term()?,
            Some(Tok::Ident(s)) if s == "z" => self.coefficient_term()?,
            _ => return Ok(None),
        };
        self.eat_sym('*');
        Ok(Some(coef))
    }

    fn linear_form(&mut self, dim: usize) -> Result<Vec<CycNum>, ParseError> {
        let mut coeffs = vec![CycNum::zero(self.order); dim];
        let mut negate = if self.eat_sym('-') {
            true
        } else {
            self.eat_sym('+');
            false
        };
        loop {
            let coef = self
                .linear_coefficient()?
                .unwrap_or_else(|| CycNum::one(self.order));
            let var = self.variable(dim)?;
            let term = if negate { -coef } else { coef };
            coeffs[var] = &coeffs[var] + &term;
            if self.eat_sym('+') {
                negate = false;
            } else if self.eat_sym('-') {
                negate = true;
            } else {
                break;
            }
        }
        Ok(coeffs)
    }
}

/// Parses a coefficient expression in `Q(ζ_order)`.
pub fn parse_coefficient(text: &str, order: u32, span: Span) -> Result<CycNum, ParseError> {
    let mut p = Parser::new(text, span, order)?;
    if p.at_end() {
        return Err(p.err("empty coefficient"));
    }
    let value = p.coefficient_sum()?;
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(value)
}

/// Parses a linear expression in variables into a coefficient vector.
pub fn parse_linear_expression(
    text: &str,
    dim: usize,
    order: u32,
    span: Span,
) -> Result<Vec<CycNum>, ParseError> {
    let mut p = Parser::new(text, span, order)?;
    if p.at_end() {
        return Err(p.err("empty linear form"));
    }
    let coeffs = p.linear_form(dim)?;
    if !p.at_end() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(coeffs)
}

/// True if the text names at least one coordinate variable, i.e. it should be
/// read as a linear expression rather than a coefficient list.
pub fn looks_like_linear_expression(text: &str) -> bool {
    text.split(|c: char| !c.is_ascii_alphanumeric() && c != '_')
        .any(|w| matches!(w, "a" | "b" | "c" | "d") || (w.len() > 1 && w.starts_with('x')))
}

/// Parses `form` text that is either a linear expression or a comma-separated
/// coefficient list.
pub fn parse_form_text(
    text: &str,
    dim: usize,
    order: u32,
    span: Span,
) -> Result<Vec<CycNum>, ParseError> {
    if looks_like_linear_expression(text) {
        return parse_linear_expression(text, dim, order, span);
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for piece in text.split(',') {
        out.push(parse_coefficient(
            piece,
            order,
            Span::new(span.line, span.column + offset),
        )?);
        offset += piece.chars().count() + 1;
    }
    if out.len() != dim {
        return Err(ParseError::new(
            span.line,
            span.column,
            format!("expected {dim} coefficients, found {}", out.len()),
        ));
    }
    Ok(out)
}

/// Parses a comma-separated exponent list; empty, `-` and `∅` denote the
/// empty multiset.
pub fn parse_exponent_list(text: &str, span: Span) -> Result<Vec<u64>, ParseError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "-" || trimmed == "∅" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut offset = 0;
    for piece in text.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        let value = piece.trim().parse::<u64>().map_err(|_| {
            ParseError::new(
                span.line,
                span.column + offset + lead,
                format!("expected a nonnegative integer exponent, found '{}'", piece.trim()),
            )
        })?;
        out.push(value);
        offset += piece.chars().count() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span() -> Span {
        Span::new(1, 1)
    }

    #[test]
    fn coefficient_grammar() {
        let c = parse_coefficient("z^2", 3, span()).unwrap();
        assert_eq!(c, CycNum::zeta_pow(2, 3));
        let c = parse_coefficient(" -1 - z ", 3, span()).unwrap();
        assert_eq!(c, CycNum::zeta_pow(2, 3));
        let c = parse_coefficient("1/2*z + 3/4", 4, span()).unwrap();
        assert_eq!(c.to_string(), "3/4 + 1/2*z");
        assert_eq!(
            parse_coefficient("2", 1, span()).unwrap(),
            CycNum::from_integer(2, 1)
        );
    }

    #[test]
    fn coefficient_errors_carry_columns() {
        let err = parse_coefficient("1 + * z", 3, Span::new(4, 10)).unwrap_err();
        assert_eq!((err.line, err.column), (4, 14));
        let err = parse_coefficient("1/0", 3, span()).unwrap_err();
        assert_eq!(err.column, 3);
        let err = parse_coefficient("1 % 2", 3, span()).unwrap_err();
        assert_eq!(err.column, 3);
    }

    #[test]
    fn linear_expressions() {
        let v = parse_linear_expression("a - z^2*b - d", 4, 3, span()).unwrap();
        assert!(v[0].is_one());
        assert_eq!(v[1], -CycNum::zeta_pow(2, 3));
        assert!(v[2].is_zero());
        assert_eq!(v[3], CycNum::from_integer(-1, 3));

        let v = parse_linear_expression("x1 + (1 + z)*x3 + 2 x1", 3, 3, span()).unwrap();
        assert_eq!(v[0], CycNum::from_integer(3, 3));
        assert_eq!(v[2], -CycNum::zeta_pow(2, 3));

        let err = parse_linear_expression("x1 + x4", 3, 1, span()).unwrap_err();
        assert_eq!(err.column, 6);
        assert!(parse_linear_expression("x1 + 2", 3, 1, span()).is_err());
    }

    #[test]
    fn form_text_dispatch() {
        let v = parse_form_text("1, -z, 0", 3, 3, span()).unwrap();
        assert_eq!(v[1], -CycNum::zeta_pow(1, 3));
        let err = parse_form_text("1, 2", 3, 1, span()).unwrap_err();
        assert!(err.message.contains("expected 3"));
        let err = parse_form_text("1, , 2", 3, 1, Span::new(2, 6)).unwrap_err();
        assert_eq!(err.column, 9);
    }

    #[test]
    fn exponent_lists() {
        assert_eq!(parse_exponent_list("1, 7, 13", span()).unwrap(), vec![1, 7, 13]);
        assert!(parse_exponent_list("-", span()).unwrap().is_empty());
        let err = parse_exponent_list("1, x", Span::new(3, 20)).unwrap_err();
        assert_eq!(err.column, 23);
    }
}
