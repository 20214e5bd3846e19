//! Textual polynomial matrices.
//!
//! ```text
//! # comment
//! vars x y
//! x + 1; y
//! 3*x*y - 2; x^2 - y^2
//! ```
//!
//! The first significant line declares the variables; each following line is
//! one matrix row of `;`-separated expressions. An expression is a sum of
//! terms, each term a product of at most one integer and variable powers
//! `v` or `v^k`. A variable may appear once per term (`x^2`, not `x*x`).
//! Blank lines and `#` comments are ignored.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::ParseError;
use crate::polytensor::{Monomial, Poly, PolyMatrix};
use crate::scalar::IntCoeff;

pub fn parse_matrix(doc: &str) -> Result<PolyMatrix<BigInt>, ParseError> {
    let mut vars: Option<(Vec<String>, usize)> = None;
    let mut rows: Vec<(usize, Vec<Poly<BigInt>>)> = Vec::new();
    for (idx, raw) in doc.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        match &vars {
            None => vars = Some((parse_vars(line, line_no)?, line_no)),
            Some((names, _)) => {
                let mut p = Parser::new(line, line_no, names);
                rows.push((line_no, p.row()?));
            }
        }
    }
    let Some((names, decl_line)) = vars else {
        return Err(ParseError { line: 1, column: 1, message: "missing `vars` declaration".into() });
    };
    let order = rows.len();
    if order == 0 {
        return Err(ParseError { line: decl_line, column: 1, message: "matrix has no rows".into() });
    }
    for (line, row) in &rows {
        if row.len() != order {
            return Err(ParseError {
                line: *line,
                column: 1,
                message: format!("non-square matrix: row has {} entries, expected {order}", row.len()),
            });
        }
    }
    PolyMatrix::from_rows(names, rows.into_iter().map(|(_, r)| r).collect()).map_err(|e| ParseError {
        line: decl_line,
        column: 1,
        message: e.to_string(),
    })
}

/// Parses a `vars a b c` declaration line.
pub fn parse_vars(line: &str, line_no: usize) -> Result<Vec<String>, ParseError> {
    let mut words = line.split_whitespace();
    let err = |column, message: String| ParseError { line: line_no, column, message };
    if words.next() != Some("vars") {
        return Err(err(1, "expected `vars` declaration".into()));
    }
    let mut names: Vec<String> = Vec::new();
    for w in words {
        let column = line.find(w).map_or(1, |c| c + 1);
        if !is_ident(w) {
            return Err(err(column, format!("invalid variable name `{w}`")));
        }
        if names.iter().any(|n| n == w) {
            return Err(err(column, format!("variable `{w}` declared twice")));
        }
        names.push(w.to_string());
    }
    if names.is_empty() {
        return Err(err(1, "no variables declared".into()));
    }
    Ok(names)
}

fn is_ident(w: &str) -> bool {
    let mut chars = w.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses one expression over `vars`.
pub fn parse_poly(expr: &str, vars: &[String]) -> Result<Poly<BigInt>, ParseError> {
    let mut p = Parser::new(expr, 1, vars);
    let poly = p.expr()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(p.error(format!("unexpected `{c}`")));
    }
    Ok(poly)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(text: &str, line: usize, vars: &'a [String]) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, line, vars }
    }

    fn error(&self, message: String) -> ParseError {
        ParseError { line: self.line, column: self.pos + 1, message }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn row(&mut self) -> Result<Vec<Poly<BigInt>>, ParseError> {
        let mut row = vec![self.expr()?];
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Ok(row),
                Some(';') => {
                    self.pos += 1;
                    row.push(self.expr()?);
                }
                Some(c) => return Err(self.error(format!("unexpected `{c}`"))),
            }
        }
    }

    fn expr(&mut self) -> Result<Poly<BigInt>, ParseError> {
        let mut poly = Poly::zero(self.vars.len());
        self.skip_ws();
        let mut negative = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let (m, c) = self.term()?;
            poly.add_term(m, if negative { -c } else { c }).expect("arity matches");
            self.skip_ws();
            match self.peek() {
                Some('+') => negative = false,
                Some('-') => negative = true,
                _ => return Ok(poly),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<(Monomial, BigInt), ParseError> {
        let mut monomial = vec![0u32; self.vars.len()];
        let mut seen = vec![false; self.vars.len()];
        let mut coeff: Option<BigInt> = None;
        loop {
            self.skip_ws();
            let start = self.pos;
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    if coeff.is_some() {
                        return Err(self.error("more than one integer factor in a term".into()));
                    }
                    coeff = Some(self.integer()?);
                }
                Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                    let name = self.ident();
                    let Some(v) = self.vars.iter().position(|n| *n == name) else {
                        self.pos = start;
                        return Err(self.error(format!("undeclared variable `{name}`")));
                    };
                    if seen[v] {
                        self.pos = start;
                        return Err(self.error(format!("variable `{name}` repeated in a term; use `{name}^k`")));
                    }
                    seen[v] = true;
                    self.skip_ws();
                    monomial[v] = if self.peek() == Some('^') {
                        self.pos += 1;
                        self.skip_ws();
                        let e = self.integer()?;
                        u32::try_from(e).map_err(|_| self.error("exponent too large".into()))?
                    } else {
                        1
                    };
                }
                Some(c) => return Err(self.error(format!("expected a term, found `{c}`"))),
                None => return Err(self.error("expected a term".into())),
            }
            self.skip_ws();
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                return Ok((monomial, coeff.unwrap_or_else(BigInt::one)));
            }
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer".into()));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        Ok(digits.parse().expect("ascii digits"))
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }
}

/// Graded lexicographic order, highest term first.
fn grlex_desc(a: &Monomial, b: &Monomial) -> Ordering {
    let da: u64 = a.iter().map(|&e| e as u64).sum();
    let db: u64 = b.iter().map(|&e| e as u64).sum();
    db.cmp(&da).then_with(|| b.cmp(a))
}

/// Canonical text of a polynomial, terms in descending graded lex order.
pub fn format_poly<T: IntCoeff>(poly: &Poly<T>, vars: &[String]) -> String {
    let mut terms: Vec<(&Monomial, &T)> = poly.terms().collect();
    if terms.is_empty() {
        return "0".into();
    }
    terms.sort_by(|a, b| grlex_desc(a.0, b.0));
    let mut out = String::new();
    for (i, (m, c)) in terms.into_iter().enumerate() {
        let negative = c.is_negative();
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mag = c.abs();
        let factors: Vec<String> = m
            .iter()
            .zip(vars)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, v)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
            .collect();
        if factors.is_empty() {
            write!(out, "{mag}").unwrap();
        } else {
            if !mag.is_one() {
                write!(out, "{mag}*").unwrap();
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

/// Canonical document text for a matrix; parses back to an equal matrix.
pub fn format_matrix<T: IntCoeff>(m: &PolyMatrix<T>) -> String {
    let mut out = format!("vars {}\n", m.vars().join(" "));
    for i in 0..m.order() {
        let row: Vec<String> = (0..m.order()).map(|j| format_poly(m.entry(i, j), m.vars())).collect();
        out.push_str(&row.join("; "));
        out.push('\n');
    }
    out
}
