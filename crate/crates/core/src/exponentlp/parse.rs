//! Recursive-descent parser for the constraint grammar.
//!
//! Statements are newline-separated. A statement is either
//! `maximize <var>` or a chain `expr <= expr [<= expr ...]`, each adjacent
//! pair becoming one constraint. Expressions are linear over identifiers
//! with integer and rational literals, `+ - * /`, unary minus,
//! parentheses, and implicit multiplication (`3b`, `2(a+b)`). `#` starts a
//! comment. Products of two non-constant expressions are rejected as
//! nonlinear.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{Constraint, ExponentProgram};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            col,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: {}",
            self.line, self.col, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Le,
    LParen,
    RParen,
    Newline,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let body = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0usize;
        while i < chars.len() {
            let col = i + 1;
            let ch = chars[i];
            match ch {
                ' ' | '\t' | '\r' => i += 1,
                '+' => {
                    out.push(Token { tok: Tok::Plus, line, col });
                    i += 1;
                }
                '-' => {
                    out.push(Token { tok: Tok::Minus, line, col });
                    i += 1;
                }
                '*' => {
                    out.push(Token { tok: Tok::Star, line, col });
                    i += 1;
                }
                '/' => {
                    out.push(Token { tok: Tok::Slash, line, col });
                    i += 1;
                }
                '(' => {
                    out.push(Token { tok: Tok::LParen, line, col });
                    i += 1;
                }
                ')' => {
                    out.push(Token { tok: Tok::RParen, line, col });
                    i += 1;
                }
                '<' => {
                    if chars.get(i + 1) == Some(&'=') {
                        out.push(Token { tok: Tok::Le, line, col });
                        i += 2;
                    } else {
                        return Err(ParseError::new(line, col, "expected '<=' (strict '<' is not in the grammar)"));
                    }
                }
                '0'..='9' => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let digits: String = chars[start..i].iter().collect();
                    let value = digits
                        .parse::<BigInt>()
                        .map_err(|_| ParseError::new(line, col, "integer literal out of range"))?;
                    out.push(Token { tok: Tok::Int(value), line, col });
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    let name: String = chars[start..i].iter().collect();
                    out.push(Token { tok: Tok::Ident(name), line, col });
                }
                other => {
                    return Err(ParseError::new(line, col, format!("unexpected character '{other}'")));
                }
            }
        }
        out.push(Token { tok: Tok::Newline, line, col: chars.len() + 1 });
    }
    Ok(out)
}

/// A parsed linear form: constant + Σ coeff·var, with variables interned
/// by index.
#[derive(Debug, Clone)]
struct LinForm {
    constant: BigRational,
    coeffs: HashMap<usize, BigRational>,
}

impl LinForm {
    fn constant(value: BigRational) -> Self {
        Self {
            constant: value,
            coeffs: HashMap::new(),
        }
    }

    fn variable(index: usize) -> Self {
        let mut coeffs = HashMap::new();
        coeffs.insert(index, BigRational::from_integer(BigInt::from(1)));
        Self {
            constant: BigRational::zero(),
            coeffs,
        }
    }

    fn is_constant(&self) -> bool {
        self.coeffs.values().all(|c| c.is_zero())
    }

    fn neg(mut self) -> Self {
        self.constant = -self.constant;
        for v in self.coeffs.values_mut() {
            *v = -v.clone();
        }
        self
    }

    fn add(mut self, other: Self) -> Self {
        self.constant += other.constant;
        for (i, c) in other.coeffs {
            *self.coeffs.entry(i).or_insert_with(BigRational::zero) += c;
        }
        self
    }

    fn scale(mut self, factor: &BigRational) -> Self {
        self.constant *= factor;
        for v in self.coeffs.values_mut() {
            *v *= factor;
        }
        self
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    variables: Vec<String>,
    var_index: HashMap<String, usize>,
    constraints: Vec<(HashMap<usize, BigRational>, BigRational)>,
    objective: Option<(String, usize, usize)>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => self
                .tokens
                .last()
                .map(|t| (t.line, t.col))
                .unwrap_or((1, 1)),
        }
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.var_index.get(name) {
            return i;
        }
        let i = self.variables.len();
        self.variables.push(name.to_string());
        self.var_index.insert(name.to_string(), i);
        i
    }

    fn parse_factor(&mut self) -> Result<LinForm, ParseError> {
        let (line, col) = self.here();
        match self.next().map(|t| t.tok) {
            Some(Tok::Int(v)) => Ok(LinForm::constant(BigRational::from_integer(v))),
            Some(Tok::Ident(name)) => {
                let idx = self.intern(&name);
                Ok(LinForm::variable(idx))
            }
            Some(Tok::Minus) => Ok(self.parse_factor()?.neg()),
            Some(Tok::Plus) => self.parse_factor(),
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                let (l, c) = self.here();
                match self.next().map(|t| t.tok) {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(ParseError::new(l, c, "expected ')'")),
                }
            }
            other => Err(ParseError::new(
                line,
                col,
                format!("expected a number, identifier or '(', found {other:?}"),
            )),
        }
    }

    fn parse_term(&mut self) -> Result<LinForm, ParseError> {
        let mut acc = self.parse_factor()?;
        loop {
            let (line, col) = self.here();
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Star) => {
                    self.next();
                    let rhs = self.parse_factor()?;
                    acc = multiply(acc, rhs, line, col)?;
                }
                Some(Tok::Slash) => {
                    self.next();
                    let rhs = self.parse_factor()?;
                    if !rhs.is_constant() {
                        return Err(ParseError::new(line, col, "nonlinear term: division by a variable"));
                    }
                    if rhs.constant.is_zero() {
                        return Err(ParseError::new(line, col, "division by zero"));
                    }
                    acc = acc.scale(&(BigRational::from_integer(BigInt::from(1)) / rhs.constant));
                }
                // implicit multiplication: `3b`, `2(a+b)`, `b 2`
                Some(Tok::Int(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    let rhs = self.parse_factor()?;
                    acc = multiply(acc, rhs, line, col)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_expr(&mut self) -> Result<LinForm, ParseError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Plus) => {
                    self.next();
                    let rhs = self.parse_term()?;
                    acc = acc.add(rhs);
                }
                Some(Tok::Minus) => {
                    self.next();
                    let rhs = self.parse_term()?;
                    acc = acc.add(rhs.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_statement(&mut self) -> Result<(), ParseError> {
        // maximize directive
        if let Some(Token { tok: Tok::Ident(name), line, col }) = self.peek().cloned() {
            if name == "maximize" {
                self.next();
                let (l, c) = self.here();
                let var = match self.next().map(|t| t.tok) {
                    Some(Tok::Ident(v)) => v,
                    _ => return Err(ParseError::new(l, c, "expected a variable name after 'maximize'")),
                };
                if self.objective.is_some() {
                    return Err(ParseError::new(line, col, "duplicate 'maximize' directive"));
                }
                self.objective = Some((var, line, col));
                return self.expect_end_of_statement();
            }
        }

        // constraint chain
        let (line, col) = self.here();
        let mut exprs = vec![self.parse_expr()?];
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Le)) {
            self.next();
            exprs.push(self.parse_expr()?);
        }
        if exprs.len() < 2 {
            return Err(ParseError::new(line, col, "expected '<=' in constraint"));
        }
        for pair in exprs.windows(2) {
            // L <= R becomes (L − R).coeffs · x <= −(L − R).constant
            let diff = pair[0].clone().add(pair[1].clone().neg());
            self.constraints.push((diff.coeffs, -diff.constant));
        }
        self.expect_end_of_statement()
    }

    fn expect_end_of_statement(&mut self) -> Result<(), ParseError> {
        let (line, col) = self.here();
        match self.next().map(|t| t.tok) {
            Some(Tok::Newline) | None => Ok(()),
            other => Err(ParseError::new(
                line,
                col,
                format!("unexpected trailing input {other:?}"),
            )),
        }
    }
}

fn multiply(lhs: LinForm, rhs: LinForm, line: usize, col: usize) -> Result<LinForm, ParseError> {
    if lhs.is_constant() {
        Ok(rhs.scale(&lhs.constant))
    } else if rhs.is_constant() {
        Ok(lhs.scale(&rhs.constant))
    } else {
        Err(ParseError::new(line, col, "nonlinear term: product of two variables"))
    }
}

/// Parses a constraint program. Variables are collected in order of first
/// appearance inside constraints; the `maximize` variable must appear in
/// at least one constraint.
pub fn parse_program(text: &str) -> Result<ExponentProgram, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        variables: Vec::new(),
        var_index: HashMap::new(),
        constraints: Vec::new(),
        objective: None,
    };
    while parser.pos < parser.tokens.len() {
        if matches!(parser.peek().map(|t| &t.tok), Some(Tok::Newline)) {
            parser.next();
            continue;
        }
        parser.parse_statement()?;
    }
    let (name, line, col) = parser.objective.clone().ok_or_else(|| {
        let (l, c) = parser
            .tokens
            .last()
            .map(|t| (t.line, t.col))
            .unwrap_or((1, 1));
        ParseError::new(l, c, "missing 'maximize' directive")
    })?;
    let objective = *parser.var_index.get(&name).ok_or_else(|| {
        ParseError::new(
            line,
            col,
            format!("unknown variable '{name}': it appears in no constraint"),
        )
    })?;
    if parser.constraints.is_empty() {
        return Err(ParseError::new(line, col, "program has no constraints"));
    }

    let nvars = parser.variables.len();
    let mut program = ExponentProgram::new(parser.variables.clone(), objective);
    for (coeffs, rhs) in parser.constraints {
        let mut dense = vec![BigRational::zero(); nvars];
        for (i, c) in coeffs {
            dense[i] = c;
        }
        program.constraints.push(Constraint { coeffs: dense, rhs });
    }
    Ok(program)
}
