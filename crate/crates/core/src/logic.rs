//! Propositional statements and their translation into GF(2) polynomials.
//!
//! Statement files hold one statement per line. Blank lines and lines
//! starting with `#` are ignored. A statement is either
//!
//! ```text
//! <formula> [is TRUE | is FALSE]      (default polarity: TRUE)
//! <poly> = 0                          (raw polynomial equation)
//! ```
//!
//! Formula grammar, loosest binding first (`IMPLIES` is right-associative):
//!
//! ```text
//! implies := or ( "IMPLIES" implies )?
//! or      := xor ( "OR" xor )*
//! xor     := and ( "XOR" and )*
//! and     := not ( "AND" not )*
//! not     := "NOT" not | atom
//! atom    := xN | 0 | 1 | "(" implies ")"
//! ```
//!
//! Raw polynomials use `+` and `*` over the same atoms, e.g.
//! `x1*x2 + (1 + x3)*x1 + 1 = 0`. Keywords are case-insensitive.
//!
//! A member `p` of the resulting set stands for the equation `p = 0`, so a
//! formula asserted TRUE contributes `poly(f) + 1` and one asserted FALSE
//! contributes `poly(f)`.

use thiserror::Error;

use crate::poly::{Poly, PolySet, MAX_VARS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("variable x{var} at line {line}, column {column} is out of range 1..={max}")]
    VariableOutOfRange {
        var: usize,
        line: usize,
        column: usize,
        max: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Var(usize),
    Const(bool),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn var(i: usize) -> Self {
        Formula::Var(i)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Formula, b: Formula) -> Self {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Boolean value under an assignment (`assignment[i - 1]` is `x_i`).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        match self {
            Formula::Var(i) => assignment[i - 1],
            Formula::Const(b) => *b,
            Formula::Not(a) => !a.eval(assignment),
            Formula::And(a, b) => a.eval(assignment) && b.eval(assignment),
            Formula::Or(a, b) => a.eval(assignment) || b.eval(assignment),
            Formula::Xor(a, b) => a.eval(assignment) ^ b.eval(assignment),
            Formula::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
        }
    }

    pub fn max_var(&self) -> usize {
        match self {
            Formula::Var(i) => *i,
            Formula::Const(_) => 0,
            Formula::Not(a) => a.max_var(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Xor(a, b) | Formula::Implies(a, b) => {
                a.max_var().max(b.max_var())
            }
        }
    }
}

/// Truth-value polynomial of a formula: it evaluates to 1 exactly where the
/// formula holds.
pub fn formula_to_poly(f: &Formula) -> Poly {
    let one = Poly::one();
    match f {
        Formula::Var(i) => Poly::var(*i),
        Formula::Const(true) => one,
        Formula::Const(false) => Poly::zero(),
        Formula::Not(a) => &formula_to_poly(a) + &one,
        Formula::And(a, b) => &formula_to_poly(a) * &formula_to_poly(b),
        Formula::Or(a, b) => {
            let (a, b) = (formula_to_poly(a), formula_to_poly(b));
            &(&a + &b) + &(&a * &b)
        }
        Formula::Xor(a, b) => &formula_to_poly(a) + &formula_to_poly(b),
        Formula::Implies(a, b) => {
            // material implication: a(1 + b) + 1
            let (a, b) = (formula_to_poly(a), formula_to_poly(b));
            &(&a * &(&b + &one)) + &one
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    True,
    False,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Assertion { formula: Formula, polarity: Polarity },
    Equation(Poly),
}

impl Statement {
    /// The polynomial whose zeros are the models of the statement.
    pub fn to_poly(&self) -> Poly {
        match self {
            Statement::Assertion { formula, polarity } => {
                let p = formula_to_poly(formula);
                match polarity {
                    Polarity::True => &p + &Poly::one(),
                    Polarity::False => p,
                }
            }
            Statement::Equation(p) => p.clone(),
        }
    }
}

/// Parses a statement file. With `num_vars = None` the universe is the
/// largest variable index mentioned.
pub fn parse_statements(text: &str, num_vars: Option<usize>) -> Result<PolySet, ParseError> {
    let limit = num_vars.unwrap_or(MAX_VARS);
    let mut polys = Vec::new();
    let mut max_var = 0;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let stmt = parse_line(line, idx + 1, limit)?;
        let p = stmt.to_poly();
        max_var = max_var.max(p.max_var());
        polys.push(p);
    }
    Ok(PolySet::from_polys(num_vars.unwrap_or(max_var), polys))
}

/// Parses a single statement line.
pub fn parse_statement(line: &str, num_vars: Option<usize>) -> Result<Statement, ParseError> {
    parse_line(line, 1, num_vars.unwrap_or(MAX_VARS))
}

fn parse_line(line: &str, line_no: usize, limit: usize) -> Result<Statement, ParseError> {
    let tokens = tokenize(line, line_no, limit)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        line: line_no,
        end_column: line.chars().count() + 1,
    };
    let is_equation = p.tokens.iter().any(|t| t.kind == Tok::Equals);
    let stmt = if is_equation {
        let lhs = p.poly_sum()?;
        p.expect(Tok::Equals, "'='")?;
        let rhs = p.poly_sum()?;
        Statement::Equation(&lhs + &rhs)
    } else {
        let formula = p.implies()?;
        let polarity = if p.eat(&Tok::Is) {
            match p.next() {
                Some(Token { kind: Tok::True, .. }) => Polarity::True,
                Some(Token { kind: Tok::False, .. }) => Polarity::False,
                other => return Err(p.error_at(other, "expected TRUE or FALSE after 'is'")),
            }
        } else {
            Polarity::True
        };
        Statement::Assertion { formula, polarity }
    };
    if let Some(t) = p.peek().cloned() {
        return Err(p.error_at(Some(t), "unexpected trailing input"));
    }
    Ok(stmt)
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(usize),
    Const(bool),
    Not,
    And,
    Or,
    Xor,
    Implies,
    Is,
    True,
    False,
    Plus,
    Star,
    Equals,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    column: usize,
    text: String,
}

fn tokenize(line: &str, line_no: usize, limit: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            '=' => Some(Tok::Equals),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            tokens.push(Token {
                kind,
                column,
                text: c.to_string(),
            });
            i += 1;
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let kind = classify_word(&word, line_no, column, limit)?;
            tokens.push(Token { kind, column, text: word });
            continue;
        }
        return Err(ParseError::Syntax {
            line: line_no,
            column,
            message: format!("unexpected character '{c}'"),
        });
    }
    Ok(tokens)
}

fn classify_word(word: &str, line: usize, column: usize, limit: usize) -> Result<Tok, ParseError> {
    let upper = word.to_ascii_uppercase();
    let kind = match upper.as_str() {
        "NOT" => Tok::Not,
        "AND" => Tok::And,
        "OR" => Tok::Or,
        "XOR" => Tok::Xor,
        "IMPLIES" => Tok::Implies,
        "IS" => Tok::Is,
        "TRUE" => Tok::True,
        "FALSE" => Tok::False,
        "0" => Tok::Const(false),
        "1" => Tok::Const(true),
        _ => {
            let digits = upper.strip_prefix('X').filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
            let Some(digits) = digits else {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    message: format!("unknown word '{word}'"),
                });
            };
            let var: usize = digits.parse().unwrap_or(usize::MAX);
            if var == 0 || var > limit {
                return Err(ParseError::VariableOutOfRange {
                    var,
                    line,
                    column,
                    max: limit,
                });
            }
            Tok::Var(var)
        }
    };
    Ok(kind)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    line: usize,
    end_column: usize,
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

    fn eat(&mut self, kind: &Tok) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&kind) {
            Ok(())
        } else {
            let t = self.peek().cloned();
            Err(self.error_at(t, &format!("expected {what}")))
        }
    }

    fn error_at(&self, tok: Option<Token>, message: &str) -> ParseError {
        match tok {
            Some(t) => ParseError::Syntax {
                line: self.line,
                column: t.column,
                message: format!("{message}, found '{}'", t.text),
            },
            None => ParseError::Syntax {
                line: self.line,
                column: self.end_column,
                message: format!("{message}, found end of line"),
            },
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.xor()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.xor()?);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Xor) {
            lhs = Formula::xor(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.not()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.not()?);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Formula, ParseError> {
        if self.eat(&Tok::Not) {
            return Ok(Formula::not(self.not()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.next() {
            Some(Token { kind: Tok::Var(i), .. }) => Ok(Formula::Var(i)),
            Some(Token { kind: Tok::Const(b), .. }) => Ok(Formula::Const(b)),
            Some(Token { kind: Tok::LParen, .. }) => {
                let f = self.implies()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(f)
            }
            other => Err(self.error_at(other, "expected a variable, constant or '('")),
        }
    }

    fn poly_sum(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.poly_product()?;
        while self.eat(&Tok::Plus) {
            acc = &acc + &self.poly_product()?;
        }
        Ok(acc)
    }

    fn poly_product(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.poly_atom()?;
        while self.eat(&Tok::Star) {
            acc = &acc * &self.poly_atom()?;
        }
        Ok(acc)
    }

    fn poly_atom(&mut self) -> Result<Poly, ParseError> {
        match self.next() {
            Some(Token { kind: Tok::Var(i), .. }) => Ok(Poly::var(i)),
            Some(Token { kind: Tok::Const(b), .. }) => Ok(if b { Poly::one() } else { Poly::zero() }),
            Some(Token { kind: Tok::LParen, .. }) => {
                let p = self.poly_sum()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(p)
            }
            other => Err(self.error_at(other, "expected a variable, constant or '('")),
        }
    }
}
