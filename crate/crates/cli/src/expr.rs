//! Expression language for polynomials over K and matrix literals.
//!
//! ```text
//! expr    = term , { ( "+" | "-" ) , term } ;
//! term    = unary , { ( "*" | "/" ) , unary } ;
//! unary   = "-" , unary | power ;
//! power   = atom , [ "^" , integer ] ;
//! atom    = integer | "x" | "q" | "(" , expr , ")" | matrix ;
//! matrix  = "[" , row , { "," , row } , "]" ;
//! row     = "[" , expr , { "," , expr } , "]" ;
//! integer = digit , { digit } ;
//! ```

use std::fmt;

use thiserror::Error;
use twistcalc_core::arith::{Field, Rational, Scalar, XPoly};
use twistcalc_core::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a non-constant expression")]
    NonConstantDivisor,
    #[error("matrix rows have different lengths")]
    RaggedMatrix,
    #[error("matrix entries must be scalars")]
    NonScalarEntry,
    #[error("cannot {op} a matrix and a polynomial")]
    MixedOperands { op: &'static str },
    #[error("matrix shapes do not match")]
    ShapeMismatch,
    #[error("expected {expected}")]
    WrongKind { expected: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    X,
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// Decimal digits without leading zeros.
    Int(String),
    Sym(Symbol),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Matrix(Vec<Vec<Expr>>),
}

/// Which symbols the parser accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symbols {
    pub x: bool,
    pub q: bool,
}

impl Symbols {
    pub const ALL: Symbols = Symbols { x: true, q: true };
}

const UNARY_PRECEDENCE: u8 = 3;
const ATOM_PRECEDENCE: u8 = 5;

impl Expr {
    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, ..) => op.precedence(),
            Expr::Neg(_) => UNARY_PRECEDENCE,
            Expr::Pow(..) => 4,
            _ => ATOM_PRECEDENCE,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Prints with the fewest parentheses that still parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(d) => f.write_str(d),
            Expr::Sym(Symbol::X) => f.write_str("x"),
            Expr::Sym(Symbol::Q) => f.write_str("q"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.write_operand(f, UNARY_PRECEDENCE)
            }
            Expr::Bin(op, l, r) => {
                let p = op.precedence();
                l.write_operand(f, p)?;
                write!(f, "{}", op.symbol())?;
                r.write_operand(f, p + 1)
            }
            Expr::Pow(base, k) => {
                base.write_operand(f, ATOM_PRECEDENCE)?;
                write!(f, "^{k}")
            }
            Expr::Matrix(rows) => {
                f.write_str("[")?;
                for (i, row) in rows.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    f.write_str("[")?;
                    for (j, e) in row.iter().enumerate() {
                        if j > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{e}")?;
                    }
                    f.write_str("]")?;
                }
                f.write_str("]")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(String),
    Ident(String),
    Punct(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(d) => write!(f, "'{d}'"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Punct(c) => write!(f, "'{c}'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        let tok = if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            let trimmed = s.trim_start_matches('0');
            Tok::Int(if trimmed.is_empty() {
                "0".into()
            } else {
                trimmed.into()
            })
        } else if c.is_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_alphanumeric()) {
                s.push(d);
                chars.next();
                column += 1;
            }
            Tok::Ident(s)
        } else if "+-*/^()[],·".contains(c) {
            chars.next();
            column += 1;
            Tok::Punct(if c == '·' { '*' } else { c })
        } else {
            return Err(SyntaxError {
                line: l,
                column: col,
                expected: "an expression".into(),
                found: format!("'{c}'"),
            });
        };
        out.push(Token {
            tok,
            line: l,
            column: col,
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    symbols: Symbols,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn error(&self, expected: &str) -> SyntaxError {
        let t = &self.tokens[self.pos];
        SyntaxError {
            line: t.line,
            column: t.column,
            expected: expected.into(),
            found: t.tok.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SyntaxError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("'{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        match self.peek().clone() {
            Tok::Int(d) => {
                let k = d
                    .parse::<u32>()
                    .map_err(|_| self.error("an exponent below 2^32"))?;
                self.pos += 1;
                Ok(Expr::Pow(Box::new(base), k))
            }
            _ => Err(self.error("a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(d) => {
                self.pos += 1;
                Ok(Expr::Int(d))
            }
            Tok::Ident(s) if s == "x" && self.symbols.x => {
                self.pos += 1;
                Ok(Expr::Sym(Symbol::X))
            }
            Tok::Ident(s) if s == "q" && self.symbols.q => {
                self.pos += 1;
                Ok(Expr::Sym(Symbol::Q))
            }
            Tok::Punct('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Punct('[') => self.matrix(),
            _ => Err(self.error(&self.atom_expectation())),
        }
    }

    fn atom_expectation(&self) -> String {
        let mut parts = vec!["an integer"];
        if self.symbols.x {
            parts.push("'x'");
        }
        if self.symbols.q {
            parts.push("'q'");
        }
        parts.push("'('");
        parts.push("'['");
        parts.join(", ")
    }

    fn matrix(&mut self) -> Result<Expr, SyntaxError> {
        self.expect('[')?;
        let mut rows = Vec::new();
        loop {
            self.expect('[')?;
            let mut row = vec![self.expr()?];
            while self.eat(',') {
                row.push(self.expr()?);
            }
            self.expect(']')?;
            rows.push(row);
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        Ok(Expr::Matrix(rows))
    }
}

pub fn parse_expr(src: &str, symbols: Symbols) -> Result<Expr, SyntaxError> {
    let mut p = Parser {
        tokens: lex(src)?,
        pos: 0,
        symbols,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

/// Result of evaluating an expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Poly(XPoly),
    Matrix(Matrix),
}

impl Value {
    pub fn into_poly(self) -> Result<XPoly, EvalError> {
        match self {
            Value::Poly(p) => Ok(p),
            Value::Matrix(_) => Err(EvalError::WrongKind {
                expected: "a polynomial",
            }),
        }
    }

    pub fn into_matrix(self) -> Result<Matrix, EvalError> {
        match self {
            Value::Matrix(m) => Ok(m),
            Value::Poly(_) => Err(EvalError::WrongKind {
                expected: "a matrix",
            }),
        }
    }
}

fn constant(p: &XPoly) -> Option<Scalar> {
    p.is_constant().then(|| p.coeff(0))
}

pub fn eval(e: &Expr) -> Result<Value, EvalError> {
    Ok(match e {
        Expr::Int(d) => {
            let r: Rational = d.parse().expect("lexer yields digits");
            Value::Poly(XPoly::constant(Scalar::from(r)))
        }
        Expr::Sym(Symbol::X) => Value::Poly(XPoly::var()),
        Expr::Sym(Symbol::Q) => Value::Poly(XPoly::constant(Scalar::q())),
        Expr::Neg(inner) => match eval(inner)? {
            Value::Poly(p) => Value::Poly(-&p),
            Value::Matrix(m) => Value::Matrix(m.neg()),
        },
        Expr::Pow(base, k) => match eval(base)? {
            Value::Poly(p) => Value::Poly(p.pow(*k)),
            Value::Matrix(m) => {
                if m.rows() != m.cols() {
                    return Err(EvalError::ShapeMismatch);
                }
                let mut acc = Matrix::identity(m.rows());
                for _ in 0..*k {
                    acc = acc.mul(&m);
                }
                Value::Matrix(acc)
            }
        },
        Expr::Matrix(rows) => {
            let width = rows[0].len();
            let mut out = Vec::with_capacity(rows.len());
            for row in rows {
                if row.len() != width {
                    return Err(EvalError::RaggedMatrix);
                }
                let mut r = Vec::with_capacity(width);
                for entry in row {
                    match eval(entry)? {
                        Value::Poly(p) => r.push(constant(&p).ok_or(EvalError::NonScalarEntry)?),
                        Value::Matrix(_) => return Err(EvalError::NonScalarEntry),
                    }
                }
                out.push(r);
            }
            Value::Matrix(Matrix::from_rows(out).map_err(|_| EvalError::RaggedMatrix)?)
        }
        Expr::Bin(op, l, r) => binary(*op, eval(l)?, eval(r)?)?,
    })
}

fn binary(op: BinOp, l: Value, r: Value) -> Result<Value, EvalError> {
    use Value::{Matrix as M, Poly as P};
    let shape = |_| EvalError::ShapeMismatch;
    Ok(match (op, l, r) {
        (BinOp::Add, P(a), P(b)) => P(&a + &b),
        (BinOp::Sub, P(a), P(b)) => P(&a - &b),
        (BinOp::Mul, P(a), P(b)) => P(&a * &b),
        (BinOp::Div, P(a), P(b)) => {
            let c = constant(&b).ok_or(EvalError::NonConstantDivisor)?;
            P(a.scale(&c.inverse().ok_or(EvalError::DivisionByZero)?))
        }
        (BinOp::Add, M(a), M(b)) => M(a.try_add(&b).map_err(shape)?),
        (BinOp::Sub, M(a), M(b)) => M(a.try_sub(&b).map_err(shape)?),
        (BinOp::Mul, M(a), M(b)) => M(a.try_mul(&b).map_err(shape)?),
        (BinOp::Mul, P(c), M(m)) | (BinOp::Mul, M(m), P(c)) => {
            M(m.scale(&constant(&c).ok_or(EvalError::MixedOperands { op: "multiply" })?))
        }
        (BinOp::Div, M(m), P(c)) => {
            let c = constant(&c).ok_or(EvalError::NonConstantDivisor)?;
            M(m.scale(&c.inverse().ok_or(EvalError::DivisionByZero)?))
        }
        (BinOp::Div, _, M(_)) => {
            return Err(EvalError::WrongKind {
                expected: "a scalar divisor",
            })
        }
        (BinOp::Add | BinOp::Sub, _, _) => return Err(EvalError::MixedOperands { op: "add" }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let e = parse_expr("-x^2+3*x/2", Symbols::ALL).unwrap();
        assert_eq!(e.to_string(), "-x^2+3*x/2");
        match &e {
            Expr::Bin(BinOp::Add, l, _) => assert!(matches!(**l, Expr::Neg(_))),
            _ => panic!("{e:?}"),
        }
        assert_eq!(
            parse_expr("(1-q)*x", Symbols::ALL).unwrap().to_string(),
            "(1-q)*x"
        );
    }

    #[test]
    fn errors_have_positions() {
        let err = parse_expr("x^^2", Symbols::ALL).unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
        let err = parse_expr("1 +\n  q", Symbols { x: true, q: false }).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert!(parse_expr("[[1,2],[3]]", Symbols::ALL).is_ok());
        assert_eq!(
            eval(&parse_expr("[[1,2],[3]]", Symbols::ALL).unwrap()),
            Err(EvalError::RaggedMatrix)
        );
    }

    #[test]
    fn evaluation() {
        let v = eval(&parse_expr("(x+1)^2 - 2*x", Symbols::ALL).unwrap()).unwrap();
        assert_eq!(v.into_poly().unwrap().to_string(), "x^2+1");
        let m = eval(&parse_expr("[[1,1],[0,1]]^3", Symbols::ALL).unwrap()).unwrap();
        assert_eq!(m.into_matrix().unwrap().to_string(), "[[1,3],[0,1]]");
        let s = eval(&parse_expr("(1-q^2)/(1-q)", Symbols::ALL).unwrap()).unwrap();
        assert_eq!(s.into_poly().unwrap().to_string(), "q+1");
        let bad = eval(&parse_expr("1/(x-x)", Symbols::ALL).unwrap());
        assert_eq!(bad, Err(EvalError::DivisionByZero));
    }
}
