//! Scalar expressions over chart coordinates.
//!
//! Grammar, lowest to highest precedence:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          right associative
//! atom   := number | coord | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! so `-u^2` is `-(u^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use thiserror::Error;

use crate::jet::Jet2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    fn eval(self, x: f64) -> Result<f64, DomainError> {
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Log => {
                if x <= 0.0 {
                    return Err(DomainError::new(format!("log of non-positive value {x}")));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(DomainError::new(format!("sqrt of negative value {x}")));
                }
                x.sqrt()
            }
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
        })
    }

    /// First and second derivative at `x`, given `f = self(x)`.
    fn derivatives(self, x: f64, f: f64) -> Result<(f64, f64), DomainError> {
        Ok(match self {
            Func::Sin => (x.cos(), -f),
            Func::Cos => (-x.sin(), -f),
            Func::Tan => {
                let s = 1.0 + f * f;
                (s, 2.0 * f * s)
            }
            Func::Exp => (f, f),
            Func::Log => (1.0 / x, -1.0 / (x * x)),
            Func::Sqrt => {
                if x <= 0.0 {
                    return Err(DomainError::new(format!(
                        "sqrt is not differentiable at {x}"
                    )));
                }
                (0.5 / f, -0.25 / (f * f * f))
            }
            Func::Sinh => (x.cosh(), f),
            Func::Cosh => (x.sinh(), f),
            Func::Tanh => {
                let s = 1.0 - f * f;
                (s, -2.0 * f * s)
            }
        })
    }
}

/// Parsed scalar expression. Coordinates are referenced by index into the
/// chart's coordinate list.
#[derive(Clone, Debug, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Coord(usize),
    Neg(Box<ExprAst>),
    Binary(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Func, Box<ExprAst>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {message} (expected {expected})")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
    pub expected: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("domain error: {message}")]
pub struct DomainError {
    pub message: String,
}

impl DomainError {
    pub fn new(message: impl Into<String>) -> Self {
        DomainError {
            message: message.into(),
        }
    }
}

// Exponents within this distance of an integer are evaluated by repeated
// multiplication.
const INTEGER_EXPONENT_TOL: f64 = 1e-12;
const MAX_REPEATED_EXPONENT: f64 = 64.0;

fn integer_exponent(b: f64) -> Option<i32> {
    let r = b.round();
    if (b - r).abs() <= INTEGER_EXPONENT_TOL && r.abs() <= MAX_REPEATED_EXPONENT {
        Some(r as i32)
    } else {
        None
    }
}

fn pow_value(a: f64, b: f64) -> Result<f64, DomainError> {
    if let Some(k) = integer_exponent(b) {
        let mut acc = 1.0;
        for _ in 0..k.unsigned_abs() {
            acc *= a;
        }
        if k < 0 {
            if acc == 0.0 {
                return Err(DomainError::new("division by zero in negative power"));
            }
            acc = 1.0 / acc;
        }
        return Ok(acc);
    }
    if a > 0.0 {
        Ok(a.powf(b))
    } else if a == 0.0 && b > 0.0 {
        Ok(0.0)
    } else {
        Err(DomainError::new(format!(
            "non-integer power {b} of non-positive base {a}"
        )))
    }
}

#[allow(clippy::should_implement_trait)]
impl ExprAst {
    pub fn num(v: f64) -> Self {
        ExprAst::Num(v)
    }

    pub fn coord(i: usize) -> Self {
        ExprAst::Coord(i)
    }

    pub fn binary(op: BinOp, a: ExprAst, b: ExprAst) -> Self {
        ExprAst::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn add(a: ExprAst, b: ExprAst) -> Self {
        Self::binary(BinOp::Add, a, b)
    }

    pub fn sub(a: ExprAst, b: ExprAst) -> Self {
        Self::binary(BinOp::Sub, a, b)
    }

    pub fn mul(a: ExprAst, b: ExprAst) -> Self {
        Self::binary(BinOp::Mul, a, b)
    }

    pub fn div(a: ExprAst, b: ExprAst) -> Self {
        Self::binary(BinOp::Div, a, b)
    }

    pub fn pow(a: ExprAst, b: ExprAst) -> Self {
        Self::binary(BinOp::Pow, a, b)
    }

    pub fn neg(a: ExprAst) -> Self {
        ExprAst::Neg(Box::new(a))
    }

    pub fn call(f: Func, a: ExprAst) -> Self {
        ExprAst::Call(f, Box::new(a))
    }

    pub fn is_zero_literal(&self) -> bool {
        matches!(self, ExprAst::Num(v) if *v == 0.0)
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            ExprAst::Num(_) => None,
            ExprAst::Coord(i) => Some(*i),
            ExprAst::Neg(a) | ExprAst::Call(_, a) => a.max_coord(),
            ExprAst::Binary(_, a, b) => match (a.max_coord(), b.max_coord()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            ExprAst::Num(_) | ExprAst::Coord(_) => 1,
            ExprAst::Neg(a) | ExprAst::Call(_, a) => 1 + a.node_count(),
            ExprAst::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    pub fn eval_value(&self, p: &[f64]) -> Result<f64, DomainError> {
        match self {
            ExprAst::Num(v) => Ok(*v),
            ExprAst::Coord(i) => p
                .get(*i)
                .copied()
                .ok_or_else(|| DomainError::new(format!("coordinate {i} missing from point"))),
            ExprAst::Neg(a) => Ok(-a.eval_value(p)?),
            ExprAst::Call(f, a) => f.eval(a.eval_value(p)?),
            ExprAst::Binary(op, a, b) => {
                let x = a.eval_value(p)?;
                let y = b.eval_value(p)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y == 0.0 {
                            Err(DomainError::new("division by zero"))
                        } else {
                            Ok(x / y)
                        }
                    }
                    BinOp::Pow => pow_value(x, y),
                }
            }
        }
    }

    /// Value, gradient and Hessian at `p`. The value agrees bit-for-bit with
    /// [`ExprAst::eval_value`].
    pub fn eval_jet2(&self, p: &[f64]) -> Result<Jet2, DomainError> {
        let n = p.len();
        match self {
            ExprAst::Num(v) => Ok(Jet2::constant(n, *v)),
            ExprAst::Coord(i) => {
                if *i >= n {
                    return Err(DomainError::new(format!("coordinate {i} missing from point")));
                }
                Ok(Jet2::variable(n, *i, p[*i]))
            }
            ExprAst::Neg(a) => Ok(-a.eval_jet2(p)?),
            ExprAst::Call(f, a) => {
                let x = a.eval_jet2(p)?;
                let v = f.eval(x.value())?;
                let (d1, d2) = f.derivatives(x.value(), v)?;
                Ok(x.chain(v, d1, d2))
            }
            ExprAst::Binary(op, a, b) => {
                let x = a.eval_jet2(p)?;
                let y = b.eval_jet2(p)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y.value() == 0.0 {
                            Err(DomainError::new("division by zero"))
                        } else {
                            Ok(x.div(&y))
                        }
                    }
                    BinOp::Pow => pow_jet(&x, &y),
                }
            }
        }
    }

    /// Fully parenthesized text that parses back to the same tree.
    pub fn to_text(&self, coords: &[impl AsRef<str>]) -> String {
        let mut s = String::new();
        self.write_text(coords, &mut s);
        s
    }

    fn write_text(&self, coords: &[impl AsRef<str>], out: &mut String) {
        match self {
            ExprAst::Num(v) => {
                if *v < 0.0 {
                    out.push_str(&format!("(0 - {})", -v));
                } else {
                    out.push_str(&format!("{v}"));
                }
            }
            ExprAst::Coord(i) => out.push_str(coords[*i].as_ref()),
            // outer parentheses: unary minus binds looser than `^`
            ExprAst::Neg(a) => {
                out.push_str("(-(");
                a.write_text(coords, out);
                out.push_str("))");
            }
            ExprAst::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write_text(coords, out);
                out.push(')');
            }
            ExprAst::Binary(op, a, b) => {
                out.push('(');
                a.write_text(coords, out);
                out.push(' ');
                out.push_str(op.symbol());
                out.push(' ');
                b.write_text(coords, out);
                out.push(')');
            }
        }
    }
}

fn pow_jet(a: &Jet2, b: &Jet2) -> Result<Jet2, DomainError> {
    let n = a.dim().max(b.dim());
    if let Some(k) = integer_exponent(b.value()) {
        if b.is_constant() {
            let mut acc = Jet2::constant(n, 1.0);
            for _ in 0..k.unsigned_abs() {
                acc = acc * *a;
            }
            if k < 0 {
                if acc.value() == 0.0 {
                    return Err(DomainError::new("division by zero in negative power"));
                }
                acc = Jet2::constant(n, 1.0).div(&acc);
            }
            return Ok(acc);
        }
    }
    if a.value() <= 0.0 {
        return Err(DomainError::new(format!(
            "power with varying or non-integer exponent of non-positive base {}",
            a.value()
        )));
    }
    // a^b = exp(b ln a); value taken from the scalar path
    let ln_a = a.chain(a.value().ln(), 1.0 / a.value(), -1.0 / (a.value() * a.value()));
    let h = *b * ln_a;
    let f = pow_value(a.value(), b.value())?;
    Ok(h.chain(f, f, f))
}

impl fmt::Display for ExprAst {
    /// Debug-oriented rendering with coordinates shown as `x0, x1, ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.max_coord().map_or(0, |m| m + 1);
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        f.write_str(&self.to_text(&names))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>, ParseError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        while let Some(t) = lx.next()? {
            out.push(t);
        }
        Ok(out)
    }

    fn peek_byte(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next(&mut self) -> Result<Option<(usize, Tok)>, ParseError> {
        while matches!(self.peek_byte(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek_byte() else {
            return Ok(None);
        };
        let tok = match c {
            b'0'..=b'9' => self.number(start)?,
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while matches!(self.peek_byte(), Some(c) if c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character '{ch}'"),
                    expected: "number, identifier, operator or parenthesis".into(),
                });
            }
        };
        Ok(Some((start, tok)))
    }

    fn digits(&mut self) -> usize {
        let s = self.pos;
        while matches!(self.peek_byte(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        self.pos - s
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        self.digits();
        if self.peek_byte() == Some(b'.') {
            self.pos += 1;
            self.digits();
        }
        if matches!(self.peek_byte(), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek_byte(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                // not an exponent; leave `e` for the identifier rule
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text.parse().map_err(|_| ParseError {
            offset: start,
            message: format!("malformed number '{text}'"),
            expected: "decimal number".into(),
        })?;
        if !v.is_finite() {
            return Err(ParseError {
                offset: start,
                message: format!("number '{text}' is out of range"),
                expected: "finite decimal number".into(),
            });
        }
        Ok(Tok::Num(v))
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(o, _)| *o)
    }

    fn err(&self, message: impl Into<String>, expected: &str) -> ParseError {
        ParseError {
            offset: self.offset(),
            message: message.into(),
            expected: expected.into(),
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.idx += 1;
            let rhs = self.term()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.idx += 1;
            let rhs = self.unary()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.idx += 1;
            return Ok(ExprAst::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.idx += 1;
            let exp = self.unary()?;
            return Ok(ExprAst::pow(base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        const EXPECTED: &str = "number, coordinate, function call or '('";
        let Some(tok) = self.peek().cloned() else {
            return Err(self.err("unexpected end of input", EXPECTED));
        };
        match tok {
            Tok::Num(v) => {
                self.idx += 1;
                Ok(ExprAst::Num(v))
            }
            Tok::LParen => {
                let open = self.offset();
                self.idx += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.idx += 1;
                        Ok(e)
                    }
                    _ => Err(self.err(format!("unbalanced '(' opened at offset {open}"), "')'")),
                }
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.idx += 1;
                if let Some(Tok::LParen) = self.peek() {
                    let Some(f) = Func::from_name(&name) else {
                        return Err(ParseError {
                            offset: at,
                            message: format!("unknown function '{name}'"),
                            expected: "one of sin, cos, tan, exp, log, sqrt, sinh, cosh, tanh"
                                .into(),
                        });
                    };
                    self.idx += 1;
                    let arg = self.expr()?;
                    match self.peek() {
                        Some(Tok::RParen) => {
                            self.idx += 1;
                            Ok(ExprAst::call(f, arg))
                        }
                        _ => Err(self.err(
                            format!("function '{name}' takes exactly one argument"),
                            "')'",
                        )),
                    }
                } else if let Some(i) = self.coords.iter().position(|c| *c == name) {
                    Ok(ExprAst::Coord(i))
                } else {
                    Err(ParseError {
                        offset: at,
                        message: format!("unknown identifier '{name}'"),
                        expected: format!("one of the coordinates {}", self.coords.join(", ")),
                    })
                }
            }
            Tok::RParen => Err(self.err("unexpected ')'", EXPECTED)),
            Tok::Op(c) => Err(self.err(format!("unexpected operator '{c}'"), EXPECTED)),
        }
    }
}

/// Parses `input` as an expression over the named coordinates.
pub fn parse(input: &str, coords: &[String]) -> Result<ExprAst, ParseError> {
    let toks = Lexer::tokens(input)?;
    if toks.is_empty() {
        return Err(ParseError {
            offset: 0,
            message: "empty expression".into(),
            expected: "an expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: input.len(),
        coords,
    };
    let e = p.expr()?;
    if p.idx < p.toks.len() {
        let msg = match p.peek() {
            Some(Tok::RParen) => "unbalanced ')'".to_string(),
            _ => "trailing input after expression".to_string(),
        };
        return Err(p.err(msg, "operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_sum_of_power() {
        let e = parse("u^2 + 3", &names(&["u", "v"])).unwrap();
        assert_eq!(
            e,
            ExprAst::add(ExprAst::pow(ExprAst::Coord(0), ExprAst::Num(2.0)), ExprAst::Num(3.0))
        );
        assert_eq!(e.eval_value(&[2.0, 0.0]).unwrap(), 7.0);
    }

    #[test]
    fn incomplete_binary_op() {
        let err = parse("2*", &names(&["u"])).unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn pow_binds_tighter_than_negation() {
        let e = parse("-u^2", &names(&["u"])).unwrap();
        assert_eq!(e.eval_value(&[3.0]).unwrap(), -9.0);
    }

    #[test]
    fn pow_is_right_associative() {
        let e = parse("2^3^2", &names(&["u"])).unwrap();
        assert_eq!(e.eval_value(&[0.0]).unwrap(), 512.0);
        let e = parse("2^-1", &names(&["u"])).unwrap();
        assert_eq!(e.eval_value(&[0.0]).unwrap(), 0.5);
    }

    #[test]
    fn subtraction_is_left_associative() {
        let e = parse("8 - 4 - 2", &names(&["u"])).unwrap();
        assert_eq!(e.eval_value(&[0.0]).unwrap(), 2.0);
        let e = parse("8 / 4 / 2", &names(&["u"])).unwrap();
        assert_eq!(e.eval_value(&[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn numbers_with_fraction_and_exponent() {
        let e = parse("1.5e2 + 2.5E-1 + 3.", &names(&["u"])).unwrap();
        assert_eq!(e.eval_value(&[0.0]).unwrap(), 153.25);
    }

    #[test]
    fn simple_evaluations() {
        let c = names(&["u", "v"]);
        assert_eq!(parse("sin(u)*v", &c).unwrap().eval_value(&[0.0, 5.0]).unwrap(), 0.0);
        assert!(parse("1/u", &c).unwrap().eval_value(&[0.0, 1.0]).is_err());
        assert!(parse("log(u)", &c).unwrap().eval_value(&[-1.0, 1.0]).is_err());
        assert!(parse("sqrt(u)", &c).unwrap().eval_value(&[-1.0, 1.0]).is_err());
        assert!(parse("u^0.5", &c).unwrap().eval_value(&[-1.0, 1.0]).is_err());
        assert_eq!(parse("u^3", &c).unwrap().eval_value(&[-2.0, 1.0]).unwrap(), -8.0);
    }

    #[test]
    fn parse_errors() {
        let c = names(&["u", "v"]);
        let e = parse("u + w", &c).unwrap_err();
        assert_eq!(e.offset, 4);
        assert!(e.message.contains("'w'"));
        assert!(parse("(u + 1", &c).is_err());
        assert!(parse("u + 1)", &c).is_err());
        assert!(parse("u v", &c).is_err());
        assert_eq!(parse("", &c).unwrap_err().offset, 0);
        assert_eq!(parse("   ", &c).unwrap_err().offset, 0);
        assert!(parse("foo(u)", &c).is_err());
        assert!(parse("sin(u, v)", &c).is_err());
        assert!(parse("u $ v", &c).is_err());
        assert!(parse("1e999", &c).is_err());
    }

    #[test]
    fn error_offsets_stay_in_input() {
        let c = names(&["u"]);
        for s in ["", "(", "u+", "u*(", "sin(", ")", "u)", "2**3", "u^"] {
            let e = parse(s, &c).unwrap_err();
            assert!(e.offset <= s.len(), "{s:?} -> {e:?}");
        }
    }

    #[test]
    fn jet_of_cube() {
        let e = parse("u^3", &names(&["u"])).unwrap();
        let j = e.eval_jet2(&[2.0]).unwrap();
        assert_eq!(j.value(), 8.0);
        assert_eq!(j.grad(), &[12.0]);
        assert_eq!(j.hess(0, 0), 12.0);
    }

    #[test]
    fn jet_of_constant_and_product() {
        let c = names(&["u", "v"]);
        let j = parse("5", &c).unwrap().eval_jet2(&[0.3, -1.0]).unwrap();
        assert_eq!(j.value(), 5.0);
        assert_eq!(j.grad(), &[0.0, 0.0]);
        assert_eq!(j.hessian(), vec![vec![0.0; 2]; 2]);
        let j = parse("u*v", &c).unwrap().eval_jet2(&[2.0, 3.0]).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.grad(), &[3.0, 2.0]);
        assert_eq!(j.hessian(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn jet_functions_match_closed_forms() {
        let c = names(&["t"]);
        let t = 0.7_f64;
        let cases: [(&str, f64, f64, f64); 9] = [
            ("sin(t)", t.sin(), t.cos(), -t.sin()),
            ("cos(t)", t.cos(), -t.sin(), -t.cos()),
            ("tan(t)", t.tan(), 1.0 / t.cos().powi(2), 2.0 * t.tan() / t.cos().powi(2)),
            ("exp(t)", t.exp(), t.exp(), t.exp()),
            ("log(t)", t.ln(), 1.0 / t, -1.0 / (t * t)),
            ("sqrt(t)", t.sqrt(), 0.5 / t.sqrt(), -0.25 / t.powf(1.5)),
            ("sinh(t)", t.sinh(), t.cosh(), t.sinh()),
            ("cosh(t)", t.cosh(), t.sinh(), t.cosh()),
            ("tanh(t)", t.tanh(), 1.0 / t.cosh().powi(2), -2.0 * t.tanh() / t.cosh().powi(2)),
        ];
        for (src, v, d1, d2) in cases {
            let j = parse(src, &c).unwrap().eval_jet2(&[t]).unwrap();
            assert!((j.value() - v).abs() < 1e-14, "{src}");
            assert!((j.d(0) - d1).abs() < 1e-13, "{src}");
            assert!((j.hess(0, 0) - d2).abs() < 1e-12, "{src}");
        }
    }

    #[test]
    fn real_exponent_power_jet() {
        // u^v at (2, 0.5)
        let c = names(&["u", "v"]);
        let j = parse("u^v", &c).unwrap().eval_jet2(&[2.0, 0.5]).unwrap();
        let f = 2f64.sqrt();
        assert_eq!(j.value(), f);
        assert!((j.d(0) - 0.5 * f / 2.0).abs() < 1e-14);
        assert!((j.d(1) - f * 2f64.ln()).abs() < 1e-14);
        // non-constant integer-valued exponent on a negative base is not differentiable
        assert!(parse("u^v", &c).unwrap().eval_jet2(&[-2.0, 2.0]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = names(&["u", "v"]);
        for s in ["-u^2", "u^2 + 3", "sin(u)*v/(1 + u^2) - exp(-v)", "2^3^2", "1e-7*u"] {
            let e = parse(s, &c).unwrap();
            assert_eq!(parse(&e.to_text(&c), &c).unwrap(), e);
        }
    }
}
