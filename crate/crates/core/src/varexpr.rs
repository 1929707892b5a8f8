//! Variance-function expressions in the single variable `m`.
//!
//! Grammar (no implicit multiplication, `^` binds tighter than unary minus and
//! is right-associative):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?
//! primary := number | 'm' | func '(' expr ')' | '(' expr ')'
//! func    := exp | log | sqrt | sinh | cosh | cos | arctan
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::nef::VarianceFunction;
use crate::numerics::Interval;
use crate::{Error, Result};

/// The grammar above, for usage messages.
pub const GRAMMAR: &str = "\
expr    := term (('+' | '-') term)*
term    := unary (('*' | '/') unary)*
unary   := '-' unary | power
power   := primary ('^' unary)?
primary := number | 'm' | func '(' expr ')' | '(' expr ')'
func    := exp | log | sqrt | sinh | cosh | cos | arctan";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
    Cos,
    Arctan,
}

impl Func {
    pub const ALL: [Func; 7] = [Func::Exp, Func::Log, Func::Sqrt, Func::Sinh, Func::Cosh, Func::Cos, Func::Arctan];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Cos => "cos",
            Func::Arctan => "arctan",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: f64) -> Result<f64> {
        let fault = |what: &str| Err(crate::error::domain(format!("{what} of {x}")));
        match self {
            Func::Log if x <= 0.0 => fault("log"),
            Func::Sqrt if x < 0.0 => fault("sqrt"),
            Func::Exp => Ok(x.exp()),
            Func::Log => Ok(x.ln()),
            Func::Sqrt => Ok(x.sqrt()),
            Func::Sinh => Ok(x.sinh()),
            Func::Cosh => Ok(x.cosh()),
            Func::Cos => Ok(x.cos()),
            Func::Arctan => Ok(x.atan()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum VarExpr {
    Num(f64),
    M,
    Neg(Box<VarExpr>),
    Bin(BinOp, Box<VarExpr>, Box<VarExpr>),
    Call(Func, Box<VarExpr>),
}

impl VarExpr {
    pub fn bin(op: BinOp, a: VarExpr, b: VarExpr) -> Self {
        VarExpr::Bin(op, Box::new(a), Box::new(b))
    }

    /// Evaluate at `m`; domain faults and non-finite intermediate results are errors.
    pub fn eval(&self, m: f64) -> Result<f64> {
        let v = match self {
            VarExpr::Num(x) => *x,
            VarExpr::M => m,
            VarExpr::Neg(a) => -a.eval(m)?,
            VarExpr::Call(f, a) => f.apply(a.eval(m)?)?,
            VarExpr::Bin(op, a, b) => {
                let (x, y) = (a.eval(m)?, b.eval(m)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div if y == 0.0 => return Err(crate::error::domain(format!("division of {x} by zero"))),
                    BinOp::Div => x / y,
                    BinOp::Pow if x == 0.0 && y < 0.0 => {
                        return Err(crate::error::domain(format!("0 raised to negative power {y}")))
                    }
                    BinOp::Pow if x < 0.0 && y.fract() != 0.0 => {
                        return Err(crate::error::domain(format!("negative base {x} with fractional exponent {y}")))
                    }
                    BinOp::Pow => x.powf(y),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(crate::error::domain(format!("expression `{self}` is not finite at m = {m}")))
        }
    }

    /// `V > 0` at `points` grid points of the declared mean interval.
    pub fn check_positive(&self, mean_domain: &Interval, points: usize) -> Result<()> {
        for m in spot_grid(mean_domain, points) {
            let v = self.eval(m)?;
            if !(v > 0.0) {
                return Err(crate::error::domain(format!("V(m) = {v} is not positive at m = {m}")));
            }
        }
        Ok(())
    }

    /// Wrap as a closed-form variance function, after the positivity spot check.
    pub fn to_variance(&self, mean_domain: Interval) -> Result<VarianceFunction> {
        self.check_positive(&mean_domain, 100)?;
        let e = self.clone();
        Ok(VarianceFunction::new(mean_domain, move |m| e.eval(m).unwrap_or(f64::NAN)))
    }
}

fn spot_grid(d: &Interval, n: usize) -> Vec<f64> {
    if d.is_finite() {
        (0..n).map(|i| d.lo + d.width() * (i as f64 + 0.5) / n as f64).collect()
    } else {
        d.grid(n)
    }
}

/// Fully parenthesised form; parsing it gives back the same tree.
impl fmt::Display for VarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarExpr::Num(x) => write!(f, "{x:?}"),
            VarExpr::M => f.write_str("m"),
            VarExpr::Neg(a) => write!(f, "(-{a})"),
            VarExpr::Bin(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            VarExpr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl FromStr for VarExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

pub fn parse(text: &str) -> Result<VarExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected input", &["operator", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

const OPERAND: [&str; 5] = ["number", "m", "function", "(", "-"];

impl Parser<'_> {
    fn error(&self, message: &str, expected: &[&str]) -> Error {
        Error::Syntax {
            offset: self.pos,
            message: message.to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<VarExpr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = VarExpr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<VarExpr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = VarExpr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<VarExpr> {
        if self.eat('-') {
            return Ok(VarExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<VarExpr> {
        let base = self.primary()?;
        if self.eat('^') {
            return Ok(VarExpr::bin(BinOp::Pow, base, self.unary()?));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<VarExpr> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("unclosed parenthesis", &[")", "operator"]));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let len = self.src[start..].find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(self.src.len() - start);
                let word = &self.src[start..start + len];
                if word == "m" {
                    self.pos += 1;
                    return Ok(VarExpr::M);
                }
                let Some(func) = Func::from_name(word) else {
                    return Err(self.error(&format!("unknown identifier `{word}`"), &OPERAND));
                };
                self.pos += len;
                if !self.eat('(') {
                    return Err(self.error(&format!("`{word}` must be followed by an argument list"), &["("]));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("unclosed argument list", &[")", "operator"]));
                }
                Ok(VarExpr::Call(func, Box::new(arg)))
            }
            Some(_) => Err(self.error("expected an operand", &OPERAND)),
            None => Err(self.error("unexpected end of input", &OPERAND)),
        }
    }

    fn number(&mut self) -> Result<VarExpr> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let mut i = start;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i > s
        };
        let mut any = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            any |= digits(&mut i);
        }
        if !any {
            return Err(self.error("malformed number", &["digit"]));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) {
                i = j;
            }
        }
        let value: f64 = self.src[start..i].parse().map_err(|_| self.error("malformed number", &["digit"]))?;
        self.pos = i;
        Ok(VarExpr::Num(value))
    }
}
