//! Closed-form warping factors: parsing, evaluation and symbolic derivatives.
//!
//! Grammar: numbers, the variable `t`, the constants `pi` and `e`, binary
//! `+ - * /` (also `×`, `÷`), `^`, unary minus, `exp(x)`, `log(x)` and `pow(a, b)`.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    T,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Ln(Box<Expr>),
}

use Expr::*;

fn num(e: &Expr) -> Option<f64> {
    if let Num(v) = e {
        Some(*v)
    } else {
        None
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x * y),
        (Some(x), _) if x == 0.0 => Num(0.0),
        (_, Some(y)) if y == 0.0 => Num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x / y),
        (Some(x), _) if x == 0.0 => Num(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Div(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Num(x) => Num(-x),
        Neg(inner) => *inner,
        other => Neg(Box::new(other)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => Num(x.powf(y)),
        (_, Some(y)) if y == 1.0 => a,
        (_, Some(y)) if y == 0.0 => Num(1.0),
        _ => Pow(Box::new(a), Box::new(b)),
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser { chars: src.chars().collect(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!("unexpected input at position {} in {src:?}", p.pos)));
        }
        Ok(e)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Num(v) => *v,
            T => t,
            Add(a, b) => a.eval(t) + b.eval(t),
            Sub(a, b) => a.eval(t) - b.eval(t),
            Mul(a, b) => a.eval(t) * b.eval(t),
            Div(a, b) => a.eval(t) / b.eval(t),
            Neg(a) => -a.eval(t),
            Pow(a, b) => {
                let base = a.eval(t);
                match num(b) {
                    Some(k) if k.fract() == 0.0 && k.abs() < 64.0 => base.powi(k as i32),
                    _ => base.powf(b.eval(t)),
                }
            }
            Exp(a) => a.eval(t).exp(),
            Ln(a) => a.eval(t).ln(),
        }
    }

    /// Symbolic derivative with respect to `t`.
    pub fn derivative(&self) -> Expr {
        match self {
            Num(_) => Num(0.0),
            T => Num(1.0),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
            Div(a, b) => div(
                sub(mul(a.derivative(), (**b).clone()), mul((**a).clone(), b.derivative())),
                pow((**b).clone(), Num(2.0)),
            ),
            Neg(a) => neg(a.derivative()),
            Pow(a, b) => match num(b) {
                Some(k) => mul(mul(Num(k), pow((**a).clone(), Num(k - 1.0))), a.derivative()),
                None => mul(
                    self.clone(),
                    add(
                        mul(b.derivative(), Ln(a.clone())),
                        div(mul((**b).clone(), a.derivative()), (**a).clone()),
                    ),
                ),
            },
            Exp(a) => mul(self.clone(), a.derivative()),
            Ln(a) => div(a.derivative(), (**a).clone()),
        }
    }

    /// True when the expression is invariant under t -> -t (checked on sample points).
    pub fn looks_even(&self) -> bool {
        [0.1, 0.37, 0.9, 1.7, 2.9].iter().all(|&t| {
            let (a, b) = (self.eval(t), self.eval(-t));
            (a - b).abs() <= 1e-12 * (1.0 + a.abs())
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num(v) => write!(f, "{v}"),
            T => write!(f, "t"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Neg(a) => write!(f, "(-{a})"),
            Pow(a, b) => write!(f, "pow({a}, {b})"),
            Exp(a) => write!(f, "exp({a})"),
            Ln(a) => write!(f, "log({a})"),
        }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{c}' at position {}", self.pos)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    lhs = Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some('-') | Some('−') => {
                    self.pos += 1;
                    lhs = Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some('*') | Some('×') => {
                    self.pos += 1;
                    lhs = Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some('/') | Some('÷') => {
                    self.pos += 1;
                    lhs = Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('-') | Some('−') => {
                self.pos += 1;
                Ok(Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match name.as_str() {
                    "t" => Ok(T),
                    "pi" => Ok(Num(std::f64::consts::PI)),
                    "e" => Ok(Num(std::f64::consts::E)),
                    "exp" | "log" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(')')?;
                        Ok(if name == "exp" { Exp(Box::new(a)) } else { Ln(Box::new(a)) })
                    }
                    "pow" => {
                        self.expect('(')?;
                        let a = self.expr()?;
                        self.expect(',')?;
                        let b = self.expr()?;
                        self.expect(')')?;
                        Ok(Pow(Box::new(a), Box::new(b)))
                    }
                    other => Err(Error::Parse(format!("unknown identifier {other:?}"))),
                }
            }
            other => Err(Error::Parse(format!("unexpected {other:?} at position {}", self.pos))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let c = &self.chars;
        let mut i = self.pos;
        while i < c.len() && (c[i].is_ascii_digit() || c[i] == '.') {
            i += 1;
        }
        if i < c.len() && (c[i] == 'e' || c[i] == 'E') {
            let mut j = i + 1;
            if j < c.len() && (c[j] == '+' || c[j] == '-') {
                j += 1;
            }
            if j < c.len() && c[j].is_ascii_digit() {
                while j < c.len() && c[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        let s: String = self.chars[start..i].iter().collect();
        s.parse::<f64>().map(Num).map_err(|_| Error::Parse(format!("bad number {s:?}")))
    }
}
