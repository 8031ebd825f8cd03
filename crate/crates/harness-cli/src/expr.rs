//! Complex-valued expressions over named real variables.
//!
//! Grammar: `+ - * / ^`, parentheses, decimal literals, the constants `i` and `pi`,
//! and the functions `tanh exp sin cos sqrt abs log`. `^` is right-associative and
//! binds tighter than unary minus, so `-x^2 = -(x^2)`.

use std::fmt;

use symbol_core::c64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("expression `{src}`: {msg} (at offset {pos})")]
pub struct ExprError {
    pub src: String,
    pub pos: usize,
    pub msg: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Tanh,
    Exp,
    Sin,
    Cos,
    Sqrt,
    Abs,
    Log,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "log" => Func::Log,
            _ => return None,
        })
    }

    fn apply(self, z: c64) -> c64 {
        match self {
            Func::Tanh => z.tanh(),
            Func::Exp => z.exp(),
            Func::Sin => z.sin(),
            Func::Cos => z.cos(),
            Func::Sqrt => z.sqrt(),
            Func::Abs => c64::new(z.norm(), 0.0),
            Func::Log => z.ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Const(c64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression bound to an ordered variable list.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    src: String,
    vars: Vec<String>,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> ExprError {
        ExprError { src: self.src.to_string(), pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => self.ident(),
            Some(b) => Err(self.err(format!("unexpected character `{}`", b as char))),
        }
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        let bytes = self.bytes;
        while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                p += 1;
            }
            if p < bytes.len() && bytes[p].is_ascii_digit() {
                while p < bytes.len() && bytes[p].is_ascii_digit() {
                    p += 1;
                }
                self.pos = p;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>().map(|v| Node::Const(c64::new(v, 0.0))).map_err(|_| {
            self.pos = start;
            self.err(format!("bad number `{text}`"))
        })
    }

    fn ident(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if let Some(f) = Func::lookup(name) {
            if !self.eat(b'(') {
                return Err(self.err(format!("expected `(` after `{name}`")));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(Node::Call(f, Box::new(arg)));
        }
        if let Some(k) = self.vars.iter().position(|v| *v == name) {
            return Ok(Node::Var(k));
        }
        match name {
            "i" => Ok(Node::Const(c64::new(0.0, 1.0))),
            "pi" => Ok(Node::Const(c64::new(std::f64::consts::PI, 0.0))),
            _ => {
                self.pos = start;
                Err(self.err(format!("unknown name `{name}` (variables: {})", self.vars.join(", "))))
            }
        }
    }
}

fn eval(n: &Node, vals: &[f64]) -> c64 {
    match n {
        Node::Const(c) => *c,
        Node::Var(k) => c64::new(vals[*k], 0.0),
        Node::Neg(a) => -eval(a, vals),
        Node::Add(a, b) => eval(a, vals) + eval(b, vals),
        Node::Sub(a, b) => eval(a, vals) - eval(b, vals),
        Node::Mul(a, b) => eval(a, vals) * eval(b, vals),
        Node::Div(a, b) => eval(a, vals) / eval(b, vals),
        Node::Pow(a, b) => {
            let (base, e) = (eval(a, vals), eval(b, vals));
            // integer powers stay exact for negative real bases
            if e.im == 0.0 && e.re.fract() == 0.0 && e.re.abs() <= 64.0 {
                base.powi(e.re as i32)
            } else {
                base.powc(e)
            }
        }
        Node::Call(f, a) => f.apply(eval(a, vals)),
    }
}

impl Expr {
    /// Parse `src`; only names in `vars` (plus `i`, `pi` and the functions) are accepted.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self, ExprError> {
        let mut p = Parser { src, bytes: src.as_bytes(), pos: 0, vars };
        let root = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(Self { src: src.to_string(), vars: vars.iter().map(|s| s.to_string()).collect(), root })
    }

    /// Values in the order of the variable list given to `parse`.
    pub fn eval(&self, vals: &[f64]) -> c64 {
        debug_assert_eq!(vals.len(), self.vars.len());
        eval(&self.root, vals)
    }

    pub fn eval_real(&self, vals: &[f64]) -> f64 {
        self.eval(vals).re
    }

    pub fn source(&self) -> &str {
        &self.src
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> c64 {
        Expr::parse(s, &["x"]).unwrap().eval(&[x])
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0).re, 7.0);
        assert_eq!(ev("-x^2", 3.0).re, -9.0);
        assert_eq!(ev("2^3^2", 0.0).re, 512.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0).re, 9.0);
        assert_eq!(ev("8 / 4 / 2", 0.0).re, 1.0);
        assert_eq!(ev("x^-1", 4.0).re, 0.25);
        assert_eq!(ev("2.5e-1 * 4", 0.0).re, 1.0);
    }

    #[test]
    fn complex_values_and_functions() {
        let z = ev("x + i * x^2", 2.0);
        assert_eq!((z.re, z.im), (2.0, 4.0));
        assert_eq!(ev("i^2", 0.0), c64::new(-1.0, 0.0));
        assert!((ev("x^2 / (1 + x^2)", 0.5).re - 0.2).abs() < 1e-15);
        assert!((ev("tanh(x)", 0.3).re - 0.3f64.tanh()).abs() < 1e-15);
        assert!((ev("exp(i * pi)", 0.0) - c64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(ev("abs(3 + 4 * i)", 0.0).re, 5.0);
        assert_eq!(ev("sqrt(x)", 9.0).re, 3.0);
    }

    #[test]
    fn errors_carry_positions() {
        let e = Expr::parse("x + y", &["x"]).unwrap_err();
        assert_eq!(e.pos, 4);
        assert!(e.msg.contains("unknown name `y`"));
        assert!(Expr::parse("sin x", &["x"]).is_err());
        assert!(Expr::parse("(x", &["x"]).is_err());
        assert!(Expr::parse("x x", &["x"]).unwrap_err().msg.contains("trailing"));
        assert!(Expr::parse("", &["x"]).is_err());
    }
}
