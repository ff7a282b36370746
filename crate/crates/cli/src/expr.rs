//! Minimal arithmetic expressions for user-supplied problem data.
//!
//! Grammar (`^` binds tighter than unary minus and is right associative):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | name | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Names are `x`, `y`, `pi` and, for boundary data, the outward normal
//! components `nx`, `ny`. Functions are `sin`, `cos` and `exp`.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Var {
    X,
    Y,
    Nx,
    Ny,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at column {}: {}", self.position + 1, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
}

impl Expr {
    /// Parses an expression in `x`, `y`. With `normal` set, `nx` and `ny`
    /// are also accepted.
    pub fn parse(src: &str, normal: bool) -> Result<Self, ParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0, normal };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
        }
        Ok(Expr { root })
    }

    pub fn eval(&self, x: f64, y: f64, n: [f64; 2]) -> f64 {
        eval(&self.root, x, y, n)
    }
}

fn eval(node: &Node, x: f64, y: f64, n: [f64; 2]) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Var(Var::X) => x,
        Node::Var(Var::Y) => y,
        Node::Var(Var::Nx) => n[0],
        Node::Var(Var::Ny) => n[1],
        Node::Neg(a) => -eval(a, x, y, n),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, x, y, n), eval(b, x, y, n));
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a / b,
                Op::Pow => a.powf(b),
            }
        }
        Node::Call(f, a) => {
            let a = eval(a, x, y, n);
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Exp => a.exp(),
            }
        }
    }
}

struct Parser<'s> {
    src: &'s [u8],
    pos: usize,
    normal: bool,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => Op::Add,
                Some(b'-') => Op::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => Op::Mul,
                Some(b'/') => Op::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.name(),
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if self.pos == exp_start {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse()
            .map(Node::Num)
            .map_err(|_| ParseError { position: start, message: format!("invalid number '{text}'") })
    }

    fn name(&mut self) -> Result<Node, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let func = match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            _ => None,
        };
        if let Some(func) = func {
            if !self.eat(b'(') {
                return Err(self.error(format!("expected '(' after {name}")));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Node::Call(func, Box::new(arg)));
        }
        match name {
            "x" => Ok(Node::Var(Var::X)),
            "y" => Ok(Node::Var(Var::Y)),
            "pi" => Ok(Node::Num(std::f64::consts::PI)),
            "nx" if self.normal => Ok(Node::Var(Var::Nx)),
            "ny" if self.normal => Ok(Node::Var(Var::Ny)),
            "nx" | "ny" => Err(ParseError {
                position: start,
                message: format!("'{name}' is only available in boundary flux data"),
            }),
            _ => Err(ParseError { position: start, message: format!("unknown name '{name}'") }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ev(src: &str, x: f64, y: f64) -> f64 {
        Expr::parse(src, true).unwrap().eval(x, y, [0.6, 0.8])
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0, 0.0), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0, 0.0), 512.0);
        assert_eq!(ev("-2 ^ 2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2 ^ -1", 0.0, 0.0), 0.5);
        assert_eq!(ev("8 / 4 / 2", 0.0, 0.0), 1.0);
        assert_eq!(ev("1 - 2 - 3", 0.0, 0.0), -4.0);
        assert_eq!(ev("1.5e2 + .5", 0.0, 0.0), 150.5);
    }

    #[test]
    fn variables_and_functions() {
        let v = ev("4*pi^4*sin(pi*x)*sin(pi*y)", 0.5, 0.5);
        assert!((v - 4.0 * PI.powi(4)).abs() < 1e-12);
        assert_eq!(ev("x*nx + y*ny", 1.0, 2.0), 0.6 + 1.6);
        assert_eq!(ev("exp(0) + cos(0)", 0.0, 0.0), 2.0);
    }

    #[test]
    fn errors() {
        for (src, col) in [("1 +", 4), ("sin x", 5), ("(x", 3), ("x $ y", 3), ("foo", 1), ("2 3", 3)] {
            let err = Expr::parse(src, false).unwrap_err();
            assert_eq!(err.position + 1, col, "{src}: {err}");
        }
        assert!(Expr::parse("nx", false).is_err());
        assert!(Expr::parse("nx", true).is_ok());
    }
}
