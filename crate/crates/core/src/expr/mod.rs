//! Closed-form real functions of the single variable `x`.
//!
//! An [`Expression`] is an immutable AST produced by [`parse`]. It can be
//! printed back (the printed form re-parses to the identical tree),
//! evaluated in IEEE doubles with explicit domain errors, and
//! differentiated symbolically.
//!
//! `abs` differentiates to `sign`, which is only meaningful away from the
//! kink at zero; evaluating a derivative jet there is reported as a domain
//! error by the jet machinery.

mod diff;
mod eval;
mod parser;
mod poly;

use std::fmt;
use std::sync::Arc;

pub use eval::EvalError;
pub use parser::{parse, ParseError};
pub use poly::Polynomial;

/// Elementary functions and unary minus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unary {
    Neg,
    Abs,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Tanh,
    Sign,
}

impl Unary {
    pub fn name(self) -> &'static str {
        match self {
            Unary::Neg => "-",
            Unary::Abs => "abs",
            Unary::Sqrt => "sqrt",
            Unary::Exp => "exp",
            Unary::Log => "log",
            Unary::Sin => "sin",
            Unary::Cos => "cos",
            Unary::Tanh => "tanh",
            Unary::Sign => "sign",
        }
    }

    pub(crate) fn from_ident(ident: &str) -> Option<Self> {
        Some(match ident {
            "abs" => Unary::Abs,
            "sqrt" => Unary::Sqrt,
            "exp" => Unary::Exp,
            "log" => Unary::Log,
            "sin" => Unary::Sin,
            "cos" => Unary::Cos,
            "tanh" => Unary::Tanh,
            "sign" => Unary::Sign,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Binary {
    Add,
    Sub,
    Mul,
    Div,
}

impl Binary {
    fn symbol(self) -> &'static str {
        match self {
            Binary::Add => "+",
            Binary::Sub => "-",
            Binary::Mul => "*",
            Binary::Div => "/",
        }
    }
}

/// AST node. Powers only take a constant exponent.
///
/// Well-formed trees never contain `Neg(Const(_))`: the smart constructors
/// fold it into a negative constant, which keeps print/parse round trips
/// structural.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Unary(Unary, Box<Node>),
    Binary(Binary, Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
}

impl Node {
    pub fn constant(c: f64) -> Node {
        Node::Const(c)
    }

    pub fn var() -> Node {
        Node::Var
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_const(&self, v: f64) -> bool {
        matches!(self, Node::Const(c) if *c == v)
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Unary(_, a) => a.contains_var(),
            Node::Binary(_, a, b) => a.contains_var() || b.contains_var(),
            Node::Pow(a, _) => a.contains_var(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Node::Const(_) | Node::Var => 1,
            Node::Unary(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) => 1 + a.size() + b.size(),
            Node::Pow(a, _) => 1 + a.size(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(Binary::Add | Binary::Sub, ..) => 1,
            Node::Binary(Binary::Mul | Binary::Div, ..) => 2,
            Node::Unary(Unary::Neg, _) => 3,
            Node::Const(c) if *c < 0.0 => 3,
            Node::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Node::Const(c) => write_number(f, *c),
            Node::Var => write!(f, "x"),
            Node::Unary(Unary::Neg, a) => {
                write!(f, "-")?;
                a.write_at(f, 4)
            }
            Node::Unary(op, a) => {
                write!(f, "{}(", op.name())?;
                a.write_at(f, 0)?;
                write!(f, ")")
            }
            Node::Binary(op, a, b) => {
                let (left, right) = match op {
                    Binary::Add | Binary::Sub => (1, 2),
                    Binary::Mul | Binary::Div => (2, 3),
                };
                a.write_at(f, left)?;
                match op {
                    Binary::Add | Binary::Sub => write!(f, " {} ", op.symbol())?,
                    _ => write!(f, "{}", op.symbol())?,
                }
                b.write_at(f, right)
            }
            Node::Pow(a, p) => {
                a.write_at(f, 5)?;
                write!(f, "^")?;
                write_number(f, *p)
            }
        }
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    // Display for f64 is the shortest representation that round-trips.
    if c == 0.0 {
        write!(f, "0")
    } else {
        write!(f, "{c}")
    }
}

// Smart constructors with light simplification: constant folding (only when
// the folded value is finite) and 0/1 elimination.
#[allow(clippy::should_implement_trait)]
impl Node {
    pub fn neg(a: Node) -> Node {
        match a {
            Node::Const(c) => Node::Const(-c),
            Node::Unary(Unary::Neg, inner) => *inner,
            other => Node::Unary(Unary::Neg, Box::new(other)),
        }
    }

    pub fn unary(op: Unary, a: Node) -> Node {
        if op == Unary::Neg {
            return Node::neg(a);
        }
        if let Node::Const(c) = a {
            if let Ok(v) = eval::apply_unary(op, c) {
                if v.is_finite() {
                    return Node::Const(v);
                }
            }
        }
        Node::Unary(op, Box::new(a))
    }

    pub fn add(a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Const(x), Node::Const(y)) if (x + y).is_finite() => Node::Const(x + y),
            _ if a.is_const(0.0) => b,
            _ if b.is_const(0.0) => a,
            (_, Node::Const(y)) if *y < 0.0 => Node::Binary(Binary::Sub, Box::new(a), Box::new(Node::Const(-y))),
            _ => Node::Binary(Binary::Add, Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Const(x), Node::Const(y)) if (x - y).is_finite() => Node::Const(x - y),
            _ if b.is_const(0.0) => a,
            _ if a.is_const(0.0) => Node::neg(b),
            _ => Node::Binary(Binary::Sub, Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Node, b: Node) -> Node {
        match (a, b) {
            (Node::Const(x), Node::Const(y)) if (x * y).is_finite() => Node::Const(x * y),
            (Node::Const(z), _) | (_, Node::Const(z)) if z == 0.0 => Node::Const(0.0),
            (Node::Const(o), other) | (other, Node::Const(o)) if o == 1.0 => other,
            (Node::Const(m), other) | (other, Node::Const(m)) if m == -1.0 => Node::neg(other),
            // c1 * (c2 * e) -> (c1 c2) * e
            (Node::Const(c1), Node::Binary(Binary::Mul, inner_a, inner_b))
                if matches!(*inner_a, Node::Const(c2) if (c1 * c2).is_finite()) =>
            {
                let c2 = inner_a.as_const().unwrap_or(1.0);
                Node::mul(Node::Const(c1 * c2), *inner_b)
            }
            (other, Node::Const(c)) => Node::Binary(Binary::Mul, Box::new(Node::Const(c)), Box::new(other)),
            (a, b) => Node::Binary(Binary::Mul, Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Const(x), Node::Const(y)) if *y != 0.0 && (x / y).is_finite() => Node::Const(x / y),
            _ if b.is_const(1.0) => a,
            _ if a.is_const(0.0) && !b.is_const(0.0) => Node::Const(0.0),
            _ => Node::Binary(Binary::Div, Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Node, p: f64) -> Node {
        if p == 1.0 {
            return a;
        }
        if p == 0.0 {
            return Node::Const(1.0);
        }
        if let Node::Const(c) = a {
            if let Ok(v) = eval::apply_pow(c, p) {
                if v.is_finite() {
                    return Node::Const(v);
                }
            }
        }
        Node::Pow(Box::new(a), p)
    }
}

/// A parsed real function of `x`. Cheap to clone.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Arc<Node>,
}

impl Expression {
    pub fn new(root: Node) -> Self {
        Self { root: Arc::new(root) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Node::Const(c))
    }

    pub fn identity() -> Self {
        Self::new(Node::Var)
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluates at `x`; any non-finite intermediate is a domain error.
    pub fn evaluate(&self, x: f64) -> Result<f64, EvalError> {
        eval::evaluate(&self.root, x)
    }

    /// Symbolic derivative with respect to `x`.
    pub fn differentiate(&self) -> Expression {
        Expression::new(diff::derivative(&self.root))
    }

    pub fn as_constant(&self) -> Option<f64> {
        self.root.as_const()
    }

    /// `self ∘ inner`, substituting `inner` for every occurrence of `x`.
    pub fn compose(&self, inner: &Expression) -> Expression {
        fn subst(node: &Node, inner: &Node) -> Node {
            match node {
                Node::Const(c) => Node::Const(*c),
                Node::Var => inner.clone(),
                Node::Unary(op, a) => Node::unary(*op, subst(a, inner)),
                Node::Binary(op, a, b) => {
                    let (a, b) = (subst(a, inner), subst(b, inner));
                    match op {
                        Binary::Add => Node::add(a, b),
                        Binary::Sub => Node::sub(a, b),
                        Binary::Mul => Node::mul(a, b),
                        Binary::Div => Node::div(a, b),
                    }
                }
                Node::Pow(a, p) => Node::pow(subst(a, inner), *p),
            }
        }
        Expression::new(subst(&self.root, &inner.root))
    }

    pub fn abs(&self) -> Expression {
        Expression::new(Node::unary(Unary::Abs, (*self.root).clone()))
    }

    pub fn sign(&self) -> Expression {
        Expression::new(Node::unary(Unary::Sign, (*self.root).clone()))
    }
}

impl From<Node> for Expression {
    fn from(node: Node) -> Self {
        Expression::new(node)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write_at(f, 0)
    }
}

impl std::str::FromStr for Expression {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_minimal_parentheses() {
        for (src, printed) in [
            ("x/2", "x/2"),
            ("-3*x + sqrt(8*x^2 + 2)", "-3*x + sqrt(8*x^2 + 2)"),
            ("(x+1)*(x-1)", "(x + 1)*(x - 1)"),
            ("x - (x - 1)", "x - (x - 1)"),
            ("-(x*2)", "-(x*2)"),
            ("-x^2", "-x^2"),
            ("(-x)^2", "(-x)^2"),
            ("x^-1", "x^-1"),
            ("x^2^3", "x^8"),
            ("(x^2)^3", "(x^2)^3"),
            ("x*-2", "x*-2"),
        ] {
            assert_eq!(parse(src).unwrap().to_string(), printed, "{src}");
        }
    }

    #[test]
    fn compose_substitutes_variable() {
        let f = parse("x^2 + 1").unwrap();
        let g = parse("x/2").unwrap();
        let h = f.compose(&g);
        assert_eq!(h.evaluate(4.0).unwrap(), 5.0);
    }

    #[test]
    fn smart_constructors_fold() {
        assert_eq!(Node::mul(Node::Const(2.0), Node::Const(3.0)), Node::Const(6.0));
        assert_eq!(Node::mul(Node::Var, Node::Const(1.0)), Node::Var);
        assert_eq!(Node::add(Node::Const(0.0), Node::Var), Node::Var);
        assert_eq!(Node::neg(Node::neg(Node::Var)), Node::Var);
        assert_eq!(Node::pow(Node::Var, 1.0), Node::Var);
        // 1/0 is not folded into an infinite constant
        assert!(matches!(Node::div(Node::Const(1.0), Node::Const(0.0)), Node::Binary(..)));
    }
}
