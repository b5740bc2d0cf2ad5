use super::{Binary, Expression, Node, Unary};

/// Dense real polynomial, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Expands `e` if it is a polynomial in `x`: sums, products, division by
    /// nonzero constants and non-negative integer powers of polynomials.
    pub fn from_expression(e: &Expression) -> Option<Self> {
        expand(e.root()).map(Polynomial::new)
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// The primitive vanishing at 0.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = vec![0.0];
        out.extend(self.coeffs.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)));
        Polynomial::new(out)
    }

    pub fn to_expression(&self) -> Expression {
        let mut acc = Node::Const(0.0);
        for (k, &c) in self.coeffs.iter().enumerate() {
            let monomial = match k {
                0 => Node::Const(1.0),
                _ => Node::pow(Node::Var, k as f64),
            };
            acc = Node::add(acc, Node::mul(Node::Const(c), monomial));
        }
        Expression::new(acc)
    }
}

fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn add(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += sign * y;
    }
    out
}

fn expand(node: &Node) -> Option<Vec<f64>> {
    Some(match node {
        Node::Const(c) => vec![*c],
        Node::Var => vec![0.0, 1.0],
        Node::Unary(Unary::Neg, a) => expand(a)?.into_iter().map(|c| -c).collect(),
        Node::Unary(..) => return None,
        Node::Binary(op, a, b) => {
            let (a, b) = (expand(a)?, expand(b)?);
            match op {
                Binary::Add => add(&a, &b, 1.0),
                Binary::Sub => add(&a, &b, -1.0),
                Binary::Mul => mul(&a, &b),
                Binary::Div => {
                    let d = Polynomial::new(b);
                    if d.degree() != 0 || d.coeffs[0] == 0.0 {
                        return None;
                    }
                    a.into_iter().map(|c| c / d.coeffs[0]).collect()
                }
            }
        }
        Node::Pow(a, p) => {
            if p.fract() != 0.0 || *p < 0.0 || *p > 64.0 {
                return None;
            }
            let base = expand(a)?;
            (0..*p as usize).fold(vec![1.0], |acc, _| mul(&acc, &base))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn expands_products_and_powers() {
        let p = Polynomial::from_expression(&parse("(x+1)^2 - x/2").unwrap()).unwrap();
        assert_eq!(p.coefficients(), &[1.0, 1.5, 1.0]);
    }

    #[test]
    fn rejects_non_polynomials() {
        for src in ["sin(x)", "1/x", "x^0.5", "x^-1", "exp(x)*x"] {
            assert!(Polynomial::from_expression(&parse(src).unwrap()).is_none(), "{src}");
        }
    }

    #[test]
    fn antiderivative_of_x_is_half_square() {
        let p = Polynomial::from_expression(&parse("x").unwrap()).unwrap();
        let f = p.antiderivative().to_expression();
        assert_eq!(f.evaluate(2.0).unwrap(), 2.0);
        let back = Polynomial::from_expression(&f).unwrap();
        assert_eq!(back.coefficients(), &[0.0, 0.0, 0.5]);
    }
}
