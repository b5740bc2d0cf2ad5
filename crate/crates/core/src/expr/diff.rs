use super::{Binary, Node, Unary};

/// d/dx of `node`. `abs` differentiates to `sign` (valid away from 0) and
/// `sign` to 0.
pub(crate) fn derivative(node: &Node) -> Node {
    match node {
        Node::Const(_) => Node::Const(0.0),
        Node::Var => Node::Const(1.0),
        Node::Unary(op, a) => {
            let da = derivative(a);
            let a = (**a).clone();
            let outer = match op {
                Unary::Neg => return Node::neg(da),
                Unary::Abs => Node::unary(Unary::Sign, a),
                Unary::Sqrt => Node::div(Node::Const(1.0), Node::mul(Node::Const(2.0), Node::unary(Unary::Sqrt, a))),
                Unary::Exp => Node::unary(Unary::Exp, a),
                Unary::Log => return Node::div(da, a),
                Unary::Sin => Node::unary(Unary::Cos, a),
                Unary::Cos => Node::neg(Node::unary(Unary::Sin, a)),
                Unary::Tanh => Node::sub(Node::Const(1.0), Node::pow(Node::unary(Unary::Tanh, a), 2.0)),
                Unary::Sign => return Node::Const(0.0),
            };
            chain(outer, da)
        }
        Node::Binary(op, a, b) => {
            let (da, db) = (derivative(a), derivative(b));
            let (a, b) = ((**a).clone(), (**b).clone());
            match op {
                Binary::Add => Node::add(da, db),
                Binary::Sub => Node::sub(da, db),
                Binary::Mul => Node::add(Node::mul(da, b), Node::mul(a, db)),
                Binary::Div => {
                    if b.as_const().is_some() {
                        Node::div(da, b)
                    } else {
                        Node::div(
                            Node::sub(Node::mul(da, b.clone()), Node::mul(a, db)),
                            Node::pow(b, 2.0),
                        )
                    }
                }
            }
        }
        Node::Pow(a, p) => {
            let da = derivative(a);
            let outer = Node::mul(Node::Const(*p), Node::pow((**a).clone(), p - 1.0));
            chain(outer, da)
        }
    }
}

/// outer' * inner', folding `1/(...) * u'` into `u'/(...)`.
fn chain(outer: Node, inner: Node) -> Node {
    match outer {
        Node::Binary(Binary::Div, num, den) if num.is_const(1.0) => Node::div(inner, *den),
        outer => Node::mul(inner, outer),
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::parse;

    #[test]
    fn square_differentiates_to_two_x() {
        assert_eq!(parse("x^2").unwrap().differentiate().to_string(), "2*x");
    }

    #[test]
    fn half_has_constant_derivative() {
        let d = parse("x/2").unwrap().differentiate();
        for x in [-3.0, 0.0, 7.5] {
            assert_eq!(d.evaluate(x).unwrap(), 0.5);
        }
    }

    #[test]
    fn sqrt_chain_rule() {
        let d = parse("sqrt(8*x^2+2)").unwrap().differentiate();
        for x in [-2.0, -0.3, 0.0, 1.0, 4.0] {
            let expected = 8.0 * x / (8.0 * x * x + 2.0f64).sqrt();
            assert!((d.evaluate(x).unwrap() - expected).abs() < 1e-14, "{d} at {x}");
        }
    }

    #[test]
    fn abs_becomes_sign() {
        let d = parse("abs(x^3)").unwrap().differentiate();
        assert_eq!(d.evaluate(-2.0).unwrap(), -12.0);
        assert_eq!(d.evaluate(2.0).unwrap(), 12.0);
    }

    #[test]
    fn elementary_rules() {
        let cases: [(&str, fn(f64) -> f64); 6] = [
            ("log(x^2 + 1)", |x| 2.0 * x / (x * x + 1.0)),
            ("sin(x)*cos(x)", |x| (2.0 * x).cos()),
            ("tanh(2*x)", |x| 2.0 * (1.0 - (2.0 * x).tanh().powi(2))),
            ("exp(-x^2)", |x| -2.0 * x * (-x * x).exp()),
            ("1/(1 + x^2)", |x| -2.0 * x / (1.0 + x * x).powi(2)),
            ("x^1.5", |x| 1.5 * x.sqrt()),
        ];
        for (src, exact) in cases {
            let d = parse(src).unwrap().differentiate();
            for x in [0.3, 1.1, 2.0] {
                let got = d.evaluate(x).unwrap();
                assert!((got - exact(x)).abs() < 1e-13 * (1.0 + exact(x).abs()), "{src}: {d}");
            }
        }
    }
}
