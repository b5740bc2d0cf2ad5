use num_complex::Complex64;
use proptest::prelude::*;

use ergodic_lab::combinatorics::{bell_number_oracle, bell_partial, faa_di_bruno, stirling_oracle};
use ergodic_lab::dynamics::{fixed_points, invert_monotone, orbit, CompactInterval, DomainInterval};
use ergodic_lab::ergodic::{apply_power_derivative, power_jet, power_jet_with, WeightedSymbol};
use ergodic_lab::expr::{parse, Expression, Node, Unary};
use ergodic_lab::jets::{iterate_jets, jet_compose, jet_lift, Jet};

const INVOLUTION: &str = "-3*x+sqrt(8*x^2+2)";

fn coefficient() -> impl Strategy<Value = f64> {
    (-8i32..=8).prop_map(|k| k as f64 / 4.0)
}

/// Random expressions that stay smooth and finite on [-1, 1].
fn node() -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![coefficient().prop_map(Node::constant), Just(Node::var())];
    leaf.prop_recursive(5, 48, 2, |inner| {
        prop_oneof![
            (prop_oneof![Just(Unary::Sin), Just(Unary::Cos), Just(Unary::Tanh), Just(Unary::Neg)], inner.clone())
                .prop_map(|(op, a)| Node::unary(op, a)),
            inner.clone().prop_map(|a| Node::unary(Unary::Exp, Node::unary(Unary::Tanh, a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::mul(a, b)),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Node::div(a, Node::add(Node::constant(2.0), Node::pow(b, 2.0)))),
            (inner, 0u32..4).prop_map(|(a, p)| Node::pow(a, p as f64)),
        ]
    })
}

fn expression() -> impl Strategy<Value = Expression> {
    node().prop_map(Expression::new)
}

/// Five-point central difference.
fn central_difference(f: &Expression, x: f64) -> f64 {
    let h = 1e-3;
    let v = |t: f64| f.evaluate(t).unwrap();
    (v(x - 2.0 * h) - 8.0 * v(x - h) + 8.0 * v(x + h) - v(x + 2.0 * h)) / (12.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(e in expression()) {
        let printed = e.to_string();
        let reparsed = parse(&printed).unwrap();
        prop_assert_eq!(reparsed.to_string(), printed);
        for x in [-0.9, 0.0, 0.4] {
            let (a, b) = (e.evaluate(x).unwrap(), reparsed.evaluate(x).unwrap());
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn derivative_matches_finite_differences(e in expression(), x in -1.0f64..1.0) {
        let d = e.differentiate().evaluate(x).unwrap();
        let fd = central_difference(&e, x);
        let scale = 1.0 + d.abs().max(e.evaluate(x).unwrap().abs());
        prop_assert!((d - fd).abs() <= 1e-5 * scale, "{}: {} vs {}", e, d, fd);
    }

    #[test]
    fn derivative_matches_first_jet(e in expression(), x in -1.0f64..1.0) {
        let d = e.differentiate().evaluate(x).unwrap();
        let j = jet_lift(&e, x, 1).unwrap().deriv(1);
        prop_assert!((d - j).abs() <= 1e-9 * (1.0 + d.abs()), "{}: {} vs {}", e, d, j);
    }

    #[test]
    fn faa_di_bruno_agrees_with_series_composition(
        f in prop::collection::vec(-2.0f64..2.0, 7),
        g in prop::collection::vec(-2.0f64..2.0, 7),
    ) {
        let inner = Jet::new(0.3, g.clone()).unwrap();
        let outer = Jet::new(g[0], f.clone()).unwrap();
        let composed = jet_compose(&outer, &inner).unwrap();
        for s in 0..=6 {
            let v = faa_di_bruno(&f[..=s], &g[..=s], s).unwrap();
            let w = composed.deriv(s);
            prop_assert!((v - w).abs() <= 1e-9 * (1.0 + v.abs().max(w.abs())), "order {}: {} vs {}", s, v, w);
        }
    }

    #[test]
    fn bell_row_sums_match_oracles(n in 0usize..=8) {
        let ones = vec![1.0; n.max(1)];
        let mut total = 0.0;
        for k in 0..=n {
            let b = bell_partial(n, k, &ones).unwrap();
            prop_assert_eq!(b, stirling_oracle(n, k).unwrap() as f64);
            total += b;
        }
        prop_assert_eq!(total, bell_number_oracle(n).unwrap() as f64);
    }

    #[test]
    fn powers_compose(n in 0usize..12, m in 0usize..12, x in -1.0f64..1.0, a in 0.5f64..1.5) {
        let f = parse("sin(x) + x^2").unwrap();
        let op = WeightedSymbol::composition(parse("x/2 + sin(x)/4").unwrap())
            .with_weight(parse("1 + x^2/8").unwrap(), Complex64::new(a, 0.0));
        let g = |y: f64, order: usize| power_jet(&op, &f, n, order, y);
        let nested = power_jet_with(&op, &g, m, 0, x).unwrap()[0];
        let direct = apply_power_derivative(&op, &f, n + m, 0, x).unwrap();
        prop_assert!((nested - direct).norm() <= 1e-9 * direct.norm().max(1e-300), "{} vs {}", nested, direct);
    }

    #[test]
    fn iterate_jets_follow_the_orbit(x in -3.0f64..3.0, n in 0usize..30) {
        let phi = parse(INVOLUTION).unwrap();
        let jets = iterate_jets(&phi, x, n, 0).unwrap();
        let points = orbit(&phi, x, n, &DomainInterval::real_line()).unwrap();
        for (j, p) in jets.iter().zip(&points) {
            prop_assert!((j.value() - p).abs() <= 1e-12 * (1.0 + p.abs()));
        }
    }

    #[test]
    fn inversion_round_trips(y in -20.0f64..20.0) {
        let phi = parse("x/2 + sin(x)/4").unwrap();
        let x = invert_monotone(&phi, y, &CompactInterval::new(-100.0, 100.0, 3).unwrap(), 1e-14).unwrap();
        prop_assert!((phi.evaluate(x).unwrap() - y).abs() <= 1e-12 * (1.0 + y.abs()));
    }

    #[test]
    fn involution_averages_settle(x in -5.0f64..5.0, n in 1usize..40) {
        // Cesàro averages of an involution orbit are within 1/n of the
        // midpoint of the 2-cycle.
        let phi = parse(INVOLUTION).unwrap();
        let points = orbit(&phi, x, n, &DomainInterval::real_line()).unwrap();
        let average: f64 = points[1..].iter().sum::<f64>() / n as f64;
        let midpoint = 0.5 * (points[0] + points[1]);
        prop_assert!((average - midpoint).abs() <= (points[0] - points[1]).abs() / n as f64 + 1e-9);
    }

    #[test]
    fn orbits_between_fixed_points_stay_enclosed(x in -2.9f64..2.9, n in 1usize..40) {
        // An increasing map keeps each gap between consecutive fixed points
        // invariant.
        let phi = parse("x + sin(x)/3").unwrap();
        let set = fixed_points(&phi, &CompactInterval::new(-10.0, 10.0, 2001).unwrap(), 1e-12);
        prop_assume!(set.points.iter().all(|p| (p.x - x).abs() > 1e-6));
        let (lo, hi) = set.enclosing(x).unwrap();
        for p in orbit(&phi, x, n, &DomainInterval::real_line()).unwrap() {
            prop_assert!(p > lo - 1e-12 && p < hi + 1e-12, "{} left ({}, {})", p, lo, hi);
        }
    }
}
