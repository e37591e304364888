use proptest::prelude::*;

use noetherkit::corpus::{self, CorpusName, GChoice};
use noetherkit::expr::identity::{equal_numeric, CheckConfig};
use noetherkit::expr::{
    diff, eval, parse, product, quotient, substitute, sum, total_dt, Alphabet, DtMode, Expr, Substitution, Var,
};
use noetherkit::mechanics::LagrangianSystem;
use noetherkit::noether::{
    convert_standard_alternative, multiplicity_transform, noether_expr, solve_strong, verify_triple, Convention, Form,
    Triple,
};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::t()),
        Just(Expr::q(0)),
        Just(Expr::q(1)),
        Just(Expr::qdot(0)),
        Just(Expr::qdot(1)),
        (-4i32..=4).prop_map(|k| Expr::constant(k as f64 / 2.0)),
    ]
}

/// Expressions in two degrees of freedom that are finite everywhere.
fn smooth() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(product),
            inner.clone().prop_map(|e| e.sin()),
            inner.clone().prop_map(|e| e.cos()),
            inner.clone().prop_map(|e| e.powi(2)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| quotient(a, Expr::constant(2.0) + b.powi(2))),
        ]
    })
}

/// Smooth expressions without velocities, usable as τ or h in a strong triple.
fn positional() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![Just(Expr::t()), Just(Expr::q(0)), Just(Expr::q(1)), (-2i32..=2).prop_map(|k| Expr::constant(k as f64))];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..3).prop_map(sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(product),
            inner.clone().prop_map(|e| e.sin()),
        ]
    })
}

fn two_dof() -> LagrangianSystem {
    let a = Alphabet::new(2);
    let l = parse("(qdot1^2 + qdot2^2)/2 + qdot1*qdot2/3 - q1^2/2 - q1*q2^2/4", &a).unwrap();
    LagrangianSystem::builder("coupled", a, l).build().unwrap()
}

fn kepler() -> corpus::CorpusEntry {
    corpus::load(CorpusName::Kepler3d).unwrap()
}

fn close(sys: &LagrangianSystem, a: &Expr, b: &Expr) -> bool {
    equal_numeric(a, b, sys.domain(), &CheckConfig::default().with_k(20)).unwrap().passed()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diff_is_linear(a in smooth(), b in smooth(), k in -3i32..=3) {
        let sys = two_dof();
        let k = Expr::constant(k as f64);
        for v in [Var::Time, Var::Coord(0), Var::Vel(1)] {
            let lhs = diff(&(k.clone() * a.clone() + b.clone()), v);
            let rhs = k.clone() * diff(&a, v) + diff(&b, v);
            prop_assert!(close(&sys, &lhs, &rhs));
        }
    }

    #[test]
    fn printing_then_parsing_is_the_identity(e in smooth()) {
        let a = Alphabet::new(2);
        let text = e.print(&a);
        let back = parse(&text, &a).unwrap();
        prop_assert_eq!(&back, &e, "printed as {}", text);
    }

    #[test]
    fn on_flow_derivative_has_no_accelerations(e in smooth()) {
        let sys = two_dof();
        let d = total_dt(&e, 2, DtMode::OnFlow(sys.accel())).unwrap();
        prop_assert!(!d.has_acceleration());
    }

    #[test]
    fn generic_derivative_on_the_flow_matches(e in smooth()) {
        let sys = two_dof();
        let generic = total_dt(&e, 2, DtMode::Generic).unwrap();
        let substituted = substitute(&generic, &Substitution::new().accelerations(sys.accel()));
        let flow = total_dt(&e, 2, DtMode::OnFlow(sys.accel())).unwrap();
        prop_assert!(close(&sys, &substituted, &flow));
    }

    #[test]
    fn conversion_keeps_the_integral(tau in smooth(), xi1 in smooth(), xi2 in smooth(), f in smooth()) {
        let sys = two_dof();
        let standard = Triple::new(tau, vec![xi1, xi2], f, Form::OnFlow);
        let alt = convert_standard_alternative(&standard);
        prop_assert_eq!(alt.form, Form::AltOnFlow);
        let n_std = noether_expr(&sys, &standard, Convention::Standard);
        let n_alt = noether_expr(&sys, &alt, Convention::Alternative);
        prop_assert!(close(&sys, &n_std, &n_alt));
        let back = convert_standard_alternative(&alt);
        for (x, y) in back.xi.iter().zip(&standard.xi) {
            prop_assert!(close(&sys, x, y));
        }
    }
}

proptest! {
    // each case verifies symbolic triples at 100 points
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn strong_solutions_have_the_stated_structure(tau in positional(), which in 0usize..8) {
        let entry = kepler();
        let sys = &entry.system;
        let n = &entry.integrals[which % entry.integrals.len()];
        let tr = solve_strong(sys, n, tau.clone()).unwrap();
        prop_assert_eq!(tr.form, Form::Strong);
        prop_assert_eq!(&tr.tau, &tau);
        // ξ - τq̇ = -g⁻¹ ∂N/∂q̇, and g is the identity here
        for i in 0..3 {
            let w = diff(n.expr(), Var::Vel(i));
            prop_assert!(close(sys, &(tr.xi[i].clone() - tau.clone() * Expr::qdot(i)), &(-w)));
        }
        let cfg = CheckConfig::default();
        prop_assert!(verify_triple(sys, &tr, Form::Strong, Some(n.expr()), &cfg).unwrap().passed());
    }

    #[test]
    fn multiplicity_keeps_solutions_and_integrals(h in positional(), velocity in any::<bool>()) {
        let entry = corpus::load(CorpusName::Isochrony { g: GChoice::Linear, c: 1.0 }).unwrap();
        let sys = &entry.system;
        let h = if velocity { h + Expr::qdot(0) * Expr::q(1) } else { h };
        let cfg = CheckConfig::default();
        for named in &entry.triples {
            let moved = multiplicity_transform(sys, &named.triple, h.clone()).unwrap();
            prop_assert!(close(sys, &moved.f, &h));
            let n = entry.integral(&named.integral).unwrap().expr();
            let report = verify_triple(sys, &moved, Form::OnFlow, Some(n), &cfg).unwrap();
            prop_assert!(report.passed(), "{} with h = {}: {:?}", named.name, h.print(sys.alphabet()), report);
        }
    }
}

#[test]
fn sample_expression_evaluates() {
    // guards the generators: the leaves and the smooth quotient are finite
    let a = Alphabet::new(2);
    let e = quotient(parse("q1*qdot2", &a).unwrap(), Expr::constant(2.0) + Expr::t().powi(2));
    let p = two_dof().point(1.0, &[2.0, 0.0], &[0.0, 3.0], &[0.0, 0.0]);
    assert_eq!(eval(&e, &p).unwrap(), 2.0);
}
