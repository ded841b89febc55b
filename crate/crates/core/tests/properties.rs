use proptest::prelude::*;

use synframe::gen::{gen_expr, sample_rng, GenConfig};
use synframe::parser::print_expr;
use synframe::{
    derivative, eval_syn, limit_derivative, nf_derivative, nf_equal, nf_eval, opd_apply, parse_expr,
    parse_synvalue, poly_diff, print_synvalue, quote_poly, simplify, to_nf, Assignment, Expr, Rational,
    SynValue, VarName,
};

fn var(name: &str) -> VarName {
    VarName::new(name).unwrap()
}

fn arb_var() -> impl Strategy<Value = VarName> {
    prop::sample::select(vec!["x", "y", "z"]).prop_map(var)
}

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-30i64..=30, 1i64..=12).prop_map(|(n, d)| Rational::new(n, d).unwrap())
}

/// Small polynomials built directly by proptest, so failures shrink.
fn arb_poly() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![arb_var().prop_map(Expr::Var), arb_rational().prop_map(Expr::Const)];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner, 0u32..=4).prop_map(|(a, n)| Expr::pow(a, n)),
        ]
    })
}

/// Polynomials from the checkers' own generator.
fn seeded_poly() -> impl Strategy<Value = Expr> {
    (any::<u64>(), any::<u64>()).prop_map(|(seed, i)| gen_expr(&GenConfig::default(), &mut sample_rng(seed, i)))
}

fn arb_env() -> impl Strategy<Value = Assignment> {
    (arb_rational(), arb_rational(), arb_rational())
        .prop_map(|(a, b, c)| [(var("x"), a), (var("y"), b), (var("z"), c)].into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn print_parse_round_trip(u in arb_poly()) {
        prop_assert_eq!(parse_expr(&print_expr(&u)).unwrap(), u);
    }

    #[test]
    fn print_parse_round_trip_generated(u in seeded_poly()) {
        prop_assert_eq!(parse_expr(&print_expr(&u)).unwrap(), u);
    }

    #[test]
    fn synvalue_print_parse_round_trip(u in arb_poly()) {
        let s = quote_poly(&u).unwrap();
        prop_assert_eq!(parse_synvalue(&print_synvalue(&s)).unwrap(), s);
    }

    #[test]
    fn disquotation(u in seeded_poly()) {
        prop_assert_eq!(eval_syn(&quote_poly(&u).unwrap()), u);
    }

    #[test]
    fn quotation_is_injective(u in arb_poly(), v in arb_poly()) {
        prop_assert_eq!(u == v, quote_poly(&u).unwrap() == quote_poly(&v).unwrap());
    }

    #[test]
    fn quotation_preserves_size(u in seeded_poly()) {
        prop_assert_eq!(quote_poly(&u).unwrap().size(), u.size());
    }

    #[test]
    fn comp_behavior(u in seeded_poly(), x in arb_var()) {
        let d = opd_apply(&quote_poly(&u).unwrap(), &SynValue::Var(x.clone())).unwrap();
        prop_assert_eq!(eval_syn(&d), poly_diff(&u, &x).unwrap().result);
    }

    #[test]
    fn math_meaning(u in arb_poly(), x in arb_var()) {
        let d = poly_diff(&u, &x).unwrap().result;
        prop_assert!(nf_equal(&to_nf(&d).unwrap(), &limit_derivative(&u, &x).unwrap()));
    }

    #[test]
    fn oracles_agree(u in seeded_poly(), x in arb_var()) {
        let term_by_term = nf_derivative(&to_nf(&u).unwrap(), &x);
        prop_assert!(nf_equal(&term_by_term, &limit_derivative(&u, &x).unwrap()));
    }

    #[test]
    fn normal_form_is_a_homomorphism(u in arb_poly(), v in arb_poly()) {
        let (p, q) = (to_nf(&u).unwrap(), to_nf(&v).unwrap());
        prop_assert_eq!(to_nf(&Expr::add(u.clone(), v.clone())).unwrap(), p.add(&q));
        prop_assert_eq!(to_nf(&Expr::sub(u.clone(), v.clone())).unwrap(), p.sub(&q));
        prop_assert_eq!(to_nf(&Expr::mul(u, v)).unwrap(), p.mul(&q).unwrap());
    }

    #[test]
    fn normal_form_evaluates_like_the_expression(u in seeded_poly(), env in arb_env()) {
        let env: Assignment = env.into_iter().chain([(var("w"), Rational::from(2))]).collect();
        prop_assert_eq!(nf_eval(&to_nf(&u).unwrap(), &env).unwrap(), synframe::semantics::eval_expr(&u, &env).unwrap());
    }

    #[test]
    fn canonical_rendering_is_a_fixed_point(u in arb_poly()) {
        let p = to_nf(&u).unwrap();
        let rendered = p.to_expr();
        prop_assert_eq!(to_nf(&rendered).unwrap(), p.clone());
        prop_assert_eq!(parse_expr(&rendered.to_string()).unwrap(), rendered);
    }

    #[test]
    fn leibniz_rule(u in arb_poly(), v in arb_poly(), x in arb_var()) {
        let d = |e: &Expr| to_nf(&derivative(e, &x).unwrap()).unwrap();
        let (pu, pv) = (to_nf(&u).unwrap(), to_nf(&v).unwrap());
        let lhs = d(&Expr::mul(u.clone(), v.clone()));
        let rhs = d(&u).mul(&pv).unwrap().add(&pu.mul(&d(&v)).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn linearity(u in arb_poly(), v in arb_poly(), c in arb_rational(), x in arb_var()) {
        let d = |e: &Expr| to_nf(&derivative(e, &x).unwrap()).unwrap();
        let combo = Expr::add(Expr::mul(Expr::Const(c.clone()), u.clone()), v.clone());
        let expected = synframe::PolyNF::constant(c).mul(&d(&u)).unwrap().add(&d(&v));
        prop_assert_eq!(d(&combo), expected);
    }

    #[test]
    fn simplify_is_idempotent(u in seeded_poly()) {
        let once = simplify(&u).unwrap();
        prop_assert_eq!(simplify(&once).unwrap(), once.clone());
        prop_assert!(nf_equal(&to_nf(&once).unwrap(), &to_nf(&u).unwrap()));
    }

    #[test]
    fn traced_and_untraced_agree(u in seeded_poly(), x in arb_var()) {
        let traced = poly_diff(&u, &x).unwrap();
        prop_assert_eq!(&traced.result, &derivative(&u, &x).unwrap());
        for pair in traced.trace.windows(2) {
            prop_assert_eq!(&pair[0].after, &pair[1].before);
        }
    }

    #[test]
    fn derivative_of_foreign_variable_ignores_it(u in arb_poly()) {
        let q = var("q");
        prop_assert_eq!(poly_diff(&u, &q).unwrap().result, Expr::constant(0));
    }

    #[test]
    fn rational_display_parse_round_trip(r in arb_rational()) {
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }
}
