//! Algebraic invariants checked on random inputs.

use proptest::prelude::*;
use serde_json::Map;

use qonsager::coeff::{LaurentPoly, Monomial, Scalar, Var};
use qonsager::coideal::u_env;
use qonsager::dsl::{format, parse_expr, Ast};
use qonsager::qalgebra::{antipode, coproduct, counit, FreeElement, Letter, Word};
use qonsager::repmat::{pauli, site_op, support, Chain, ChainOperator, SparseMatrix};
use qonsager::verify::{CheckResult, Mode, Report, Residual, Status};

const LETTERS: [Letter; 8] =
    [Letter::E0, Letter::E1, Letter::F0, Letter::F1, Letter::T0, Letter::T0inv, Letter::T1, Letter::T1inv];

fn scalar() -> impl Strategy<Value = Scalar> {
    prop::collection::vec((-3i32..=3, 0i32..=2, -4i64..=4), 1..4).prop_map(|ts| {
        Scalar::poly(LaurentPoly::from_terms(ts.into_iter().map(|(e, k, c)| {
            (Monomial::var_pow(Var::Q, e).mul(&Monomial::var_pow(Var::Kp, k)), qonsager::coeff::int(c))
        })))
    })
}

fn ratio() -> impl Strategy<Value = Scalar> {
    (scalar(), scalar()).prop_filter_map("zero denominator", |(a, b)| a.checked_div(&b).ok())
}

fn element() -> impl Strategy<Value = FreeElement> {
    prop::collection::vec((prop::collection::vec(prop::sample::select(LETTERS.to_vec()), 0..4), -3i64..=3), 1..4)
        .prop_map(|ts| {
            let mut x = FreeElement::zero();
            for (ls, c) in ts {
                x = &x + &FreeElement::word(Word(ls), Scalar::int(c));
            }
            x
        })
}

fn ast() -> impl Strategy<Value = Ast> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["e0", "e1", "f0", "f1", "t0", "t1", "t0'", "t1'"]).prop_map(Ast::r),
        (-5i64..=5).prop_map(Ast::int),
        Just(Ast::r("q")),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            prop::collection::vec((any::<bool>(), inner.clone()), 2..3).prop_map(Ast::Sum),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Ast::Product),
            (inner.clone(), inner.clone(), -2i32..=2).prop_map(|(a, b, n)| Ast::QComm(Box::new(a), Box::new(b), n)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ast::Comm(Box::new(a), Box::new(b))),
            (inner, 1i32..=2).prop_map(|(a, n)| Ast::Power(Box::new(a), n)),
        ]
    })
}

fn single_site() -> impl Strategy<Value = SparseMatrix> {
    prop::sample::select(vec![pauli::sp(), pauli::sm(), pauli::s3(), pauli::sx(), pauli::qs3()])
}

fn sites_pair() -> impl Strategy<Value = (usize, usize, usize)> {
    (2usize..=4).prop_flat_map(|n| (Just(n), 1..n)).prop_flat_map(|(n, i)| (Just(n), Just(i), i + 1..=n))
}

fn status() -> impl Strategy<Value = Status> {
    prop::sample::select(vec![Status::Pass, Status::Fail, Status::Error])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coproduct_is_multiplicative(a in element(), b in element()) {
        let lhs = coproduct(&(&a * &b), 2, false).unwrap();
        let rhs = coproduct(&a, 2, false).unwrap().mul(&coproduct(&b, 2, false).unwrap());
        prop_assert!(lhs.add(&rhs.scale(&Scalar::int(-1))).is_zero());
    }

    #[test]
    fn counit_is_multiplicative(a in element(), b in element()) {
        prop_assert_eq!(counit(&(&a * &b)), &counit(&a) * &counit(&b));
    }

    #[test]
    fn antipode_reverses_products(a in element(), b in element()) {
        prop_assert_eq!(antipode(&(&a * &b)), &antipode(&b) * &antipode(&a));
    }

    #[test]
    fn chain_evaluation_is_multiplicative(a in element(), b in element()) {
        let ch = Chain::new(2).unwrap();
        let ab = ch.eval(&(&a * &b)).unwrap();
        prop_assert_eq!(ab, ch.eval(&a).unwrap().try_mul(&ch.eval(&b).unwrap()).unwrap());
    }

    #[test]
    fn coordinate_text_round_trips(a in element()) {
        let m = Chain::new(2).unwrap().eval(&a).unwrap();
        prop_assert_eq!(SparseMatrix::from_coordinate_text(&m.to_coordinate_text()).unwrap(), m);
    }

    #[test]
    fn canonical_scalar_text_round_trips(s in ratio()) {
        let t = s.to_canonical();
        let back = Scalar::parse(&t).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_canonical(), t);
    }

    #[test]
    fn one_site_insertion_has_that_support(a in single_site(), (n, j) in (1usize..=4).prop_flat_map(|n| (Just(n), 1..=n))) {
        let op = ChainOperator::new(site_op(&a, j, n), n, "x");
        prop_assert_eq!(support(&op).into_iter().collect::<Vec<_>>(), vec![j]);
    }

    #[test]
    fn two_site_insertion_has_both_sites(a in single_site(), b in single_site(), (n, i, j) in sites_pair()) {
        let m = site_op(&a, i, n).try_mul(&site_op(&b, j, n)).unwrap();
        let op = ChainOperator::new(m, n, "x");
        prop_assert_eq!(support(&op).into_iter().collect::<Vec<_>>(), vec![i, j]);
    }

    #[test]
    fn expression_text_round_trips(a in ast()) {
        let t = format(&a);
        let back = parse_expr(&t).unwrap_or_else(|e| panic!("{t}: {e}"));
        prop_assert_eq!(format(&back), t.clone());
        let env = u_env();
        let one = FreeElement::one();
        prop_assert_eq!(env.eval_elem(&back, &one).unwrap(), env.eval_elem(&a, &one).unwrap());
    }

    #[test]
    fn exit_code_follows_statuses(ss in prop::collection::vec(status(), 0..6)) {
        let checks = ss
            .iter()
            .enumerate()
            .map(|(k, s)| CheckResult {
                id: format!("c{k}"),
                paper_ref: String::new(),
                params: Map::new(),
                status: *s,
                residual: Residual::default(),
                support_observed: None,
                millis: 0,
            })
            .collect();
        let rep = Report { suite: "s".into(), mode: Mode::Symbolic, seed: None, checks };
        let want = if ss.iter().all(|s| *s == Status::Pass) { 0 } else { 1 };
        prop_assert_eq!(rep.exit_code(), want);
        prop_assert_eq!(Report::from_json(&rep.to_json()).unwrap(), rep);
    }
}
