use ncgenus::corpus;
use ncgenus::exec::Exec;
use ncgenus::expansion::{
    crossing_sum, dcross, eta_by_substitution, eta_derivative, eta_derivative_by_crossings, eta_poly, expand_asymptotic,
    expand_in_t, tcross_expected_trace_with, verify_first_order, CrossVariant,
};
use ncgenus::genus::expected_trace_poly;
use ncgenus::ncpoly::parse_word;
use ncgenus::scalars::{MomentPoly, ParamPair, ParamSymbol, Rational, Scalar};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn first_order_formula_holds(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 8).remove(0);
        let r = verify_first_order(&f).unwrap();
        prop_assert!(r.pass, "{f}: {:?}", r.first_mismatch());
    }

    #[test]
    fn formula_is_linear(a in any::<u64>(), b in any::<u64>()) {
        let f = corpus::random_corpus(a, 1, 6).remove(0);
        let g = corpus::random_corpus(b, 1, 6).remove(0);
        let h = f.add(&g.scale(&Scalar::from_int(-3)));
        prop_assert!(verify_first_order(&h).unwrap().pass);
    }

    #[test]
    fn crossing_terms_regroup(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 8).remove(0);
        for v in [CrossVariant::VV, CrossVariant::VW] {
            prop_assert_eq!(dcross(&f, v).unwrap(), crossing_sum(&f, v).unwrap());
        }
    }

    #[test]
    fn interpolation_identities(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 8).remove(0);
        let eta = eta_poly(&f).unwrap();
        let d = eta_derivative(&f).unwrap();
        prop_assert_eq!(&eta, &eta_by_substitution(&f).unwrap());
        prop_assert_eq!(&d, &expand_in_t(&eta.derivative(ParamPair::T(0)).unwrap()).unwrap());
        prop_assert_eq!(&d, &eta_derivative_by_crossings(&f).unwrap());
        let one = Rational::from_integer(1.into());
        prop_assert_eq!(eta.substitute(ParamSymbol::t(0), &one).unwrap(), expected_trace_poly(&f).unwrap());
    }

    #[test]
    fn first_iterate_sums_to_the_moment(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 6).remove(0);
        let e = expand_asymptotic(&f, 1).unwrap();
        prop_assert_eq!(e.total(), expected_trace_poly(&f).unwrap());
    }

    #[test]
    fn execution_policies_agree(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 8).remove(0);
        prop_assert_eq!(
            tcross_expected_trace_with(&f, Exec::Sequential).unwrap(),
            tcross_expected_trace_with(&f, Exec::Parallel).unwrap()
        );
    }
}

#[test]
fn formal_matrix_letters() {
    for w in ["Z1 g1 Z2 g1", "Z1 g1 Z2 s1 Z3 g1 Z4 s1", "g1 Z1 g2 Z2 g1 Z3 g2 Z4", "Z1 s1 s2 Z2 s1 s2"] {
        let f = parse_word(w).unwrap();
        let r = verify_first_order(&f).unwrap();
        assert!(r.pass, "{w}: {:?}", r.first_mismatch());
    }
}

#[test]
fn higher_towers() {
    // every coefficient is a genus count of x^{2k}
    let e = expand_asymptotic(&parse_word("g0^10").unwrap(), 2).unwrap();
    assert_eq!(e.coeffs, [42, 420, 483].map(Scalar::from_int));
    assert!(e.remainder.is_zero());
    let e = expand_asymptotic(&parse_word("g0^8").unwrap(), 3).unwrap();
    assert_eq!(e.coeffs, [14, 70, 21, 0].map(Scalar::from_int));
    assert_eq!(e.total(), MomentPoly::from_ints(&[14, 70, 21]));
}
