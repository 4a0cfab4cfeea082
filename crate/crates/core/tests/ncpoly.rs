use std::collections::BTreeMap;

use ncgenus::corpus;
use ncgenus::ncpoly::{
    expand_to_basis, fdq, free_laplacian, mult_perm, parse_word, pushforward, BasisSymbol, LinearMap, Monomial, NCPoly,
    Selector, Slot, SlotKind, TensorPoly, VecExpr,
};
use ncgenus::scalars::{rat, Scalar};
use proptest::prelude::*;
use rand::Rng;

fn poly(seed: u64) -> NCPoly {
    let mut rng = corpus::rng(seed);
    let alphabet = corpus::default_alphabet();
    let mut f = NCPoly::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let d = rng.gen_range(0..=4);
        let c = Scalar::from_rational(rat(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
        f = f.add(&corpus::random_monomial(&mut rng, d, &alphabet, 0.4).scale(&c));
    }
    f
}

fn random_map(seed: u64) -> LinearMap {
    let mut rng = corpus::rng(seed);
    let alphabet = corpus::default_alphabet();
    let table: BTreeMap<BasisSymbol, VecExpr> = alphabet
        .iter()
        .map(|s| {
            let mut v = VecExpr::zero();
            for t in &alphabet {
                if rng.gen_bool(0.4) {
                    v.add_term(t.clone(), &Scalar::from_rational(rat(rng.gen_range(-2..=2), rng.gen_range(1..=2))));
                }
            }
            (s.clone(), v)
        })
        .collect();
    LinearMap::from_table(format!("φ{seed}"), table)
}

/// `∂f · (1 ⊗ g) + (f ⊗ 1) · ∂g`, built term by term.
fn leibniz_rhs(f: &NCPoly, g: &NCPoly, sel: Selector) -> TensorPoly {
    let mut out = TensorPoly::zero(vec![SlotKind::Vector, SlotKind::Algebra, SlotKind::Algebra]);
    for (slots, c) in fdq(f, sel).terms() {
        let [Slot::Vector(u), Slot::Algebra(a), Slot::Algebra(b)] = &slots[..] else { panic!("shape") };
        for (m, d) in g.terms() {
            out.add_term(vec![Slot::Vector(u.clone()), Slot::Algebra(a.clone()), Slot::Algebra(b.mul(m))], c * d);
        }
    }
    for (slots, c) in fdq(g, sel).terms() {
        let [Slot::Vector(u), Slot::Algebra(a), Slot::Algebra(b)] = &slots[..] else { panic!("shape") };
        for (m, d) in f.terms() {
            out.add_term(vec![Slot::Vector(u.clone()), Slot::Algebra(m.mul(a)), Slot::Algebra(b.clone())], d * c);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn difference_quotient_is_a_derivation(a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (poly(a), poly(b));
        for sel in [Selector::TopV, Selector::Rest] {
            prop_assert_eq!(fdq(&f.mul(&g), sel), leibniz_rhs(&f, &g, sel));
        }
    }

    #[test]
    fn pushforward_is_a_functor(a in any::<u64>(), b in any::<u64>(), p in any::<u64>(), q in any::<u64>()) {
        let (f, g) = (poly(a), poly(b));
        let (phi, psi) = (random_map(p), random_map(q));
        let twice = pushforward(&psi, &pushforward(&phi, &f).unwrap()).unwrap();
        let once = pushforward(&psi.after(&phi), &f).unwrap();
        prop_assert_eq!(expand_to_basis(&twice), expand_to_basis(&once));
        let prod = pushforward(&phi, &f.mul(&g)).unwrap();
        let sep = pushforward(&phi, &f).unwrap().mul(&pushforward(&phi, &g).unwrap());
        prop_assert_eq!(expand_to_basis(&prod), expand_to_basis(&sep));
        prop_assert_eq!(pushforward(&LinearMap::identity(), &f).unwrap(), f);
    }

    #[test]
    fn letters_reassemble(seed in any::<u64>(), d in 0usize..6) {
        // Σ a·x_u·b over the terms of ∂f is (number of selected letters)·f
        let mut rng = corpus::rng(seed);
        let f = corpus::random_monomial(&mut rng, d, &corpus::default_alphabet(), 0.5);
        for sel in [Selector::TopV, Selector::Rest] {
            let mut back = NCPoly::zero();
            for (slots, c) in fdq(&f, sel).terms() {
                let [Slot::Vector(u), Slot::Algebra(a), Slot::Algebra(b)] = &slots[..] else { panic!("shape") };
                back.add_term(a.mul(&Monomial::var(u.clone())).mul(b), c);
            }
            let (m, _) = f.terms().next().unwrap();
            let k = m.vars().iter().filter(|v| sel.selects(v.as_basis().unwrap())).count();
            prop_assert_eq!(back, f.scale(&Scalar::from_int(k as i64)));
        }
    }

    #[test]
    fn laplacian_is_linear(a in any::<u64>(), b in any::<u64>()) {
        let (f, g) = (poly(a), poly(b));
        for sel in [Selector::TopV, Selector::Rest] {
            prop_assert_eq!(free_laplacian(&f.add(&g), sel), free_laplacian(&f, sel).add(&free_laplacian(&g, sel)).unwrap());
        }
    }

    #[test]
    fn words_print_and_parse_back(seed in any::<u64>()) {
        for f in corpus::random_corpus(seed, 3, 8) {
            prop_assert_eq!(parse_word(&f.to_string()).unwrap(), f);
        }
    }
}

#[test]
fn laplacian_of_powers() {
    for k in 2..=8usize {
        let f = parse_word(&format!("g0^{k}")).unwrap();
        let lap = free_laplacian(&f, Selector::TopV);
        let mut want = TensorPoly::zero(vec![SlotKind::Algebra, SlotKind::Algebra]);
        for a in 0..=k - 2 {
            let p = |e: usize| Slot::Algebra(parse_word(&format!("g0^{e}")).unwrap().terms().next().unwrap().0.clone());
            want.add_term(vec![p(a), p(k - 2 - a)], Scalar::from_int(k as i64));
        }
        assert_eq!(lap, want, "k = {k}");
        let collapsed = mult_perm(&lap, &[1, 2]).unwrap();
        assert_eq!(collapsed, parse_word(&format!("g0^{}", k - 2)).unwrap().scale(&Scalar::from_int((k * (k - 1)) as i64)));
        assert!(free_laplacian(&f, Selector::Rest).is_zero());
    }
}
