use std::collections::BTreeMap;

use ncgenus::corpus;
use ncgenus::genus::{expected_trace_genus, expected_trace_ibp, expected_trace_poly, semicircular_trace, TracedWordSystem};
use ncgenus::lemmas;
use ncgenus::ncpoly::{pushforward, BasisSymbol, LinearMap, Monomial, NCPoly, VecExpr};
use ncgenus::perms::{IndexSet, Perm};
use ncgenus::scalars::{MatProduct, MomentPoly, Scalar};
use proptest::prelude::*;
use rand::Rng;

/// Label-compatible pairings of a word given as label ids.
fn pairings(labels: &[u8]) -> Vec<Vec<usize>> {
    fn go(labels: &[u8], free: Vec<usize>, pi: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some((&a, rest)) = free.split_first() else {
            out.push(pi.clone());
            return;
        };
        for (i, &b) in rest.iter().enumerate() {
            if labels[a] != labels[b] {
                continue;
            }
            pi[a] = b;
            pi[b] = a;
            let left = rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            go(labels, left, pi, out);
        }
    }
    let mut out = Vec::new();
    go(labels, (0..labels.len()).collect(), &mut vec![0; labels.len()], &mut out);
    out
}

/// Wick expansion of `E tr` of a GUE word: genus from the faces of `γπ`.
fn gue_oracle(labels: &[u8]) -> MomentPoly {
    let n = labels.len();
    let mut counts = vec![0i64; n / 4 + 1];
    for pi in pairings(labels) {
        let mut seen = vec![false; n];
        let mut faces = 0;
        for s in 0..n {
            if !seen[s] {
                faces += 1;
                let mut i = s;
                while !seen[i] {
                    seen[i] = true;
                    i = pi[(i + 1) % n];
                }
            }
        }
        counts[(n / 2 + 1 - faces) / 2] += 1;
    }
    MomentPoly::from_ints(&counts)
}

/// Free semicircular word: count of noncrossing label-compatible pairings.
fn semi_oracle(labels: &[u8]) -> i64 {
    pairings(labels)
        .iter()
        .filter(|pi| {
            (0..pi.len()).all(|a| {
                let b = pi[a];
                (0..pi.len()).all(|c| {
                    let d = pi[c];
                    let inside = |x: usize| a.min(b) < x && x < a.max(b);
                    inside(c) == inside(d)
                })
            })
        })
        .count() as i64
}

fn word(labels: &[u8], symbol: fn(u32) -> BasisSymbol) -> NCPoly {
    labels.iter().fold(NCPoly::one(), |f, &l| f.mul(&NCPoly::symbol(symbol(l as u32))))
}

fn labels() -> impl Strategy<Value = Vec<u8>> {
    (1usize..=5).prop_flat_map(|h| prop::collection::vec(0u8..3, 2 * h))
}

fn rotate(f: &NCPoly) -> NCPoly {
    let (m, _) = f.terms().next().expect("a monomial");
    let (mats, vars) = (m.mats(), m.vars());
    let r = vars.len();
    let mut new_mats: Vec<MatProduct> = mats[1..r].to_vec();
    new_mats.push(mats[r].mul(&mats[0]));
    new_mats.push(MatProduct::identity());
    let mut new_vars = vars[1..].to_vec();
    new_vars.push(vars[0].clone());
    NCPoly::from_monomial(Monomial::from_parts(new_mats, new_vars).unwrap())
}

fn swap_identities() -> LinearMap {
    LinearMap::new("swap", |s| {
        let other = 1 - s.index().min(1);
        Ok(VecExpr::basis(if s.flavor() == ncgenus::ncpoly::Flavor::Gue { BasisSymbol::gue(other) } else { BasisSymbol::w(other) }))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn gue_words_match_wick(l in labels()) {
        prop_assert_eq!(expected_trace_poly(&word(&l, BasisSymbol::gue)).unwrap(), gue_oracle(&l));
    }

    #[test]
    fn semicircular_words_count_noncrossing_pairings(l in labels()) {
        let f = word(&l, BasisSymbol::w);
        let want = Scalar::from_int(semi_oracle(&l));
        prop_assert_eq!(semicircular_trace(&f).unwrap(), want.clone());
        prop_assert_eq!(expected_trace_poly(&f).unwrap(), MomentPoly::constant(want));
    }

    #[test]
    fn cyclic_invariance(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 8).remove(0);
        prop_assert_eq!(expected_trace_poly(&rotate(&f)).unwrap(), expected_trace_poly(&f).unwrap());
    }

    #[test]
    fn relabeling_invariance(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 8).remove(0);
        let g = pushforward(&swap_identities(), &f).unwrap();
        prop_assert_eq!(expected_trace_poly(&g).unwrap(), expected_trace_poly(&f).unwrap());
    }

    #[test]
    fn genus_degree_bound(seed in any::<u64>()) {
        let f = corpus::random_corpus(seed, 1, 8).remove(0);
        let d = f.degree().unwrap();
        if let Some(top) = expected_trace_poly(&f).unwrap().degree() {
            prop_assert!(top as usize <= d / 4, "{f}: ν^{top} with degree {d}");
        }
    }

    #[test]
    fn engines_agree(seed in any::<u64>(), n in 1usize..=7) {
        let sys = corpus::random_system(n, &mut corpus::rng(seed)).unwrap();
        prop_assert_eq!(expected_trace_genus(&sys).unwrap(), expected_trace_ibp(&sys).unwrap());
    }

    #[test]
    fn coefficient_reduction(seed in any::<u64>(), half in 1usize..=5) {
        let mut rng = corpus::rng(seed);
        let dom = IndexSet::interval(1, 2 * half);
        let sigma = lemmas::random_perm(&mut rng, &dom);
        let pi = lemmas::random_pairing(&mut rng, &dom).unwrap();
        let pairs = pi.pairs();
        let t = pairs[rng.gen_range(0..pairs.len())];
        let tau = Perm::transposition(dom.clone(), t).unwrap();
        let pi_rest = pi.perm().restrict(&dom.without(&[t.0, t.1])).unwrap();
        let z: BTreeMap<usize, MatProduct> = dom.as_slice().iter().map(|&k| (k, MatProduct::formal(k as u32))).collect();
        prop_assert!(lemmas::update_z_holds(&sigma, &tau, &pi_rest, &z).unwrap());
    }
}

#[test]
fn two_trace_variance() {
    // E[tr X² tr X²] = 1 + 2ν: the connected part is Var(Tr X²)/N² = 2/N²
    let x = |id| (BasisSymbol::gue(id), MatProduct::identity());
    let sys = TracedWordSystem::from_traces(&[vec![x(0), x(0)], vec![x(0), x(0)]]).unwrap();
    assert_eq!(expected_trace_genus(&sys).unwrap(), MomentPoly::from_ints(&[1, 2]));
    assert_eq!(expected_trace_ibp(&sys).unwrap(), MomentPoly::from_ints(&[1, 2]));
    let indep = TracedWordSystem::from_traces(&[vec![x(0), x(0)], vec![x(1), x(1)]]).unwrap();
    assert_eq!(expected_trace_genus(&indep).unwrap(), MomentPoly::from_ints(&[1]));
}
