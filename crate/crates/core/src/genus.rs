//! Expected traces of words in GUE matrices and free semicirculars, as exact
//! polynomials in `ν = 1/N²`.
//!
//! Two independent evaluators are provided: the closed-form sum over
//! label-compatible pairings weighted by `ν^genus`, and a recursive
//! integration-by-parts evaluator that removes one pair at a time.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ncpoly::{expand_to_basis, BasisSymbol, Flavor, LinearMap, NCPoly};
use crate::perms::{self, IndexSet, Labeling, Perm, Transposition};
use crate::scalars::{MatProduct, MomentPoly, Scalar};

static CORRUPT_GENUS: AtomicBool = AtomicBool::new(false);

/// Mutation hook for the self-test: when set, the pairing-sum engine
/// miscounts the genus.
#[doc(hidden)]
pub fn set_genus_fault(on: bool) {
    CORRUPT_GENUS.store(on, Ordering::SeqCst);
}

fn twice_genus(sigma: &[usize], pi: &[usize]) -> i64 {
    let g = perms::dense_twice_genus(sigma, pi);
    if CORRUPT_GENUS.load(Ordering::Relaxed) {
        // forget the #Cyc σ term
        g - perms::dense_cycle_count(sigma) as i64
    } else {
        g
    }
}

/// `E[∏_{γ ∈ Cyc σ} tr(∏_{k∈γ} Y_k Z_k)]` data: each index carries a random
/// letter `Y_k` (identified by its basis symbol, whose flavor decides GUE
/// versus semicircular) followed by a deterministic letter `Z_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TracedWordSystem {
    pub sigma: Perm,
    pub labels: Labeling<BasisSymbol>,
    pub z: BTreeMap<usize, MatProduct>,
    /// Scalar multiplying the whole expectation.
    pub prefactor: Scalar,
}

impl TracedWordSystem {
    /// One trace factor per list; indices are numbered `1, 2, …` in reading
    /// order.
    pub fn from_traces(factors: &[Vec<(BasisSymbol, MatProduct)>]) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut labels = BTreeMap::new();
        let mut z = BTreeMap::new();
        let mut next = 1;
        for f in factors {
            if f.is_empty() {
                return Err(Error::EmptyTraceWord);
            }
            let mut cyc = Vec::new();
            for (y, m) in f {
                labels.insert(next, y.clone());
                z.insert(next, m.clone());
                cyc.push(next);
                next += 1;
            }
            cycles.push(cyc);
        }
        let sigma = Perm::from_cycles(IndexSet::interval(1, next - 1), &cycles)?;
        Ok(TracedWordSystem { sigma, labels: Labeling(labels), z, prefactor: Scalar::one() })
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    fn validate(&self) -> Result<()> {
        let dom = self.sigma.domain().as_slice();
        if !dom.iter().eq(self.labels.0.keys()) || !dom.iter().eq(self.z.keys()) {
            return Err(Error::DomainMismatch("labels and letters must cover the index set exactly".into()));
        }
        Ok(())
    }

    fn flavor(&self, k: usize) -> Flavor {
        self.labels.0[&k].flavor()
    }
}

/// `Z^{σ,τ}` and `λ_{σ,τ}`: the letters of the surgery `σ∖τ` absorb the
/// letters of `supp τ` along `τσ`, and cycles of `τσ` inside `supp τ`
/// become trace factors. With `supp τ = S` every letter ends in `λ`.
pub fn reduce_coeffs(
    sigma: &Perm,
    tau: &Perm,
    z: &BTreeMap<usize, MatProduct>,
) -> Result<(BTreeMap<usize, MatProduct>, Scalar)> {
    let supp = tau.support();
    let ts = |k: usize| {
        let s = sigma.apply(k);
        tau.try_apply(s).unwrap_or(s)
    };
    let mut reduced = BTreeMap::new();
    for &k in sigma.domain().as_slice() {
        if supp.contains(&k) {
            continue;
        }
        let mut prod = z[&k].clone();
        let mut x = ts(k);
        while supp.contains(&x) {
            prod = prod.mul(&z[&x]);
            x = ts(x);
        }
        reduced.insert(k, prod);
    }
    // cycles of τσ lying inside supp τ
    let mut lambda = Scalar::one();
    let mut seen: Vec<usize> = Vec::new();
    for &k in &supp {
        if seen.contains(&k) {
            continue;
        }
        let mut cyc = vec![k];
        let mut x = ts(k);
        while x != k {
            cyc.push(x);
            x = ts(x);
        }
        seen.extend(&cyc);
        if cyc.iter().all(|c| supp.contains(c)) {
            let prod = cyc.iter().fold(MatProduct::identity(), |p, c| p.mul(&z[c]));
            lambda = &lambda * &Scalar::trace_of(&prod);
        }
    }
    Ok((reduced, lambda))
}

/// Dense view of a system on positions `0..n`.
struct Dense {
    sigma: Vec<usize>,
    label: Vec<usize>,
    semi: Vec<bool>,
    cycle: Vec<usize>,
    pos: Vec<usize>,
    z: Vec<MatProduct>,
}

impl Dense {
    fn new(sys: &TracedWordSystem) -> Self {
        let dom = sys.sigma.domain();
        let sigma = sys.sigma.dense();
        let mut ids: BTreeMap<&BasisSymbol, usize> = BTreeMap::new();
        let label = dom
            .as_slice()
            .iter()
            .map(|k| {
                let n = ids.len();
                *ids.entry(&sys.labels.0[k]).or_insert(n)
            })
            .collect();
        let semi = dom.as_slice().iter().map(|&k| sys.flavor(k) == Flavor::Semi).collect();
        let n = sigma.len();
        let (mut cycle, mut pos) = (vec![usize::MAX; n], vec![0; n]);
        let mut c = 0;
        for s in 0..n {
            if cycle[s] != usize::MAX {
                continue;
            }
            let (mut x, mut p) = (s, 0);
            while cycle[x] == usize::MAX {
                cycle[x] = c;
                pos[x] = p;
                p += 1;
                x = sigma[x];
            }
            c += 1;
        }
        let z = dom.as_slice().iter().map(|k| sys.z[k].clone()).collect();
        Dense { sigma, label, semi, cycle, pos, z }
    }

    /// Label-compatible pairings whose semicircular part is noncrossing.
    fn admissible_pairings(&self) -> Vec<Vec<usize>> {
        let n = self.sigma.len();
        let mut out = Vec::new();
        if n % 2 == 1 {
            return out;
        }
        let mut pi = vec![usize::MAX; n];
        let mut semi_pairs = Vec::new();
        self.extend(&mut pi, &mut semi_pairs, &mut out);
        out
    }

    fn extend(&self, pi: &mut Vec<usize>, semi_pairs: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<usize>>) {
        let Some(a) = pi.iter().position(|&p| p == usize::MAX) else {
            out.push(pi.clone());
            return;
        };
        for b in a + 1..pi.len() {
            if pi[b] != usize::MAX || self.label[b] != self.label[a] {
                continue;
            }
            if self.semi[a] {
                if self.cycle[a] != self.cycle[b] || semi_pairs.iter().any(|&(c, d)| self.crosses((a, b), (c, d))) {
                    continue;
                }
                semi_pairs.push((a, b));
            }
            pi[a] = b;
            pi[b] = a;
            self.extend(pi, semi_pairs, out);
            pi[a] = usize::MAX;
            pi[b] = usize::MAX;
            if self.semi[a] {
                semi_pairs.pop();
            }
        }
    }

    fn crosses(&self, (a, b): (usize, usize), (c, d): (usize, usize)) -> bool {
        if self.cycle[c] != self.cycle[a] {
            return false;
        }
        let (lo, hi) = if self.pos[a] < self.pos[b] { (self.pos[a], self.pos[b]) } else { (self.pos[b], self.pos[a]) };
        let inside = |x: usize| lo < self.pos[x] && self.pos[x] < hi;
        inside(c) != inside(d)
    }

    /// `ν^g ∏_{γ ∈ Cyc(πσ)} tr(∏_{k∈γ} Z_k)` for one pairing.
    fn contribution(&self, pi: &[usize]) -> Result<MomentPoly> {
        let twice = twice_genus(&self.sigma, pi);
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::Internal(format!("pairing genus {twice}/2 is not a nonnegative integer")));
        }
        let n = pi.len();
        let mut seen = vec![false; n];
        let mut weight = Scalar::one();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut prod = MatProduct::identity();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                prod = prod.mul(&self.z[x]);
                x = pi[self.sigma[x]];
            }
            weight = &weight * &Scalar::trace_of(&prod);
        }
        Ok(MomentPoly::monomial((twice / 2) as u32, weight))
    }
}

fn sum_results(a: Result<MomentPoly>, b: Result<MomentPoly>) -> Result<MomentPoly> {
    Ok(&a? + &b?)
}

/// The pairing sum: label-compatible pairings whose restriction to the
/// semicircular letters is σ-noncrossing, each weighted by `ν^{g(σ,π)}`
/// and the traces of `Z` along the cycles of `πσ`.
pub fn expected_trace_genus(sys: &TracedWordSystem) -> Result<MomentPoly> {
    expected_trace_genus_with(sys, Exec::default())
}

pub fn expected_trace_genus_with(sys: &TracedWordSystem, exec: Exec) -> Result<MomentPoly> {
    sys.validate()?;
    if sys.is_empty() {
        return Ok(MomentPoly::constant(sys.prefactor.clone()));
    }
    let dense = Dense::new(sys);
    let pairings = dense.admissible_pairings();
    let total = exec.map_reduce(&pairings, |pi| dense.contribution(pi), || Ok(MomentPoly::zero()), sum_results)?;
    Ok(total.scale(&sys.prefactor))
}

/// Recursive evaluator. Semicircular letters go first: the minimal one is
/// paired with each same-symbol partner in its own cycle (free
/// integration by parts). Once only GUE letters remain, the minimal index
/// `m` is paired with every same-symbol `q`, with weight `ν` when `(m q)`
/// joins two cycles (Gaussian integration by parts). Each step recurses on
/// `σ∖(m q)` with the absorbed letters.
pub fn expected_trace_ibp(sys: &TracedWordSystem) -> Result<MomentPoly> {
    sys.validate()?;
    let p = ibp(&sys.sigma, &sys.labels.0, &sys.z)?;
    Ok(p.scale(&sys.prefactor))
}

fn ibp(sigma: &Perm, labels: &BTreeMap<usize, BasisSymbol>, z: &BTreeMap<usize, MatProduct>) -> Result<MomentPoly> {
    let Some(first) = sigma.domain().min() else {
        return Ok(MomentPoly::from_int(1));
    };
    let m = labels.iter().find(|(_, y)| y.flavor() == Flavor::Semi).map_or(first, |(k, _)| *k);
    let semi = labels[&m].flavor() == Flavor::Semi;
    let same_cycle = perms::cycle_of(sigma, m)?;
    let mut total = MomentPoly::zero();
    for &q in sigma.domain().as_slice() {
        if q == m || labels[&q] != labels[&m] {
            continue;
        }
        let bridge = !same_cycle.contains(&q);
        if bridge && semi {
            continue;
        }
        let t = Transposition::new(m, q)?;
        let tau = Perm::transposition(sigma.domain().clone(), t)?;
        let (reduced, lambda) = reduce_coeffs(sigma, &tau, z)?;
        let rest = if sigma.len() == 2 {
            MomentPoly::from_int(1)
        } else {
            let next = perms::take_transposition(sigma, t)?;
            let sub: BTreeMap<usize, BasisSymbol> =
                labels.iter().filter(|(k, _)| **k != m && **k != q).map(|(k, v)| (*k, v.clone())).collect();
            ibp(&next, &sub, &reduced)?
        };
        total = &total + &rest.scale(&lambda).shift(u32::from(bridge));
    }
    Ok(total)
}

/// One traced system per basis word of `f` (the single cycle `(1 … r)`,
/// with the leading matrix letter absorbed into the last), summed with
/// the word coefficients.
pub fn expected_trace_poly(f: &NCPoly) -> Result<MomentPoly> {
    expected_trace_poly_with(f, Exec::default())
}

pub fn expected_trace_poly_with(f: &NCPoly, exec: Exec) -> Result<MomentPoly> {
    f.concrete_dim()?;
    let basis = expand_to_basis(f);
    let words: Vec<_> = basis.words().collect();
    exec.map_reduce(
        &words,
        |w| {
            let sys = word_system(&w.mono)?;
            Ok(expected_trace_genus_with(&sys, Exec::Sequential)?.scale(&w.coeff))
        },
        || Ok(MomentPoly::zero()),
        sum_results,
    )
}

/// The traced system of a basis monomial `M₀ x₁ M₁ ⋯ x_r M_r`.
pub fn word_system(mono: &crate::ncpoly::Monomial) -> Result<TracedWordSystem> {
    if mono.degree() == 0 {
        let sigma = Perm::identity(IndexSet::default());
        return Ok(TracedWordSystem {
            sigma,
            labels: Labeling(BTreeMap::new()),
            z: BTreeMap::new(),
            prefactor: Scalar::trace_of(&mono.mats()[0]),
        });
    }
    let letters = mono
        .vars()
        .iter()
        .map(|v| v.as_basis().cloned().ok_or_else(|| Error::Internal(format!("letter {v} not a basis symbol"))))
        .collect::<Result<Vec<_>>>()?;
    TracedWordSystem::from_traces(&[letters.into_iter().zip(mono.cyclic_mats()).collect()])
}

/// `tr f` with every variable semicircular: the `ν⁰` part of the pairing
/// sum, which must be the whole answer.
pub fn semicircular_trace(f: &NCPoly) -> Result<Scalar> {
    semicircular_trace_with(f, Exec::default())
}

pub fn semicircular_trace_with(f: &NCPoly, exec: Exec) -> Result<Scalar> {
    let semi = crate::ncpoly::pushforward(&LinearMap::semicircular(), f)?;
    let p = expected_trace_poly_with(&semi, exec)?;
    if p.degree().is_some_and(|d| d > 0) {
        return Err(Error::Internal(format!("semicircular trace produced ν terms: {p}")));
    }
    Ok(p.coeff(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncpoly::parse_word;

    fn both(sys: &TracedWordSystem) -> MomentPoly {
        let a = expected_trace_genus(sys).unwrap();
        let b = expected_trace_ibp(sys).unwrap();
        assert_eq!(a, b, "engines disagree");
        a
    }

    fn single(letters: Vec<BasisSymbol>) -> TracedWordSystem {
        TracedWordSystem::from_traces(&[letters.into_iter().map(|y| (y, MatProduct::identity())).collect()]).unwrap()
    }

    #[test]
    fn spec_examples() {
        let g = BasisSymbol::gue(0);
        let s = BasisSymbol::w(0);
        assert_eq!(both(&single(vec![g.clone(); 2])), MomentPoly::from_ints(&[1]));
        assert_eq!(both(&single(vec![g.clone(); 4])), MomentPoly::from_ints(&[2, 1]));
        assert_eq!(both(&single(vec![s.clone(); 4])), MomentPoly::from_ints(&[2]));
        assert_eq!(both(&single(vec![g.clone(), s.clone(), g.clone(), s])), MomentPoly::from_ints(&[0, 1]));
        assert!(both(&single(vec![g])).is_zero());
    }

    #[test]
    fn poly_examples() {
        let e = |w: &str| expected_trace_poly(&parse_word(w).unwrap()).unwrap();
        assert_eq!(e("g0^6"), MomentPoly::from_ints(&[5, 10]));
        assert_eq!(e("g0^8"), MomentPoly::from_ints(&[14, 70, 21]));
        assert_eq!(e("Z1"), MomentPoly::constant(Scalar::trace_of(&MatProduct::formal(1))));
        assert_eq!(e("[1,0;0,3]"), MomentPoly::from_int(2));
        assert!(matches!(
            expected_trace_poly(&parse_word("[1,0;0,3] g0 [1,0,0;0,2,0;0,0,1]").unwrap()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn semicircular_examples() {
        let s = |w: &str| semicircular_trace(&parse_word(w).unwrap()).unwrap();
        assert_eq!(s("g0^4"), Scalar::from_int(2));
        assert_eq!(s("g0^2"), Scalar::from_int(1));
        assert!(s("g0 g1 g0 g1").is_zero());
    }

    #[test]
    fn reduction_examples() {
        let z: BTreeMap<usize, MatProduct> = (1..=2).map(|k| (k, MatProduct::formal(k as u32))).collect();
        let dom = IndexSet::interval(1, 2);
        let id = Perm::identity(dom.clone());
        let (r, l) = reduce_coeffs(&id, &id, &z).unwrap();
        assert_eq!((r, l), (z.clone(), Scalar::one()));
        let tau = Perm::transposition(dom, Transposition(1, 2)).unwrap();
        let (r, l) = reduce_coeffs(&id, &tau, &z).unwrap();
        assert!(r.is_empty());
        assert_eq!(l, Scalar::trace_of(&MatProduct::formal(1).mul(&MatProduct::formal(2))));
    }

    #[test]
    fn multi_trace() {
        // E[tr(X) tr(X)] = ν
        let g = BasisSymbol::gue(0);
        let sys = TracedWordSystem::from_traces(&[
            vec![(g.clone(), MatProduct::identity())],
            vec![(g, MatProduct::identity())],
        ])
        .unwrap();
        assert_eq!(both(&sys), MomentPoly::from_ints(&[0, 1]));
    }
}
