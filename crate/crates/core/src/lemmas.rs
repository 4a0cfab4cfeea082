//! Executable forms of the surgery identities for `σ∖τ`, the genus update
//! rule and the coefficient reduction, together with random instance
//! generators.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::genus::reduce_coeffs;
use crate::perms::{self, IndexSet, PairPerm, Perm, Transposition};
use crate::scalars::{MatProduct, Scalar};

pub fn random_perm<R: Rng + ?Sized>(rng: &mut R, domain: &IndexSet) -> Perm {
    let mut images = domain.as_slice().to_vec();
    images.shuffle(rng);
    Perm::new(domain.clone(), images).expect("shuffle of the domain")
}

/// Uniform pairing of an even-sized set.
pub fn random_pairing<R: Rng + ?Sized>(rng: &mut R, domain: &IndexSet) -> Result<PairPerm> {
    let mut items = domain.as_slice().to_vec();
    items.shuffle(rng);
    let pairs: Vec<(usize, usize)> = items.chunks(2).map(|c| (c[0], c[1])).collect();
    PairPerm::from_pairs(domain.clone(), &pairs)
}

fn as_perm(domain: &IndexSet, ts: &[Transposition]) -> Result<Perm> {
    let cycles: Vec<Vec<usize>> = ts.iter().map(|t| vec![t.0, t.1]).collect();
    Perm::from_cycles(domain.clone(), &cycles)
}

/// `g(σ,π) − g(σ∖τ, π|_{S∖supp τ}) = [τ is a σ-bridge]` for a pair `τ` of `π`.
pub fn genus_update_holds(sigma: &Perm, pi: &PairPerm, t: Transposition) -> Result<bool> {
    let rest = sigma.domain().without(&[t.0, t.1]);
    let before = perms::genus(sigma, pi.perm())?;
    let after = perms::genus(&perms::take_transposition(sigma, t)?, &pi.perm().restrict(&rest)?)?;
    let jump = i64::from(perms::is_bridge_pair(sigma, t)?);
    Ok(before.twice() - after.twice() == 2 * jump)
}

/// `(σ∖τ)⁻¹ = σ⁻¹∖τ⁻¹`.
pub fn takeaway_inverse_holds(sigma: &Perm, tau: &Perm) -> Result<bool> {
    Ok(perms::take(sigma, tau)?.inverse() == perms::take(&sigma.inverse(), &tau.inverse())?)
}

/// `(σ∖τ)∖τ′ = σ∖ττ′ = (σ∖τ′)∖τ` for disjoint transpositions.
pub fn takeaway_compose_holds(sigma: &Perm, t: Transposition, t2: Transposition) -> Result<bool> {
    let dom = sigma.domain();
    let after_t = perms::take_transposition(sigma, t)?;
    let after_t2 = perms::take_transposition(sigma, t2)?;
    let a = perms::take_transposition(&after_t, t2)?;
    let b = perms::take(sigma, &as_perm(dom, &[t, t2])?)?;
    let c = perms::take_transposition(&after_t2, t)?;
    Ok(a == b && b == c)
}

/// Cycle id of every point of a permutation.
fn cycle_ids(p: &Perm) -> HashMap<usize, usize> {
    let mut out = HashMap::new();
    for (id, cyc) in p.cycles().into_iter().enumerate() {
        for k in cyc {
            out.insert(k, id);
        }
    }
    out
}

/// On `{0,1}×(S∖supp τ)`, the cycles of `τ′τ ⋈ σ` and of `τ′ ⋈ (σ∖τ)`
/// induce the same partition. `tau2` lives on `S` with support disjoint
/// from `tau`.
pub fn takeaway_bowtie_holds(sigma: &Perm, tau: &Perm, tau2: &Perm) -> Result<bool> {
    let dom = sigma.domain();
    let rest = dom.without(&tau.support());
    let big = perms::bowtie(&tau2.compose(tau)?, sigma)?;
    let small = perms::bowtie(&tau2.restrict(&rest)?, &perms::take(sigma, tau)?)?;
    let (ib, is) = (cycle_ids(&big), cycle_ids(&small));
    let points: Vec<usize> = rest.as_slice().iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
    for (i, &x) in points.iter().enumerate() {
        for &y in &points[i + 1..] {
            if (ib[&x] == ib[&y]) != (is[&x] == is[&y]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `∏_{γ ∈ Cyc(πσ)} tr(∏_{k∈γ} Z_k)`.
pub fn trace_product(sigma: &Perm, pi: &Perm, z: &BTreeMap<usize, MatProduct>) -> Result<Scalar> {
    let mut out = Scalar::one();
    for cyc in pi.compose(sigma)?.cycles() {
        let mut prod = MatProduct::identity();
        for k in cyc {
            prod = prod.mul(&z[&k]);
        }
        out = out * Scalar::trace_of(&prod);
    }
    Ok(out)
}

/// With `π = τ` on `supp τ` and `π′` elsewhere, the trace product of
/// `(σ, π, Z)` equals `λ_{σ,τ}` times that of `(σ∖τ, π′, Z^{σ,τ})`.
pub fn update_z_holds(sigma: &Perm, tau: &Perm, pi_rest: &Perm, z: &BTreeMap<usize, MatProduct>) -> Result<bool> {
    let dom = sigma.domain();
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in dom.as_slice() {
        map.insert(k, tau.try_apply(k).filter(|_| tau.support().contains(&k)).unwrap_or_else(|| pi_rest.apply(k)));
    }
    let pi = Perm::from_map(&map)?;
    let lhs = trace_product(sigma, &pi, z)?;
    let (reduced, lambda) = reduce_coeffs(sigma, tau, z)?;
    let rhs = if reduced.is_empty() {
        lambda
    } else {
        lambda * trace_product(&perms::take(sigma, tau)?, pi_rest, &reduced)?
    };
    Ok(lhs == rhs)
}

/// Outcome counts of a batch of lemma checks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LemmaTally {
    pub checks: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl LemmaTally {
    fn record(&mut self, ok: Result<bool>, what: impl FnOnce() -> String) {
        self.checks += 1;
        let bad = match ok {
            Ok(true) => None,
            Ok(false) => Some(what()),
            Err(e) => Some(format!("{}: {e}", what())),
        };
        if let Some(msg) = bad {
            self.failures += 1;
            self.first_failure.get_or_insert(msg);
        }
    }
}

/// Runs every surgery identity on `instances` random `(σ, π, τ, τ′)`
/// draws with `#S` even in `4..=max_len`.
pub fn random_lemma_suite<R: Rng + ?Sized>(rng: &mut R, instances: usize, max_len: usize) -> Result<LemmaTally> {
    let mut tally = LemmaTally::default();
    for _ in 0..instances {
        let n = 2 * rng.gen_range(2..=max_len / 2);
        let dom = IndexSet::interval(1, n);
        let sigma = random_perm(rng, &dom);
        let pi = random_pairing(rng, &dom)?;
        let pairs = pi.pairs();
        let t = pairs[rng.gen_range(0..pairs.len())];
        let t2 = *pairs.iter().find(|u| **u != t).expect("at least two pairs");
        let tau = Perm::transposition(dom.clone(), t)?;
        let tau2 = Perm::transposition(dom.clone(), t2)?;
        let ctx = || format!("σ = {sigma}, π = {pi}, τ = ({} {}), τ′ = ({} {})", t.0, t.1, t2.0, t2.1);
        tally.record(genus_update_holds(&sigma, &pi, t), || format!("genus update: {}", ctx()));
        tally.record(takeaway_inverse_holds(&sigma, &tau), || format!("surgery inverse: {}", ctx()));
        if n > 4 {
            tally.record(takeaway_compose_holds(&sigma, t, t2), || format!("surgery composition: {}", ctx()));
        }
        tally.record(takeaway_bowtie_holds(&sigma, &tau, &tau2), || format!("surgery ⋈ partition: {}", ctx()));
        let z: BTreeMap<usize, MatProduct> = dom.as_slice().iter().map(|&k| (k, MatProduct::formal(k as u32))).collect();
        let rest = dom.without(&[t.0, t.1]);
        let pi_rest = pi.perm().restrict(&rest)?;
        tally.record(update_z_holds(&sigma, &tau, &pi_rest, &z), || format!("coefficient reduction: {}", ctx()));
    }
    Ok(tally)
}
