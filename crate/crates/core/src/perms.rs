//! Permutations of finite index sets and the cycle predicates used by the
//! genus expansion: bridges, crosses, noncrossing pairings, the `⋈`
//! construction, the genus, and the `σ∖τ` surgery.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Strictly increasing list of indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(mut items: Vec<usize>) -> Result<Self> {
        items.sort_unstable();
        if items.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Perm(format!("repeated index in {items:?}")));
        }
        Ok(IndexSet(items))
    }

    /// `{0, …, n-1}`
    pub fn range(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    /// `{lo, …, hi}` inclusive.
    pub fn interval(lo: usize, hi: usize) -> Self {
        IndexSet((lo..=hi).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0.binary_search(&k).is_ok()
    }

    pub fn position(&self, k: usize) -> Option<usize> {
        self.0.binary_search(&k).ok()
    }

    pub fn min(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn without(&self, remove: &[usize]) -> IndexSet {
        IndexSet(self.0.iter().copied().filter(|k| !remove.contains(k)).collect())
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.0.iter().all(|&k| other.contains(k))
    }
}

/// A permutation of an [`IndexSet`]. `images[p]` is the image of the
/// `p`-th element of the domain.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    domain: IndexSet,
    images: Vec<usize>,
}

/// Transposition `(a b)` with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Transposition(pub usize, pub usize);

impl Transposition {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Transposition(a, b)),
            std::cmp::Ordering::Greater => Ok(Transposition(b, a)),
            std::cmp::Ordering::Equal => Err(Error::Perm(format!("({a} {a}) is not a transposition"))),
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.0 == k || self.1 == k
    }

    pub fn is_disjoint(&self, o: &Transposition) -> bool {
        !self.contains(o.0) && !self.contains(o.1)
    }
}

impl Perm {
    pub fn new(domain: IndexSet, images: Vec<usize>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::Perm("image list length differs from domain size".into()));
        }
        let mut seen = vec![false; domain.len()];
        for &y in &images {
            let p = domain
                .position(y)
                .ok_or_else(|| Error::Perm(format!("image {y} outside the domain")))?;
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::Perm(format!("{y} is hit twice")));
            }
        }
        Ok(Perm { domain, images })
    }

    pub fn identity(domain: IndexSet) -> Self {
        let images = domain.0.clone();
        Perm { domain, images }
    }

    pub fn from_map(map: &BTreeMap<usize, usize>) -> Result<Self> {
        let domain = IndexSet(map.keys().copied().collect());
        Perm::new(domain, map.values().copied().collect())
    }

    /// Builds a permutation from disjoint cycles; indices of `domain` not
    /// mentioned are fixed.
    pub fn from_cycles(domain: IndexSet, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images = domain.0.clone();
        let mut touched = vec![false; domain.len()];
        for c in cycles {
            for (k, &x) in c.iter().enumerate() {
                let p = domain
                    .position(x)
                    .ok_or_else(|| Error::Perm(format!("cycle entry {x} outside the domain")))?;
                if std::mem::replace(&mut touched[p], true) {
                    return Err(Error::Perm(format!("{x} appears in two cycles")));
                }
                images[p] = c[(k + 1) % c.len()];
            }
        }
        Ok(Perm { domain, images })
    }

    /// The cycle `(1 2 … n)` on `{1, …, n}`.
    pub fn long_cycle(lo: usize, hi: usize) -> Self {
        let domain = IndexSet::interval(lo, hi);
        let images = (lo..=hi).map(|k| if k == hi { lo } else { k + 1 }).collect();
        Perm { domain, images }
    }

    pub fn transposition(domain: IndexSet, t: Transposition) -> Result<Self> {
        Perm::from_cycles(domain, &[vec![t.0, t.1]])
    }

    /// Parses cycle notation such as `"(1 2 3)(4 5)"` over the given domain.
    pub fn parse_cycles(domain: IndexSet, s: &str) -> Result<Self> {
        let mut cycles = Vec::new();
        for chunk in s.split(')') {
            let chunk = chunk.trim();
            if chunk.is_empty() {
                continue;
            }
            let body = chunk
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("bad cycle notation '{s}'")))?;
            let cyc = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|x| !x.is_empty())
                .map(|x| x.parse::<usize>().map_err(|_| Error::Parse(format!("bad index '{x}'"))))
                .collect::<Result<Vec<_>>>()?;
            if !cyc.is_empty() {
                cycles.push(cyc);
            }
        }
        Perm::from_cycles(domain, &cycles)
    }

    pub fn domain(&self) -> &IndexSet {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    /// Image of `k`; panics when `k` is outside the domain.
    pub fn apply(&self, k: usize) -> usize {
        let p = self.domain.position(k).unwrap_or_else(|| panic!("{k} outside permutation domain"));
        self.images[p]
    }

    pub fn try_apply(&self, k: usize) -> Option<usize> {
        self.domain.position(k).map(|p| self.images[p])
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.len()];
        for (p, &y) in self.images.iter().enumerate() {
            images[self.domain.position(y).expect("bijection")] = self.domain.0[p];
        }
        Perm { domain: self.domain.clone(), images }
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch("composing permutations of different sets".into()));
        }
        let images = other.images.iter().map(|&y| self.apply(y)).collect();
        Ok(Perm { domain: self.domain.clone(), images })
    }

    /// Non-fixed points, increasing.
    pub fn support(&self) -> Vec<usize> {
        self.domain
            .0
            .iter()
            .zip(&self.images)
            .filter(|(k, y)| k != y)
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.domain.0 == self.images
    }

    /// Cycles anchored at their minimum, sorted by minimum; fixed points
    /// are included as singletons.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cyc.push(self.domain.0[p]);
                p = self.domain.position(self.images[p]).expect("bijection");
            }
            out.push(cyc);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        dense_cycle_count(&self.dense())
    }

    /// The permutation on positions `0..len` of the domain.
    pub fn dense(&self) -> Vec<usize> {
        self.images.iter().map(|&y| self.domain.position(y).expect("bijection")).collect()
    }

    pub fn as_transposition(&self) -> Option<Transposition> {
        match self.support()[..] {
            [a, b] => Some(Transposition(a, b)),
            _ => None,
        }
    }

    pub fn is_pairing(&self) -> bool {
        self.domain.0.iter().zip(&self.images).all(|(k, y)| k != y && self.apply(*y) == *k)
    }

    /// Restriction to a union of cycles.
    pub fn restrict(&self, sub: &IndexSet) -> Result<Perm> {
        let mut images = Vec::with_capacity(sub.len());
        for &k in &sub.0 {
            let y = self
                .try_apply(k)
                .ok_or_else(|| Error::DomainMismatch(format!("{k} outside the domain")))?;
            if !sub.contains(y) {
                return Err(Error::Perm(format!("subset is not closed under the permutation ({k} -> {y})")));
            }
            images.push(y);
        }
        Ok(Perm { domain: sub.clone(), images })
    }

    /// Index of the cycle containing each element, in domain order.
    fn cycle_ids(&self) -> Vec<usize> {
        let mut ids = vec![usize::MAX; self.len()];
        for (c, cyc) in self.cycles().iter().enumerate() {
            for &k in cyc {
                ids[self.domain.position(k).expect("in domain")] = c;
            }
        }
        ids
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            let body: Vec<String> = c.iter().map(|k| k.to_string()).collect();
            write!(f, "({})", body.join(" "))?;
        }
        Ok(())
    }
}

/// Fixed-point-free involution.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairPerm(Perm);

impl PairPerm {
    pub fn new(p: Perm) -> Result<Self> {
        if !p.is_pairing() {
            return Err(Error::Perm(format!("{p} is not a fixed-point-free involution")));
        }
        Ok(PairPerm(p))
    }

    pub fn from_pairs(domain: IndexSet, pairs: &[(usize, usize)]) -> Result<Self> {
        let cycles: Vec<Vec<usize>> = pairs.iter().map(|&(a, b)| vec![a, b]).collect();
        PairPerm::new(Perm::from_cycles(domain, &cycles)?)
    }

    pub fn perm(&self) -> &Perm {
        &self.0
    }

    pub fn into_perm(self) -> Perm {
        self.0
    }

    /// The pairs `(a, b)` with `a < b`, sorted.
    pub fn pairs(&self) -> Vec<Transposition> {
        self.0
            .domain
            .0
            .iter()
            .zip(&self.0.images)
            .filter(|(k, y)| k < y)
            .map(|(k, y)| Transposition(*k, *y))
            .collect()
    }
}

impl fmt::Display for PairPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// All fixed-point-free involutions of `s`, pairing the minimum with each
/// candidate in increasing order.
pub fn enumerate_pairings(s: &IndexSet) -> Vec<PairPerm> {
    enumerate_pair_lists(s.len())
        .into_iter()
        .map(|pairs| {
            let mut images = s.0.clone();
            for (a, b) in pairs {
                images[a] = s.0[b];
                images[b] = s.0[a];
            }
            PairPerm(Perm { domain: s.clone(), images })
        })
        .collect()
}

/// Pairings of `0..n` as lists of position pairs, same order as
/// [`enumerate_pairings`].
pub fn enumerate_pair_lists(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(free: &mut Vec<usize>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(cur.clone());
            return;
        }
        let a = free.remove(0);
        for k in 0..free.len() {
            let b = free.remove(k);
            cur.push((a, b));
            rec(free, cur, out);
            cur.pop();
            free.insert(k, b);
        }
        free.insert(0, a);
    }
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        rec(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    }
    out
}

/// `(2m-1)!!` for `n = 2m`, zero for odd `n`.
pub fn pairing_count(n: usize) -> u128 {
    if n % 2 == 1 {
        return 0;
    }
    (1..n).step_by(2).map(|k| k as u128).product()
}

/// A total map from indices to labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling<L>(pub BTreeMap<usize, L>);

impl<L: PartialEq> Labeling<L> {
    pub fn get(&self, k: usize) -> Option<&L> {
        self.0.get(&k)
    }
}

/// `ℓ ∘ p = ℓ`.
pub fn is_compatible<L: PartialEq>(p: &Perm, l: &Labeling<L>) -> Result<bool> {
    if p.domain.len() != l.0.len() || p.domain.0.iter().any(|k| !l.0.contains_key(k)) {
        return Err(Error::DomainMismatch("labeling and permutation have different domains".into()));
    }
    Ok(p.domain.0.iter().all(|&k| l.0[&k] == l.0[&p.apply(k)]))
}

fn expect_transposition(tau: &Perm) -> Result<Transposition> {
    tau.as_transposition()
        .ok_or_else(|| Error::Perm(format!("{tau} is not a transposition")))
}

/// The cycle of `sigma` through `k`, starting at `k`.
pub fn cycle_of(sigma: &Perm, k: usize) -> Result<Vec<usize>> {
    if !sigma.domain.contains(k) {
        return Err(Error::DomainMismatch(format!("{k} outside the domain of {sigma}")));
    }
    let mut cyc = vec![k];
    let mut x = sigma.apply(k);
    while x != k {
        cyc.push(x);
        x = sigma.apply(x);
    }
    Ok(cyc)
}

pub fn is_bridge_pair(sigma: &Perm, t: Transposition) -> Result<bool> {
    let cyc = cycle_of(sigma, t.0)?;
    if !sigma.domain.contains(t.1) {
        return Err(Error::DomainMismatch(format!("{} outside the domain of {sigma}", t.1)));
    }
    Ok(!cyc.contains(&t.1))
}

/// True when the two swapped indices lie in different cycles of `sigma`.
pub fn is_bridge(sigma: &Perm, tau: &Perm) -> Result<bool> {
    is_bridge_pair(sigma, expect_transposition(tau)?)
}

pub fn is_cross_pair(sigma: &Perm, t: Transposition, u: Transposition) -> Result<bool> {
    if !t.is_disjoint(&u) {
        return Err(Error::Perm(format!("({} {}) and ({} {}) are not disjoint", t.0, t.1, u.0, u.1)));
    }
    let cyc = cycle_of(sigma, t.0)?;
    let pos = |k: usize| cyc.iter().position(|&x| x == k);
    let (Some(b), Some(c), Some(d)) = (pos(t.1), pos(u.0), pos(u.1)) else {
        return Ok(false);
    };
    // t.0 sits at position 0; interleaving means exactly one of u's ends lies
    // strictly between the two ends of t
    Ok((c < b) != (d < b))
}

/// Both supports in one cycle of `sigma`, interleaved in its cyclic order.
pub fn is_cross(sigma: &Perm, tau: &Perm, tau2: &Perm) -> Result<bool> {
    is_cross_pair(sigma, expect_transposition(tau)?, expect_transposition(tau2)?)
}

/// No cycle of `pi` is a `sigma`-bridge and no two cycles form a
/// `sigma`-cross. `pi` may live on a subset of `sigma`'s domain.
pub fn is_noncrossing(pi: &PairPerm, sigma: &Perm) -> Result<bool> {
    if !pi.0.domain.is_subset(&sigma.domain) {
        return Err(Error::DomainMismatch("pairing domain not inside the permutation domain".into()));
    }
    Ok(noncrossing_pairs(sigma, &pi.pairs()))
}

/// Noncrossing test on an explicit list of disjoint pairs.
pub fn noncrossing_pairs(sigma: &Perm, pairs: &[Transposition]) -> bool {
    let ids = sigma.cycle_ids();
    let order = cyclic_positions(sigma);
    let cid = |k: usize| ids[sigma.domain.position(k).expect("in domain")];
    let pos = |k: usize| order[sigma.domain.position(k).expect("in domain")];
    for (i, t) in pairs.iter().enumerate() {
        if cid(t.0) != cid(t.1) {
            return false;
        }
        let (a, b) = minmax(pos(t.0), pos(t.1));
        for u in &pairs[i + 1..] {
            if cid(u.0) != cid(t.0) {
                continue;
            }
            let (pc, pd) = (pos(u.0), pos(u.1));
            if (a < pc && pc < b) != (a < pd && pd < b) {
                return false;
            }
        }
    }
    true
}

fn minmax(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Position of each element inside its cycle (cycles anchored at their
/// minimum), in domain order.
fn cyclic_positions(sigma: &Perm) -> Vec<usize> {
    let mut pos = vec![0; sigma.len()];
    for cyc in sigma.cycles() {
        for (p, &k) in cyc.iter().enumerate() {
            pos[sigma.domain.position(k).expect("in domain")] = p;
        }
    }
    pos
}

/// `(π ⋈ σ)(0,k) = (1,σ(k))`, `(π ⋈ σ)(1,k) = (0,π(k))`, with `(b,k)`
/// encoded as `2k + b`.
pub fn bowtie(pi: &Perm, sigma: &Perm) -> Result<Perm> {
    if pi.domain != sigma.domain {
        return Err(Error::DomainMismatch("⋈ of permutations on different sets".into()));
    }
    let mut map = BTreeMap::new();
    for &k in &sigma.domain.0 {
        map.insert(2 * k, 2 * sigma.apply(k) + 1);
        map.insert(2 * k + 1, 2 * pi.apply(k));
    }
    Perm::from_map(&map)
}

/// `(b, k)` from the encoded index used by [`bowtie`].
pub fn bowtie_decode(x: usize) -> (usize, usize) {
    (x % 2, x / 2)
}

/// Number of cycles of a permutation of `0..n` given as an image array.
pub fn dense_cycle_count(p: &[usize]) -> usize {
    let mut seen = vec![false; p.len()];
    let mut count = 0;
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
        }
    }
    count
}

/// `#Cyc(π ⋈ σ)` on dense arrays over `0..n`.
pub fn dense_bowtie_cycles(pi: &[usize], sigma: &[usize]) -> usize {
    let n = sigma.len();
    let mut seen = vec![false; 2 * n];
    let mut count = 0;
    for s in 0..2 * n {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            let k = x / 2;
            x = if x % 2 == 0 { 2 * sigma[k] + 1 } else { 2 * pi[k] };
        }
    }
    count
}

/// `2g = #S + #Cyc σ − #Cyc π − #Cyc(π⋈σ)` on dense arrays.
pub fn dense_twice_genus(sigma: &[usize], pi: &[usize]) -> i64 {
    sigma.len() as i64 + dense_cycle_count(sigma) as i64
        - dense_cycle_count(pi) as i64
        - dense_bowtie_cycles(pi, sigma) as i64
}

/// A half-integer `numer / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInteger(pub i64);

impl HalfInteger {
    pub fn twice(&self) -> i64 {
        self.0
    }

    pub fn as_integer(&self) -> Option<i64> {
        (self.0 % 2 == 0).then_some(self.0 / 2)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_integer() {
            Some(n) => write!(f, "{n}"),
            None => write!(f, "{}/2", self.0),
        }
    }
}

/// The combinatorial genus `g(σ, π)`.
pub fn genus(sigma: &Perm, pi: &Perm) -> Result<HalfInteger> {
    if pi.domain != sigma.domain {
        return Err(Error::DomainMismatch("genus of permutations on different sets".into()));
    }
    Ok(HalfInteger(dense_twice_genus(&sigma.dense(), &pi.dense())))
}

/// Genus of a pairing, asserting it is a nonnegative integer.
pub fn pairing_genus(sigma: &Perm, pi: &PairPerm) -> Result<u32> {
    let g = genus(sigma, &pi.0)?;
    match g.as_integer() {
        Some(n) if n >= 0 => Ok(n as u32),
        _ => Err(Error::Internal(format!("pairing {pi} has genus {g} relative to {sigma}"))),
    }
}

/// `σ∖τ`: `(σ∖τ)(k) = (τσ)^{r(k)}(k)` with `r(k)` the first return outside
/// `supp τ`. Here `tau` is any permutation whose support lies in `sigma`'s
/// domain.
pub fn take(sigma: &Perm, tau: &Perm) -> Result<Perm> {
    take_support(sigma, &tau.support(), |k| tau.try_apply(k).unwrap_or(k))
}

fn take_support(sigma: &Perm, supp: &[usize], tau: impl Fn(usize) -> usize) -> Result<Perm> {
    if supp.iter().any(|&k| !sigma.domain.contains(k)) {
        return Err(Error::DomainMismatch("support of τ not inside the domain of σ".into()));
    }
    let rest = sigma.domain.without(supp);
    if rest.is_empty() {
        return Err(Error::Perm("σ∖τ undefined when τ moves every index".into()));
    }
    let images = rest
        .0
        .iter()
        .map(|&k| {
            let mut x = tau(sigma.apply(k));
            while supp.contains(&x) {
                x = tau(sigma.apply(x));
            }
            x
        })
        .collect();
    Ok(Perm { domain: rest, images })
}

/// `σ∖τ` for a single transposition.
pub fn take_transposition(sigma: &Perm, t: Transposition) -> Result<Perm> {
    let swap = |k: usize| {
        if k == t.0 {
            t.1
        } else if k == t.1 {
            t.0
        } else {
            k
        }
    };
    take_support(sigma, &[t.0, t.1], swap)
}

pub fn restrict(p: &Perm, sub: &IndexSet) -> Result<Perm> {
    p.restrict(sub)
}

/// Number of pairs of `pi` that form a `sigma`-cross with `tau`.
pub fn crss_count(pi: &PairPerm, tau: Transposition, sigma: &Perm) -> Result<usize> {
    let mut n = 0;
    for rho in pi.pairs() {
        if rho == tau {
            continue;
        }
        if !rho.is_disjoint(&tau) {
            return Err(Error::Perm("τ overlaps a pair of π without being one of them".into()));
        }
        if is_cross_pair(sigma, rho, tau)? {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(lo: usize, hi: usize) -> IndexSet {
        IndexSet::interval(lo, hi)
    }

    fn p(dom: IndexSet, c: &str) -> Perm {
        Perm::parse_cycles(dom, c).unwrap()
    }

    fn t(a: usize, b: usize) -> Transposition {
        Transposition::new(a, b).unwrap()
    }

    fn fig1() -> Perm {
        p(s(1, 8), "(1 2 3 4 5)(6 7 8)")
    }

    #[test]
    fn cycle_listing() {
        assert_eq!(fig1().cycles(), vec![vec![1, 2, 3, 4, 5], vec![6, 7, 8]]);
        assert_eq!(Perm::identity(s(1, 2)).cycles(), vec![vec![1], vec![2]]);
        assert_eq!(p(s(1, 4), "(1 3)(2 4)").cycles(), vec![vec![1, 3], vec![2, 4]]);
        assert_eq!(fig1().to_string(), "(1 2 3 4 5)(6 7 8)");
    }

    #[test]
    fn pairing_counts() {
        assert_eq!(enumerate_pairings(&s(1, 4)).len(), 3);
        assert!(enumerate_pairings(&s(1, 3)).is_empty());
        assert_eq!(enumerate_pairings(&s(1, 6)).len(), 15);
        assert_eq!(enumerate_pairings(&s(0, 9)).len() as u128, pairing_count(10));
        for pi in enumerate_pairings(&s(1, 6)) {
            assert!(pi.perm().is_pairing());
        }
    }

    #[test]
    fn compatibility() {
        let l = |v: &[char]| Labeling(v.iter().enumerate().map(|(k, c)| (k + 1, *c)).collect());
        assert!(is_compatible(&p(s(1, 2), "(1 2)"), &l(&['a', 'a'])).unwrap());
        assert!(!is_compatible(&p(s(1, 2), "(1 2)"), &l(&['a', 'b'])).unwrap());
        assert!(is_compatible(&p(s(1, 4), "(1 3)(2 4)"), &l(&['a', 'b', 'a', 'b'])).unwrap());
        assert!(is_compatible(&p(s(1, 4), "(1 3)(2 4)"), &l(&['a', 'b'])).is_err());
    }

    #[test]
    fn bridges_and_crosses() {
        let sg = fig1();
        let tr = |a, b| Perm::transposition(s(1, 8), t(a, b)).unwrap();
        assert!(is_bridge(&sg, &tr(1, 7)).unwrap());
        assert!(!is_bridge(&sg, &tr(2, 4)).unwrap());
        assert!(is_bridge(&Perm::identity(s(1, 2)), &p(s(1, 2), "(1 2)")).unwrap());
        assert!(is_bridge(&sg, &p(s(1, 8), "(1 2 3)")).is_err());
        assert!(is_cross(&sg, &tr(2, 4), &tr(3, 5)).unwrap());
        assert!(!is_cross(&sg, &tr(2, 4), &tr(1, 7)).unwrap());
        assert!(!is_cross(&Perm::long_cycle(1, 4), &p(s(1, 4), "(1 2)"), &p(s(1, 4), "(3 4)")).unwrap());
        assert!(is_cross(&sg, &tr(2, 4), &tr(2, 5)).is_err());
    }

    #[test]
    fn noncrossing_examples() {
        let pi = PairPerm::from_pairs(s(1, 8), &[(1, 7), (2, 4), (3, 5), (6, 8)]).unwrap();
        assert!(!is_noncrossing(&pi, &fig1()).unwrap());
        let c4 = Perm::long_cycle(1, 4);
        assert!(is_noncrossing(&PairPerm::from_pairs(s(1, 4), &[(1, 2), (3, 4)]).unwrap(), &c4).unwrap());
        assert!(!is_noncrossing(&PairPerm::from_pairs(s(1, 4), &[(1, 3), (2, 4)]).unwrap(), &c4).unwrap());
    }

    #[test]
    fn bowtie_examples() {
        let sg = p(s(1, 2), "(1 2)");
        let b = bowtie(&sg, &sg).unwrap();
        // (0,1) -> (1,2) -> (0,1); (0,2) -> (1,1) -> (0,2)
        assert_eq!(b.cycles(), vec![vec![2, 5], vec![3, 4]]);
        let c4 = Perm::long_cycle(1, 4);
        assert_eq!(bowtie(&p(s(1, 4), "(1 3)(2 4)"), &c4).unwrap().num_cycles(), 1);
        assert_eq!(bowtie(&Perm::identity(s(1, 8)), &fig1()).unwrap().num_cycles(), 2);
    }

    #[test]
    fn genus_examples() {
        let c4 = Perm::long_cycle(1, 4);
        assert_eq!(genus(&c4, &p(s(1, 4), "(1 3)(2 4)")).unwrap(), HalfInteger(2));
        assert_eq!(genus(&c4, &p(s(1, 4), "(1 2)(3 4)")).unwrap(), HalfInteger(0));
        assert_eq!(genus(&fig1(), &Perm::identity(s(1, 8))).unwrap(), HalfInteger(0));
    }

    #[test]
    fn take_examples() {
        let c4 = Perm::long_cycle(1, 4);
        let r = take_transposition(&c4, t(1, 3)).unwrap();
        assert_eq!(r, Perm::identity(IndexSet::new(vec![2, 4]).unwrap()));
        let r = take_transposition(&fig1(), t(1, 7)).unwrap();
        assert_eq!(r.cycles().len(), 1);
        assert_eq!(r.to_string(), "(2 3 4 5 8 6)");
        let sg = p(s(1, 2), "(1 2)");
        assert_eq!(take(&sg, &Perm::identity(s(1, 2))).unwrap(), sg);
        assert!(take_transposition(&sg, t(1, 2)).is_err());
    }

    #[test]
    fn restrict_examples() {
        let q = p(s(1, 4), "(1 2)(3 4)");
        assert_eq!(q.restrict(&s(3, 4)).unwrap(), p(s(3, 4), "(3 4)"));
        assert_eq!(q.restrict(&s(1, 4)).unwrap(), q);
        assert_eq!(p(s(1, 5), "(1 2 3)(4 5)").restrict(&s(4, 5)).unwrap(), p(s(4, 5), "(4 5)"));
        assert!(q.restrict(&s(2, 3)).is_err());
    }

    #[test]
    fn crss_examples() {
        let c4 = Perm::long_cycle(1, 4);
        let pi = PairPerm::from_pairs(s(1, 4), &[(1, 3), (2, 4)]).unwrap();
        assert_eq!(crss_count(&pi, t(1, 3), &c4).unwrap(), 1);
        let flat = PairPerm::from_pairs(s(1, 4), &[(1, 2), (3, 4)]).unwrap();
        assert_eq!(crss_count(&flat, t(1, 2), &c4).unwrap(), 0);
        let c6 = Perm::long_cycle(1, 6);
        let pi = PairPerm::from_pairs(s(1, 6), &[(1, 4), (2, 5), (3, 6)]).unwrap();
        assert_eq!(crss_count(&pi, t(1, 4), &c6).unwrap(), 2);
    }
}
