//! The `1/N²` expansion of expected traces: crossing derivatives, the
//! interpolation map `α_{s,t}`, the operator `T^cross`, and exact checks of
//! the first-order formula, its iterates, and the interpolation lemmas.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::genus::{expected_trace_poly_with, semicircular_trace_with};
use crate::ncpoly::{
    expand_to_basis, free_laplacian, pushforward, BasisSymbol, LinearMap, Monomial, NCPoly, Selector, VecExpr, Word,
};
use crate::perms::{self, IndexSet, PairPerm, Perm, Transposition};
use crate::scalars::{MatProduct, MomentPoly, ParamPair, ParamSymbol, Rational, Scalar};

/// Which pair of letters the second derivative removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CrossVariant {
    /// Both pairs in `V`.
    VV,
    /// First pair in `V`, second in the complementary space.
    VW,
}

impl CrossVariant {
    pub fn selector(self) -> Selector {
        match self {
            CrossVariant::VV => Selector::TopV,
            CrossVariant::VW => Selector::Rest,
        }
    }
}

/// `D^cross`, built from the primitive operations: `½L_V`, a derivative
/// in each factor, reordering, contraction, tagging of the four arcs with
/// `e₁ … e₄`, and `m_{4,3,2,1}`.
pub fn dcross(f: &NCPoly, variant: CrossVariant) -> Result<NCPoly> {
    let sel = variant.selector();
    let half = Scalar::from_rational(Rational::new(1.into(), 2.into()));
    let mut t = free_laplacian(f, Selector::TopV).scale(&half);
    t = t.fdq_slot(0, sel)?;
    t = t.fdq_slot(3, sel)?;
    t = t.permute_slots(&[0, 3, 1, 2, 4, 5])?;
    t = t.contract_inner()?;
    for k in 0..4 {
        t = t.pushforward_slot(k, &LinearMap::tag(k as u8 + 1))?;
    }
    t.multiply(&[4, 3, 2, 1])?.into_poly()
}

/// An oriented crossing of the cycle `(1 2 … r)`: `j₁` lies strictly
/// between `i₁` and `i₂`, and `j₂` strictly between `i₂` and `i₁`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CrossingTermKey {
    pub tau: (usize, usize),
    pub tau2: (usize, usize),
}

/// Indices strictly after `a` and strictly before `b` along `1 → 2 → … → r → 1`.
fn arc(r: usize, a: usize, b: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = a % r + 1;
    while k != b {
        out.push(k);
        k = k % r + 1;
    }
    out
}

/// All oriented crossings of `(1 … r)`.
pub fn crossing_keys(r: usize) -> Vec<CrossingTermKey> {
    let mut out = Vec::new();
    for i1 in 1..=r {
        for i2 in 1..=r {
            if i1 == i2 {
                continue;
            }
            for &j1 in &arc(r, i1, i2) {
                for &j2 in &arc(r, i2, i1) {
                    out.push(CrossingTermKey { tau: (i1, i2), tau2: (j1, j2) });
                }
            }
        }
    }
    out
}

impl CrossingTermKey {
    fn check(&self, r: usize) -> Result<()> {
        let (i1, i2) = self.tau;
        let (j1, j2) = self.tau2;
        let inside = |k: usize| (1..=r).contains(&k);
        if ![i1, i2, j1, j2].into_iter().all(inside)
            || i1 == i2
            || !arc(r, i1, i2).contains(&j1)
            || !arc(r, i2, i1).contains(&j2)
        {
            return Err(Error::Perm(format!(
                "({i1} {i2}) and ({j1} {j2}) are not an oriented crossing of (1 … {r})"
            )));
        }
        Ok(())
    }

    pub fn transpositions(&self) -> Result<(Transposition, Transposition)> {
        Ok((Transposition::new(self.tau.0, self.tau.1)?, Transposition::new(self.tau2.0, self.tau2.1)?))
    }
}

/// `Z_a x_{k₁}⊗e Z_{k₁} ⋯ x_{k_m}⊗e Z_{k_m}` over the arc after `a`.
fn arc_word(vars: &[VecExpr], z: &[MatProduct], a: usize, stop: usize, tag: u8) -> Result<Monomial> {
    let r = vars.len();
    let ks = arc(r, a, stop);
    let mut mats = vec![z[a - 1].clone()];
    let mut letters = Vec::with_capacity(ks.len());
    let tagger = LinearMap::tag(tag);
    for k in ks {
        letters.push(tagger.apply(&vars[k - 1])?);
        mats.push(z[k - 1].clone());
    }
    Monomial::from_parts(mats, letters)
}

/// The single word `h_{τ,τ′}`: the four arcs cut out by the crossing,
/// tagged `e₁ … e₄` and multiplied in the order `A₄A₃A₂A₁`, times
/// `⟨u(i₁),u(i₂)⟩_V ⟨u(j₁),u(j₂)⟩` with the second product taken inside
/// the space selected by `variant`.
pub fn h_term(word: &Word, key: CrossingTermKey, variant: CrossVariant) -> Result<NCPoly> {
    let mono = &word.mono;
    let r = mono.degree();
    key.check(r)?;
    let vars = mono.vars();
    let z = mono.cyclic_mats();
    let (i1, i2) = key.tau;
    let (j1, j2) = key.tau2;
    let u = |k: usize| &vars[k - 1];
    let sel = variant.selector();
    let c = u(i1).project(Selector::TopV).inner(&u(i2).project(Selector::TopV))
        * u(j1).project(sel).inner(&u(j2).project(sel));
    if c.is_zero() {
        return Ok(NCPoly::zero());
    }
    let a1 = arc_word(vars, &z, i1, j1, 1)?;
    let a2 = arc_word(vars, &z, j1, i2, 2)?;
    let a3 = arc_word(vars, &z, i2, j2, 3)?;
    let a4 = arc_word(vars, &z, j2, i1, 4)?;
    let prod = a4.mul(&a3).mul(&a2).mul(&a1);
    Ok(NCPoly::from_term(prod, c * word.coeff.clone()))
}

/// `½ Σ h_{τ,τ′}` over all oriented crossings of every word: an
/// independent expansion of [`dcross`].
pub fn crossing_sum(f: &NCPoly, variant: CrossVariant) -> Result<NCPoly> {
    let half = Scalar::from_rational(Rational::new(1.into(), 2.into()));
    let mut out = NCPoly::zero();
    for w in f.words() {
        for key in crossing_keys(w.mono.degree()) {
            out = out.add(&h_term(&w, key, variant)?);
        }
    }
    Ok(out.scale(&half))
}

fn sqrt_param(sym: ParamSymbol) -> Scalar {
    Scalar::param(sym, 1)
}

/// `α_{s,t}` at the given level, acting on symbols whose last tag is one
/// of `e₁ … e₄`: the tag is removed, and a top-level `V` symbol splits into
/// a GUE branch of weight `t^{1/2}` and two semicircular branches; any
/// other symbol only gets the two semicircular branches.
pub fn alpha_map(level: u32) -> LinearMap {
    let (t, omt) = (sqrt_param(ParamSymbol::t(level)), sqrt_param(ParamSymbol::one_minus_t(level)));
    let (s, oms) = (sqrt_param(ParamSymbol::s(level)), sqrt_param(ParamSymbol::one_minus_s(level)));
    LinearMap::new(format!("α{level}"), move |sym: &BasisSymbol| {
        let (x, j) = sym.untag().ok_or_else(|| Error::UndefinedSymbol(format!("α{level} applied to untagged {sym}")))?;
        if !(1..=4).contains(&j) {
            return Err(Error::UndefinedSymbol(format!("α{level} applied to {sym} with tag e{j}")));
        }
        let k = 5 + u8::from(j == 2 || j == 3);
        let mut semi = VecExpr::term(x.tagged(k), s.clone());
        semi.add_term(x.tagged(j), &oms);
        if x.is_top_v() {
            let mut out = VecExpr::term(x.clone(), t.clone());
            out = out.add(&semi.scale(&omt));
            Ok(out)
        } else {
            Ok(semi)
        }
    })
}

/// `(α_{s,t})_*[(1−t)D^cross_{V,V} + D^cross_{V,W}] f` with the level's
/// parameters left symbolic.
pub fn tcross_parametric(f: &NCPoly, level: u32) -> Result<NCPoly> {
    let vv = dcross(f, CrossVariant::VV)?.scale(&Scalar::param(ParamSymbol::one_minus_t(level), 2));
    let vw = dcross(f, CrossVariant::VW)?;
    pushforward(&alpha_map(level), &vv.add(&vw))
}

fn integrate_level(p: &MomentPoly, level: u32) -> Result<MomentPoly> {
    let parity = |e: Error| match e {
        Error::NonIntegerExponent(m) => Error::Internal(format!("odd exponent reached the integrator: {m}")),
        other => other,
    };
    p.integrate(ParamPair::S(level)).and_then(|q| q.integrate(ParamPair::T(level))).map_err(parity)
}

fn integrate_levels(p: &MomentPoly, levels: u32) -> Result<MomentPoly> {
    (0..levels).try_fold(p.clone(), |acc, l| integrate_level(&acc, l))
}

/// `E tr (T^cross f)`: pairing contraction first, then `∫ds`, then `∫dt`.
pub fn tcross_expected_trace(f: &NCPoly) -> Result<MomentPoly> {
    tcross_expected_trace_with(f, Exec::default())
}

pub fn tcross_expected_trace_with(f: &NCPoly, exec: Exec) -> Result<MomentPoly> {
    let g = tcross_parametric(f, 0)?;
    integrate_level(&expected_trace_poly_with(&g, exec)?, 0)
}

/// One `ν` order of a comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderDiff {
    pub order: u32,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub diff: Scalar,
}

/// Both sides of `E tr f = tr f + ν E tr T^cross f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub lhs: MomentPoly,
    pub rhs: MomentPoly,
    pub orders: Vec<OrderDiff>,
    pub pass: bool,
}

impl ExpansionReport {
    pub fn compare(lhs: MomentPoly, rhs: MomentPoly) -> Self {
        let top = lhs.degree().max(rhs.degree()).unwrap_or(0);
        let orders: Vec<OrderDiff> = (0..=top)
            .map(|g| {
                let (l, r) = (lhs.coeff(g), rhs.coeff(g));
                OrderDiff { order: g, diff: &l - &r, lhs: l, rhs: r }
            })
            .collect();
        let pass = orders.iter().all(|o| o.diff.is_zero());
        ExpansionReport { lhs, rhs, orders, pass }
    }

    /// Lowest `ν` order where the sides differ.
    pub fn first_mismatch(&self) -> Option<&OrderDiff> {
        self.orders.iter().find(|o| !o.diff.is_zero())
    }
}

pub fn verify_first_order(f: &NCPoly) -> Result<ExpansionReport> {
    verify_first_order_with(f, Exec::default())
}

pub fn verify_first_order_with(f: &NCPoly, exec: Exec) -> Result<ExpansionReport> {
    let lhs = expected_trace_poly_with(f, exec)?;
    let rhs = MomentPoly::constant(semicircular_trace_with(f, exec)?) + tcross_expected_trace_with(f, exec)?.shift(1);
    Ok(ExpansionReport::compare(lhs, rhs))
}

/// Iterated expansion `Σ_{k≤m} c_k ν^k + ν^{m+1} E tr (T^cross)^{m+1} f`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticExpansion {
    pub coeffs: Vec<Scalar>,
    pub remainder: MomentPoly,
}

impl AsymptoticExpansion {
    pub fn total(&self) -> MomentPoly {
        let mut out = self.remainder.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            out.add_at(k as u32, c);
        }
        out
    }
}

/// Level `k` of the iteration uses the parameters `(s_k, t_k)` and a fresh
/// tag layer; all levels are integrated after contraction.
pub fn expand_asymptotic(f: &NCPoly, order: u32) -> Result<AsymptoticExpansion> {
    expand_asymptotic_with(f, order, Exec::default())
}

pub fn expand_asymptotic_with(f: &NCPoly, order: u32, exec: Exec) -> Result<AsymptoticExpansion> {
    let mut coeffs = vec![semicircular_trace_with(f, exec)?];
    let mut g = f.clone();
    for level in 0..order {
        g = tcross_parametric(&g, level)?;
        let c = MomentPoly::constant(semicircular_trace_with(&g, exec)?);
        coeffs.push(integrate_levels(&c, level + 1)?.coeff(0));
    }
    g = tcross_parametric(&g, order)?;
    let remainder = if g.is_zero() {
        MomentPoly::zero()
    } else {
        integrate_levels(&expected_trace_poly_with(&g, exec)?, order + 1)?.shift(order + 1)
    };
    Ok(AsymptoticExpansion { coeffs, remainder })
}

const ETA: ParamPair = ParamPair::T(0);

/// Normal form for polynomials in `t`: powers of `1−t` are expanded.
pub fn expand_in_t(p: &MomentPoly) -> Result<MomentPoly> {
    p.expand_complement(ETA)
}

/// A basis word as a single cycle with its pair-compatibility data.
struct EtaWord {
    sigma: Perm,
    labels: Vec<BasisSymbol>,
    z: Vec<MatProduct>,
    coeff: Scalar,
}

impl EtaWord {
    fn new(w: &Word) -> Result<Self> {
        let labels = w
            .mono
            .vars()
            .iter()
            .map(|v| v.as_basis().cloned().ok_or_else(|| Error::Internal(format!("letter {v} not a basis symbol"))))
            .collect::<Result<Vec<_>>>()?;
        let r = labels.len();
        let sigma = if r == 0 { Perm::identity(IndexSet::default()) } else { Perm::long_cycle(1, r) };
        Ok(EtaWord { sigma, labels, z: w.mono.cyclic_mats(), coeff: w.coeff.clone() })
    }

    fn label(&self, k: usize) -> &BasisSymbol {
        &self.labels[k - 1]
    }

    fn compatible_pairings(&self) -> Vec<PairPerm> {
        perms::enumerate_pairings(self.sigma.domain())
            .into_iter()
            .filter(|p| p.pairs().iter().all(|t| self.label(t.0) == self.label(t.1)))
            .collect()
    }

    /// `∏_{γ ∈ Cyc(πσ)} tr(∏_{k∈γ} Z_k)`.
    fn b(&self, pi: &PairPerm) -> Result<Scalar> {
        let pisigma = pi.perm().compose(&self.sigma)?;
        let mut out = Scalar::one();
        for cyc in pisigma.cycles() {
            let mut prod = MatProduct::identity();
            for k in cyc {
                prod = prod.mul(&self.z[k - 1]);
            }
            out = out * Scalar::trace_of(&prod);
        }
        Ok(out)
    }

    /// Runs `visit(π, V-pairs, other pairs)` over compatible pairings.
    fn for_each(&self, mut visit: impl FnMut(&PairPerm, Vec<Transposition>, Vec<Transposition>) -> Result<()>) -> Result<()> {
        for pi in self.compatible_pairings() {
            let (v, s): (Vec<_>, Vec<_>) = pi.pairs().into_iter().partition(|t| self.label(t.0).is_top_v());
            if !perms::noncrossing_pairs(&self.sigma, &s) {
                continue;
            }
            visit(&pi, v, s)?;
        }
        Ok(())
    }
}

fn t_weight(a: usize, b: usize) -> Scalar {
    &Scalar::param(ParamSymbol::t(0), 2 * a as u32) * &Scalar::param(ParamSymbol::one_minus_t(0), 2 * b as u32)
}

fn subset(pairs: &[Transposition], mask: u32) -> Vec<Transposition> {
    pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, t)| *t).collect()
}

/// `η(t) = E tr f(t^{1/2}X_V^{(N)} + (1−t)^{1/2}x_V, x_W)` by the pairing
/// formula: each `V` pair is either Gaussian (`A`) or semicircular (`B`),
/// and the semicircular pairs together with the `W` pairs must be
/// noncrossing.
pub fn eta_poly(f: &NCPoly) -> Result<MomentPoly> {
    let mut total = MomentPoly::zero();
    for w in expand_to_basis(f).words() {
        let ew = EtaWord::new(&w)?;
        if ew.labels.is_empty() {
            total.add_at(0, &(&ew.coeff * &Scalar::trace_of(&w.mono.mats()[0])));
            continue;
        }
        ew.for_each(|pi, v, s| {
            let g = perms::pairing_genus(&ew.sigma, pi)?;
            let base = &ew.coeff * &ew.b(pi)?;
            for mask in 0..1u32 << v.len() {
                let mut bs = subset(&v, mask);
                let nb = bs.len();
                bs.extend(&s);
                if perms::noncrossing_pairs(&ew.sigma, &bs) {
                    total.add_at(g, &(&base * &t_weight(v.len() - nb, nb)));
                }
            }
            Ok(())
        })?;
    }
    expand_in_t(&total)
}

/// `η′(t)` by the derivative formula: sums over a Gaussian `V` pair `τ`
/// whose switch to semicircular would create a crossing.
pub fn eta_derivative(f: &NCPoly) -> Result<MomentPoly> {
    let mut total = MomentPoly::zero();
    for w in expand_to_basis(f).words() {
        let ew = EtaWord::new(&w)?;
        if ew.labels.is_empty() {
            continue;
        }
        ew.for_each(|pi, v, s| {
            let g = perms::pairing_genus(&ew.sigma, pi)?;
            let base = &ew.coeff * &ew.b(pi)?;
            for mask in 0..1u32 << v.len() {
                let mut bs = subset(&v, mask);
                let nb = bs.len();
                bs.extend(&s);
                if !perms::noncrossing_pairs(&ew.sigma, &bs) {
                    continue;
                }
                for (k, tau) in v.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        continue;
                    }
                    let mut with = bs.clone();
                    with.push(*tau);
                    if !perms::noncrossing_pairs(&ew.sigma, &with) {
                        total.add_at(g, &(&base * &t_weight(v.len() - nb - 1, nb)));
                    }
                }
            }
            Ok(())
        })?;
    }
    expand_in_t(&total)
}

/// `η(t)` by substituting `x_v ↦ t^{1/2}x_v + (1−t)^{1/2}x̃_v` for every
/// top-level `V` symbol and running the genus engine.
pub fn eta_by_substitution(f: &NCPoly) -> Result<MomentPoly> {
    let (t, omt) = (sqrt_param(ParamSymbol::t(0)), sqrt_param(ParamSymbol::one_minus_t(0)));
    let phi = LinearMap::new("interpolate", move |sym: &BasisSymbol| {
        if !sym.is_top_v() {
            return Ok(VecExpr::basis(sym.clone()));
        }
        let mut out = VecExpr::term(sym.with_flavor(crate::ncpoly::Flavor::Gue)?, t.clone());
        out.add_term(sym.semicircular(), &omt);
        Ok(out)
    });
    expand_in_t(&expected_trace_poly_with(&pushforward(&phi, f)?, Exec::default())?)
}

/// `ν ∫ds E tr (α_{s,t})_*[(1−t)D^cross_{V,V} + D^cross_{V,W}] f` as a
/// polynomial in `t`: the right side of the derivative identity.
pub fn eta_derivative_by_crossings(f: &NCPoly) -> Result<MomentPoly> {
    let g = tcross_parametric(f, 0)?;
    let p = expected_trace_poly_with(&g, Exec::default())?.integrate(ParamPair::S(0))?;
    expand_in_t(&p.shift(1))
}
