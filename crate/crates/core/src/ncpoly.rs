//! Noncommutative polynomials whose variables are labeled by vectors, and
//! the algebraic operators built from them: pushforward along linear maps,
//! the free difference quotient, cyclic gradient, permuted multiplication,
//! inner-product contraction and the free Laplacian.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::{CplxRational, MatProduct, MatrixAtom, QMatrix, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Space {
    V,
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Flavor {
    Gue,
    Semi,
}

/// A basis vector of the layered variable space. The flavor is part of the
/// identity: a GUE symbol and its free semicircular copy are orthogonal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisSymbol {
    space: Space,
    index: u32,
    /// Tensor tags in `1..=6`, outermost layer last.
    path: Vec<u8>,
    flavor: Flavor,
}

impl BasisSymbol {
    pub fn new(space: Space, index: u32, path: Vec<u8>, flavor: Flavor) -> Result<Self> {
        if flavor == Flavor::Gue && (space != Space::V || !path.is_empty()) {
            return Err(Error::Parse("only untagged V symbols can be GUE".into()));
        }
        if let Some(t) = path.iter().find(|t| !(1..=6).contains(*t)) {
            return Err(Error::Parse(format!("tensor tag {t} outside 1..6")));
        }
        Ok(BasisSymbol { space, index, path, flavor })
    }

    /// Untagged GUE symbol of `V`.
    pub fn gue(index: u32) -> Self {
        BasisSymbol { space: Space::V, index, path: vec![], flavor: Flavor::Gue }
    }

    /// Untagged semicircular symbol of `V`.
    pub fn semi_v(index: u32) -> Self {
        BasisSymbol { space: Space::V, index, path: vec![], flavor: Flavor::Semi }
    }

    /// Untagged semicircular symbol of `W`.
    pub fn w(index: u32) -> Self {
        BasisSymbol { space: Space::W, index, path: vec![], flavor: Flavor::Semi }
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn path(&self) -> &[u8] {
        &self.path
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Untagged symbol of `V`, of either flavor.
    pub fn is_top_v(&self) -> bool {
        self.space == Space::V && self.path.is_empty()
    }

    /// `self ⊗ e_tag`; tagged symbols are always semicircular.
    pub fn tagged(&self, tag: u8) -> Self {
        let mut path = self.path.clone();
        path.push(tag);
        BasisSymbol { space: self.space, index: self.index, path, flavor: Flavor::Semi }
    }

    /// Splits off the outermost tag.
    pub fn untag(&self) -> Option<(BasisSymbol, u8)> {
        let (&tag, rest) = self.path.split_last()?;
        let flavor = if self.space == Space::V && rest.is_empty() { Flavor::Gue } else { Flavor::Semi };
        Some((BasisSymbol { space: self.space, index: self.index, path: rest.to_vec(), flavor }, tag))
    }

    pub fn with_flavor(&self, flavor: Flavor) -> Result<Self> {
        BasisSymbol::new(self.space, self.index, self.path.clone(), flavor)
    }

    /// Same symbol with semicircular flavor.
    pub fn semicircular(&self) -> Self {
        BasisSymbol { flavor: Flavor::Semi, ..self.clone() }
    }

    /// Parses `v0`, `v0~`, `w3`, `v1.2.5`, `w0.3.5`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid symbol '{s}'"));
        let (space, rest) = match s.chars().next() {
            Some('v') => (Space::V, &s[1..]),
            Some('w') => (Space::W, &s[1..]),
            _ => return Err(bad()),
        };
        let (rest, tilde) = match rest.strip_suffix('~') {
            Some(r) => (r, true),
            None => (rest, false),
        };
        let mut parts = rest.split('.');
        let index = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let path = parts.map(|p| p.parse::<u8>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        let flavor = if space == Space::V && path.is_empty() && !tilde { Flavor::Gue } else { Flavor::Semi };
        if tilde && !(space == Space::V && path.is_empty()) {
            return Err(Error::Parse(format!("'~' only applies to untagged V symbols: '{s}'")));
        }
        BasisSymbol::new(space, index, path, flavor)
    }
}

impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sp = match self.space {
            Space::V => 'v',
            Space::W => 'w',
        };
        write!(f, "{sp}{}", self.index)?;
        for t in &self.path {
            write!(f, ".{t}")?;
        }
        if self.is_top_v() && self.flavor == Flavor::Semi {
            write!(f, "~")?;
        }
        Ok(())
    }
}

/// Which symbols count as the differentiation space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selector {
    /// Untagged `V` symbols.
    TopV,
    /// Everything else: the `W` part of the current layer.
    Rest,
}

impl Selector {
    pub fn selects(&self, s: &BasisSymbol) -> bool {
        match self {
            Selector::TopV => s.is_top_v(),
            Selector::Rest => !s.is_top_v(),
        }
    }
}

/// Finite linear combination of basis symbols with scalar coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VecExpr(BTreeMap<BasisSymbol, Scalar>);

impl VecExpr {
    pub fn zero() -> Self {
        VecExpr(BTreeMap::new())
    }

    pub fn basis(s: BasisSymbol) -> Self {
        Self::term(s, Scalar::one())
    }

    pub fn term(s: BasisSymbol, c: Scalar) -> Self {
        let mut v = VecExpr::zero();
        v.add_term(s, &c);
        v
    }

    pub fn add_term(&mut self, s: BasisSymbol, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let sum = match self.0.get(&s) {
            Some(prev) => prev + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.0.remove(&s);
        } else {
            self.0.insert(s, sum);
        }
    }

    pub fn add(&self, o: &VecExpr) -> VecExpr {
        let mut out = self.clone();
        for (s, c) in &o.0 {
            out.add_term(s.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> VecExpr {
        let mut out = VecExpr::zero();
        for (s, v) in &self.0 {
            out.add_term(s.clone(), &(v * c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisSymbol, &Scalar)> {
        self.0.iter()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &BasisSymbol> {
        self.0.keys()
    }

    /// `⟨u, u′⟩`: distinct basis symbols are orthonormal.
    pub fn inner(&self, o: &VecExpr) -> Scalar {
        let (small, large) = if self.0.len() <= o.0.len() { (self, o) } else { (o, self) };
        small.0.iter().filter_map(|(s, c)| large.0.get(s).map(|d| c * d)).sum()
    }

    /// Component in the selected subspace.
    pub fn project(&self, sel: Selector) -> VecExpr {
        VecExpr(self.0.iter().filter(|(s, _)| sel.selects(s)).map(|(s, c)| (s.clone(), c.clone())).collect())
    }

    /// The single basis symbol when this is exactly `1·e`.
    pub fn as_basis(&self) -> Option<&BasisSymbol> {
        match self.0.iter().next() {
            Some((s, c)) if self.0.len() == 1 && c.is_one() => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for VecExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "({c})·{s}")?;
            }
        }
        Ok(())
    }
}

/// Coefficient-free word `M₀ x_{u₁} M₁ … x_{u_r} M_r`; identity matrix
/// letters are the empty product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    mats: Vec<MatProduct>,
    vars: Vec<VecExpr>,
}

impl Default for Monomial {
    fn default() -> Self {
        Monomial::one()
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial { mats: vec![MatProduct::identity()], vars: vec![] }
    }

    pub fn var(v: VecExpr) -> Self {
        Monomial { mats: vec![MatProduct::identity(), MatProduct::identity()], vars: vec![v] }
    }

    pub fn symbol(s: BasisSymbol) -> Self {
        Self::var(VecExpr::basis(s))
    }

    pub fn mat(m: MatProduct) -> Self {
        Monomial { mats: vec![m], vars: vec![] }
    }

    pub fn from_parts(mats: Vec<MatProduct>, vars: Vec<VecExpr>) -> Result<Self> {
        if mats.len() != vars.len() + 1 {
            return Err(Error::Shape("a word needs one more matrix slot than variables".into()));
        }
        Ok(Monomial { mats, vars })
    }

    pub fn degree(&self) -> usize {
        self.vars.len()
    }

    /// Matrix letters `M₀ … M_r`.
    pub fn mats(&self) -> &[MatProduct] {
        &self.mats
    }

    /// Variable letters `u₁ … u_r`.
    pub fn vars(&self) -> &[VecExpr] {
        &self.vars
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let mut mats = self.mats.clone();
        let last = mats.pop().expect("nonempty");
        mats.push(last.mul(&o.mats[0]));
        mats.extend(o.mats[1..].iter().cloned());
        let mut vars = self.vars.clone();
        vars.extend(o.vars.iter().cloned());
        Monomial { mats, vars }
    }

    /// `M₀ x₁ … M_{k}` and `M_{k+1} … M_r`, dropping the variable `k`
    /// (zero-based).
    fn split_at_var(&self, k: usize) -> (Monomial, Monomial) {
        let left = Monomial { mats: self.mats[..=k].to_vec(), vars: self.vars[..k].to_vec() };
        let right = Monomial { mats: self.mats[k + 1..].to_vec(), vars: self.vars[k + 1..].to_vec() };
        (left, right)
    }

    /// `M₀ x₁ ⋯ x_k M_k` and `x_{k+1} M_{k+1} ⋯ x_r M_r`, whose product is
    /// the word.
    pub fn split_before_var(&self, k: usize) -> (Monomial, Monomial) {
        let k = k.min(self.vars.len());
        let left = Monomial { mats: self.mats[..=k].to_vec(), vars: self.vars[..k].to_vec() };
        let mut mats = vec![MatProduct::identity()];
        mats.extend(self.mats[k + 1..].iter().cloned());
        (left, Monomial { mats, vars: self.vars[k..].to_vec() })
    }

    pub fn map_vars(&self, mut f: impl FnMut(&VecExpr) -> Result<VecExpr>) -> Result<Monomial> {
        Ok(Monomial { mats: self.mats.clone(), vars: self.vars.iter().map(&mut f).collect::<Result<_>>()? })
    }

    /// The word read cyclically from `M₀`: for `r ≥ 1` the trace letters
    /// are `Z_k = M_k` for `k < r` and `Z_r = M_r M₀`. Empty for `r = 0`.
    pub fn cyclic_mats(&self) -> Vec<MatProduct> {
        let r = self.vars.len();
        if r == 0 {
            return Vec::new();
        }
        let mut z: Vec<MatProduct> = self.mats[1..r].to_vec();
        z.push(self.mats[r].mul(&self.mats[0]));
        z
    }

    pub fn concrete_dim(&self) -> Result<Option<usize>> {
        let mut dim = None;
        for m in &self.mats {
            if let Some(d) = m.concrete_dim()? {
                match dim {
                    None => dim = Some(d),
                    Some(e) if e != d => {
                        return Err(Error::Dimension(format!("concrete letters of dimensions {e} and {d}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(dim)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (k, m) in self.mats.iter().enumerate() {
            if !m.is_identity() {
                parts.push(m.to_string());
            }
            if let Some(v) = self.vars.get(k) {
                parts.push(format!("x[{v}]"));
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// A monomial with its coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub coeff: Scalar,
    pub mono: Monomial,
}

/// Element of the free algebra: like monomials are combined.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NCPoly(BTreeMap<Monomial, Scalar>);

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::from_monomial(Monomial::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::from_term(Monomial::one(), c)
    }

    pub fn from_monomial(m: Monomial) -> Self {
        Self::from_term(m, Scalar::one())
    }

    pub fn from_term(m: Monomial, c: Scalar) -> Self {
        let mut p = NCPoly::zero();
        p.add_term(m, &c);
        p
    }

    pub fn var(v: VecExpr) -> Self {
        Self::from_monomial(Monomial::var(v))
    }

    pub fn symbol(s: BasisSymbol) -> Self {
        Self::from_monomial(Monomial::symbol(s))
    }

    pub fn matrix(m: MatProduct) -> Self {
        Self::from_monomial(Monomial::mat(m))
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let sum = match self.0.get(&m) {
            Some(prev) => prev + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.0.remove(&m);
        } else {
            self.0.insert(m, sum);
        }
    }

    pub fn add(&self, o: &NCPoly) -> NCPoly {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &NCPoly) -> NCPoly {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn mul(&self, o: &NCPoly) -> NCPoly {
        let mut out = NCPoly::zero();
        for (ma, ca) in &self.0 {
            for (mb, cb) in &o.0 {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }

    pub fn pow(&self, k: usize) -> NCPoly {
        (0..k).fold(NCPoly::one(), |acc, _| acc.mul(self))
    }

    pub fn scale(&self, c: &Scalar) -> NCPoly {
        let mut out = NCPoly::zero();
        for (m, v) in &self.0 {
            out.add_term(m.clone(), &(v * c));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.0.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.0.iter().map(|(m, c)| Word { coeff: c.clone(), mono: m.clone() })
    }

    /// Highest word length, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.keys().map(Monomial::degree).max()
    }

    /// Every basis symbol occurring in some variable letter.
    pub fn symbols(&self) -> Vec<BasisSymbol> {
        let mut out: Vec<BasisSymbol> =
            self.0.keys().flat_map(|m| m.vars.iter().flat_map(|v| v.symbols().cloned())).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn concrete_dim(&self) -> Result<Option<usize>> {
        let mut dim = None;
        for m in self.0.keys() {
            if let Some(d) = m.concrete_dim()? {
                match dim {
                    None => dim = Some(d),
                    Some(e) if e != d => {
                        return Err(Error::Dimension(format!("concrete letters of dimensions {e} and {d}")))
                    }
                    _ => {}
                }
            }
        }
        Ok(dim)
    }

    /// Applies a transformation to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<NCPoly> {
        let mut out = NCPoly::zero();
        for (m, c) in &self.0 {
            out.add_term(m.clone(), &f(c)?);
        }
        Ok(out)
    }
}

impl fmt::Display for NCPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let is_one = *m == Monomial::one();
            match (c.is_one(), is_one) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{m}")?,
                (false, true) => write!(f, "({c})")?,
                (false, false) => write!(f, "({c})·{m}")?,
            }
        }
        Ok(())
    }
}

type SymbolAction = dyn Fn(&BasisSymbol) -> Result<VecExpr> + Send + Sync;

/// Linear map on basis symbols, extended linearly.
#[derive(Clone)]
pub struct LinearMap {
    name: String,
    action: Arc<SymbolAction>,
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap({})", self.name)
    }
}

impl LinearMap {
    pub fn new(
        name: impl Into<String>,
        action: impl Fn(&BasisSymbol) -> Result<VecExpr> + Send + Sync + 'static,
    ) -> Self {
        LinearMap { name: name.into(), action: Arc::new(action) }
    }

    pub fn identity() -> Self {
        LinearMap::new("id", |s| Ok(VecExpr::basis(s.clone())))
    }

    /// Defined exactly on the listed symbols.
    pub fn from_table(name: impl Into<String>, table: BTreeMap<BasisSymbol, VecExpr>) -> Self {
        LinearMap::new(name, move |s| table.get(s).cloned().ok_or_else(|| Error::UndefinedSymbol(s.to_string())))
    }

    /// `(id ⊗ e_tag)`: appends a tensor tag to every symbol.
    pub fn tag(tag: u8) -> Self {
        LinearMap::new(format!("⊗e{tag}"), move |s| Ok(VecExpr::basis(s.tagged(tag))))
    }

    /// Re-flavors every untagged `V` symbol as semicircular.
    pub fn semicircular() -> Self {
        LinearMap::new("semicircular", |s| Ok(VecExpr::basis(s.semicircular())))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply_symbol(&self, s: &BasisSymbol) -> Result<VecExpr> {
        (self.action)(s)
    }

    pub fn apply(&self, v: &VecExpr) -> Result<VecExpr> {
        let mut out = VecExpr::zero();
        for (s, c) in v.terms() {
            out = out.add(&self.apply_symbol(s)?.scale(c));
        }
        Ok(out)
    }

    /// `self ∘ first`
    pub fn after(&self, first: &LinearMap) -> LinearMap {
        let (a, b) = (self.clone(), first.clone());
        LinearMap::new(format!("{}∘{}", a.name, b.name), move |s| a.apply(&b.apply_symbol(s)?))
    }
}

/// `φ_*`: the algebra homomorphism fixing matrix letters and sending
/// `x_v` to `x_{φ(v)}`.
pub fn pushforward(phi: &LinearMap, f: &NCPoly) -> Result<NCPoly> {
    let mut cache: BTreeMap<VecExpr, VecExpr> = BTreeMap::new();
    let mut out = NCPoly::zero();
    for (m, c) in f.terms() {
        let mapped = m.map_vars(|v| {
            if let Some(w) = cache.get(v) {
                return Ok(w.clone());
            }
            let w = phi.apply(v)?;
            cache.insert(v.clone(), w.clone());
            Ok(w)
        })?;
        if mapped.vars.iter().any(VecExpr::is_zero) {
            continue;
        }
        out.add_term(mapped, c);
    }
    Ok(out)
}

/// Rewrites every variable letter as a single basis symbol, distributing
/// linear combinations and pulling coefficients out.
pub fn expand_to_basis(f: &NCPoly) -> NCPoly {
    let mut out = NCPoly::zero();
    for (m, c) in f.terms() {
        let mut partial: Vec<(Vec<VecExpr>, Scalar)> = vec![(Vec::new(), c.clone())];
        for v in &m.vars {
            let mut next = Vec::with_capacity(partial.len() * v.0.len());
            for (vars, coeff) in &partial {
                for (s, a) in v.terms() {
                    let mut vs = vars.clone();
                    vs.push(VecExpr::basis(s.clone()));
                    next.push((vs, coeff * a));
                }
            }
            partial = next;
        }
        for (vars, coeff) in partial {
            out.add_term(Monomial { mats: m.mats.clone(), vars }, &coeff);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotKind {
    Vector,
    Algebra,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Vector(VecExpr),
    Algebra(Monomial),
}

impl Slot {
    pub fn kind(&self) -> SlotKind {
        match self {
            Slot::Vector(_) => SlotKind::Vector,
            Slot::Algebra(_) => SlotKind::Algebra,
        }
    }
}

/// Element of a tensor product of vector spaces and copies of the free
/// algebra, e.g. `V ⊗ 𝒜⟨·⟩ ⊗ 𝒜⟨·⟩`, stored as a combination of pure
/// tensors with a fixed slot shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorPoly {
    shape: Vec<SlotKind>,
    terms: BTreeMap<Vec<Slot>, Scalar>,
}

impl TensorPoly {
    pub fn zero(shape: Vec<SlotKind>) -> Self {
        TensorPoly { shape, terms: BTreeMap::new() }
    }

    /// A polynomial viewed as a one-slot tensor.
    pub fn from_poly(f: &NCPoly) -> Self {
        let mut t = TensorPoly::zero(vec![SlotKind::Algebra]);
        for (m, c) in f.terms() {
            t.add_term(vec![Slot::Algebra(m.clone())], c.clone());
        }
        t
    }

    pub fn shape(&self) -> &[SlotKind] {
        &self.shape
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Slot>, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, slots: Vec<Slot>, c: Scalar) {
        debug_assert!(slots.iter().map(Slot::kind).eq(self.shape.iter().copied()));
        if c.is_zero() {
            return;
        }
        if slots.iter().any(|s| matches!(s, Slot::Vector(v) if v.is_zero())) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(slots) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, o: &TensorPoly) -> Result<TensorPoly> {
        if self.shape != o.shape {
            return Err(Error::Shape(format!("adding tensors of shapes {:?} and {:?}", self.shape, o.shape)));
        }
        let mut out = self.clone();
        for (s, c) in &o.terms {
            out.add_term(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> TensorPoly {
        let mut out = TensorPoly::zero(self.shape.clone());
        for (s, v) in &self.terms {
            out.add_term(s.clone(), v * c);
        }
        out
    }

    fn expect_kind(&self, slot: usize, kind: SlotKind) -> Result<()> {
        match self.shape.get(slot) {
            Some(k) if *k == kind => Ok(()),
            other => Err(Error::Shape(format!("slot {slot} is {other:?}, expected {kind:?}"))),
        }
    }

    /// Applies the free difference quotient to one algebra slot, which is
    /// replaced by `V ⊗ 𝒜 ⊗ 𝒜` in place.
    pub fn fdq_slot(&self, slot: usize, sel: Selector) -> Result<TensorPoly> {
        self.expect_kind(slot, SlotKind::Algebra)?;
        let mut shape = self.shape.clone();
        shape.splice(slot..=slot, [SlotKind::Vector, SlotKind::Algebra, SlotKind::Algebra]);
        let mut out = TensorPoly::zero(shape);
        for (slots, c) in &self.terms {
            let Slot::Algebra(m) = &slots[slot] else { unreachable!() };
            for (k, v) in m.vars.iter().enumerate() {
                let u = v.project(sel);
                if u.is_zero() {
                    continue;
                }
                let (left, right) = m.split_at_var(k);
                let mut new = slots.clone();
                new.splice(slot..=slot, [Slot::Vector(u), Slot::Algebra(left), Slot::Algebra(right)]);
                out.add_term(new, c.clone());
            }
        }
        Ok(out)
    }

    /// Reorders slots: the new slot `k` is the old slot `order[k]`.
    pub fn permute_slots(&self, order: &[usize]) -> Result<TensorPoly> {
        let mut check = order.to_vec();
        check.sort_unstable();
        if check != (0..self.shape.len()).collect::<Vec<_>>() {
            return Err(Error::Shape(format!("{order:?} is not a permutation of the slots")));
        }
        let shape = order.iter().map(|&k| self.shape[k]).collect();
        let mut out = TensorPoly::zero(shape);
        for (slots, c) in &self.terms {
            out.add_term(order.iter().map(|&k| slots[k].clone()).collect(), c.clone());
        }
        Ok(out)
    }

    /// `n`: replaces two leading vector slots by their inner product.
    pub fn contract_inner(&self) -> Result<TensorPoly> {
        self.expect_kind(0, SlotKind::Vector)?;
        self.expect_kind(1, SlotKind::Vector)?;
        let mut out = TensorPoly::zero(self.shape[2..].to_vec());
        for (slots, c) in &self.terms {
            let (Slot::Vector(a), Slot::Vector(b)) = (&slots[0], &slots[1]) else { unreachable!() };
            out.add_term(slots[2..].to_vec(), c * &a.inner(b));
        }
        Ok(out)
    }

    /// Applies `φ_*` to one algebra slot.
    pub fn pushforward_slot(&self, slot: usize, phi: &LinearMap) -> Result<TensorPoly> {
        self.expect_kind(slot, SlotKind::Algebra)?;
        let mut out = TensorPoly::zero(self.shape.clone());
        for (slots, c) in &self.terms {
            let Slot::Algebra(m) = &slots[slot] else { unreachable!() };
            for (img, d) in pushforward(phi, &NCPoly::from_monomial(m.clone()))?.terms() {
                let mut new = slots.clone();
                new[slot] = Slot::Algebra(img.clone());
                out.add_term(new, c * d);
            }
        }
        Ok(out)
    }

    /// `m_{j₁,…,j_m}` on the trailing algebra slots (1-based list, as
    /// `a_{j₁} ⋯ a_{j_m}`); leading vector slots are kept.
    pub fn multiply(&self, order: &[usize]) -> Result<TensorPoly> {
        let first_alg = self.shape.iter().position(|k| *k == SlotKind::Algebra).unwrap_or(self.shape.len());
        let algs = self.shape.len() - first_alg;
        if self.shape[first_alg..].iter().any(|k| *k != SlotKind::Algebra) {
            return Err(Error::Shape("vector slots must precede algebra slots".into()));
        }
        let mut check = order.to_vec();
        check.sort_unstable();
        if order.len() != algs || check != (1..=algs).collect::<Vec<_>>() {
            return Err(Error::Shape(format!("{order:?} does not order {algs} factors")));
        }
        let mut shape = self.shape[..first_alg].to_vec();
        shape.push(SlotKind::Algebra);
        let mut out = TensorPoly::zero(shape);
        for (slots, c) in &self.terms {
            let mut prod = Monomial::one();
            for &j in order {
                let Slot::Algebra(m) = &slots[first_alg + j - 1] else { unreachable!() };
                prod = prod.mul(m);
            }
            let mut new = slots[..first_alg].to_vec();
            new.push(Slot::Algebra(prod));
            out.add_term(new, c.clone());
        }
        Ok(out)
    }

    /// A one-slot algebra tensor as a polynomial.
    pub fn into_poly(self) -> Result<NCPoly> {
        if self.shape != [SlotKind::Algebra] {
            return Err(Error::Shape(format!("shape {:?} is not a single algebra factor", self.shape)));
        }
        let mut out = NCPoly::zero();
        for (mut slots, c) in self.terms {
            let Some(Slot::Algebra(m)) = slots.pop() else { unreachable!() };
            out.add_term(m, &c);
        }
        Ok(out)
    }
}

/// `∂`: shape `V ⊗ 𝒜 ⊗ 𝒜`.
pub fn fdq(f: &NCPoly, sel: Selector) -> TensorPoly {
    TensorPoly::from_poly(f).fdq_slot(0, sel).expect("single algebra slot")
}

/// `D° = (id ⊗ m_{2,1}) ∘ ∂`: shape `V ⊗ 𝒜`.
pub fn cyclic_gradient(f: &NCPoly, sel: Selector) -> TensorPoly {
    fdq(f, sel).multiply(&[2, 1]).expect("shape V ⊗ 𝒜 ⊗ 𝒜")
}

/// `m_{j₁,…,j_m}` on a pure algebra tensor.
pub fn mult_perm(t: &TensorPoly, order: &[usize]) -> Result<NCPoly> {
    if t.shape.contains(&SlotKind::Vector) {
        return Err(Error::Shape("multiplication map applied to a tensor with vector slots".into()));
    }
    t.multiply(order)?.into_poly()
}

pub fn contract_inner(t: &TensorPoly) -> Result<TensorPoly> {
    t.contract_inner()
}

/// `L = n ∘ (id ⊗ ∂) ∘ D°`: shape `𝒜 ⊗ 𝒜`.
pub fn free_laplacian(f: &NCPoly, sel: Selector) -> TensorPoly {
    cyclic_gradient(f, sel)
        .fdq_slot(1, sel)
        .and_then(|t| t.contract_inner())
        .expect("shape V ⊗ 𝒜")
}

/// Parses the word grammar: whitespace-separated letters `g<i>` (GUE),
/// `s<i>` (semicircular of `W`), `Z<i>` (formal matrix), `[a,b;c,d]`
/// (concrete matrix), `x[sym]` (any basis symbol), each optionally
/// followed by `^k`.
pub fn parse_word(text: &str) -> Result<NCPoly> {
    let mut out = NCPoly::one();
    for tok in tokenize(text)? {
        let (body, rep) = match tok.rsplit_once('^') {
            Some((b, k)) if !b.is_empty() && !k.contains(']') => {
                (b, k.parse::<usize>().map_err(|_| Error::Parse(format!("bad repetition '{tok}'")))?)
            }
            _ => (tok.as_str(), 1),
        };
        let letter = parse_letter(body)?;
        out = out.mul(&letter.pow(rep));
    }
    Ok(out)
}

fn tokenize(text: &str) -> Result<Vec<String>> {
    let mut toks = Vec::new();
    let mut cur = String::new();
    let mut depth = 0usize;
    for ch in text.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth = depth.checked_sub(1).ok_or_else(|| Error::Parse(format!("unbalanced ']' in '{text}'")))?,
            _ => {}
        }
        if ch.is_whitespace() && depth == 0 {
            if !cur.is_empty() {
                toks.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced '[' in '{text}'")));
    }
    if !cur.is_empty() {
        toks.push(cur);
    }
    Ok(toks)
}

fn parse_letter(tok: &str) -> Result<NCPoly> {
    let index = |s: &str| s.parse::<u32>().map_err(|_| Error::Parse(format!("bad letter '{tok}'")));
    if let Some(inner) = tok.strip_prefix("x[").and_then(|s| s.strip_suffix(']')) {
        return Ok(NCPoly::symbol(BasisSymbol::parse(inner.trim())?));
    }
    if tok.starts_with('[') {
        let m = QMatrix::parse(tok)?;
        return Ok(NCPoly::matrix(MatProduct::concrete(m)));
    }
    match tok.split_at(tok.chars().next().map_or(0, char::len_utf8)) {
        ("g", i) => Ok(NCPoly::symbol(BasisSymbol::gue(index(i)?))),
        ("s", i) => Ok(NCPoly::symbol(BasisSymbol::w(index(i)?))),
        ("Z", i) => Ok(NCPoly::matrix(MatProduct::formal(index(i)?))),
        _ => Err(Error::Parse(format!("unknown letter '{tok}'"))),
    }
}

/// Renders a polynomial of coefficient-one words in the grammar accepted by
/// [`parse_word`], when possible.
pub fn format_word(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (k, mat) in m.mats.iter().enumerate() {
        for a in mat.atoms() {
            parts.push(match a {
                MatrixAtom::Formal(i) => format!("Z{i}"),
                MatrixAtom::Concrete(q) => q.to_string(),
            });
        }
        if let Some(v) = m.vars.get(k) {
            parts.push(match v.as_basis() {
                Some(s) if s.is_top_v() && s.flavor() == Flavor::Gue => format!("g{}", s.index()),
                Some(s) if s.space() == Space::W && s.path().is_empty() => format!("s{}", s.index()),
                Some(s) => format!("x[{s}]"),
                None => format!("x[{v}]"),
            });
        }
    }
    parts.join(" ")
}

/// `c · v` with a complex rational `c`.
pub fn scaled_symbol(s: BasisSymbol, c: CplxRational) -> VecExpr {
    VecExpr::term(s, Scalar::constant(c))
}
