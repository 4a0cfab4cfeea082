use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::rational::{beta_integer, int, rational_sqrt, CplxRational, Rational};
use crate::scalars::trace::{cyclic_normalize, CyclicWord, MatProduct, MatrixAtom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKind {
    T,
    OneMinusT,
    S,
    OneMinusS,
}

/// An interpolation parameter symbol. `t` and `1-t` are independent
/// symbols; nothing relates them at the monomial level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamSymbol {
    pub level: u32,
    pub kind: ParamKind,
}

impl ParamSymbol {
    pub fn new(kind: ParamKind, level: u32) -> Self {
        ParamSymbol { level, kind }
    }

    pub fn t(level: u32) -> Self {
        Self::new(ParamKind::T, level)
    }

    pub fn one_minus_t(level: u32) -> Self {
        Self::new(ParamKind::OneMinusT, level)
    }

    pub fn s(level: u32) -> Self {
        Self::new(ParamKind::S, level)
    }

    pub fn one_minus_s(level: u32) -> Self {
        Self::new(ParamKind::OneMinusS, level)
    }

    pub fn partner(&self) -> Self {
        let kind = match self.kind {
            ParamKind::T => ParamKind::OneMinusT,
            ParamKind::OneMinusT => ParamKind::T,
            ParamKind::S => ParamKind::OneMinusS,
            ParamKind::OneMinusS => ParamKind::S,
        };
        ParamSymbol { level: self.level, kind }
    }

    pub fn name(&self) -> String {
        match self.kind {
            ParamKind::T => format!("t{}", self.level),
            ParamKind::OneMinusT => format!("(1-t{})", self.level),
            ParamKind::S => format!("s{}", self.level),
            ParamKind::OneMinusS => format!("(1-s{})", self.level),
        }
    }
}

/// Integration variable together with its `1 - x` partner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamPair {
    T(u32),
    S(u32),
}

impl ParamPair {
    pub fn var(&self) -> ParamSymbol {
        match *self {
            ParamPair::T(l) => ParamSymbol::t(l),
            ParamPair::S(l) => ParamSymbol::s(l),
        }
    }

    pub fn complement(&self) -> ParamSymbol {
        self.var().partner()
    }
}

/// Monomial in parameter symbols with exponents counted in halves.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamMonomial(BTreeMap<ParamSymbol, u32>);

impl ParamMonomial {
    pub fn one() -> Self {
        ParamMonomial(BTreeMap::new())
    }

    pub fn single(sym: ParamSymbol, halves: u32) -> Self {
        let mut m = BTreeMap::new();
        if halves > 0 {
            m.insert(sym, halves);
        }
        ParamMonomial(m)
    }

    /// Exponent of `sym`, in halves.
    pub fn half_exponent(&self, sym: ParamSymbol) -> u32 {
        self.0.get(&sym).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ParamSymbol, &u32)> {
        self.0.iter()
    }

    pub fn mul(&self, other: &ParamMonomial) -> ParamMonomial {
        let mut out = self.0.clone();
        for (s, e) in &other.0 {
            *out.entry(*s).or_insert(0) += e;
        }
        ParamMonomial(out)
    }

    fn without(&self, syms: &[ParamSymbol]) -> ParamMonomial {
        let mut out = self.0.clone();
        for s in syms {
            out.remove(s);
        }
        ParamMonomial(out)
    }

    fn with(&self, sym: ParamSymbol, halves: u32) -> ParamMonomial {
        let mut out = self.0.clone();
        if halves == 0 {
            out.remove(&sym);
        } else {
            out.insert(sym, halves);
        }
        ParamMonomial(out)
    }

    pub fn is_integral(&self) -> bool {
        self.0.values().all(|e| e % 2 == 0)
    }
}

impl fmt::Display for ParamMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            match e {
                2 => write!(f, "{}", s.name())?,
                e if e % 2 == 0 => write!(f, "{}^{}", s.name(), e / 2)?,
                e => write!(f, "{}^({}/2)", s.name(), e)?,
            }
        }
        Ok(())
    }
}

/// Basis element of the scalar ring: a parameter monomial times a product
/// of formal traces.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarTerm {
    pub params: ParamMonomial,
    /// Sorted multiset of trace symbols.
    pub traces: Vec<CyclicWord>,
}

impl ScalarTerm {
    fn mul(&self, other: &ScalarTerm) -> ScalarTerm {
        let mut traces = self.traces.clone();
        traces.extend(other.traces.iter().cloned());
        traces.sort();
        ScalarTerm { params: self.params.mul(&other.params), traces }
    }
}

/// Exact coefficient: complex-rational combination of parameter monomials
/// times formal trace products. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scalar(BTreeMap<ScalarTerm, CplxRational>);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::constant(CplxRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(CplxRational::from_int(n))
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::constant(CplxRational::real(q))
    }

    pub fn constant(c: CplxRational) -> Self {
        let mut s = Scalar::zero();
        s.add_term(ScalarTerm::default(), c);
        s
    }

    pub fn param(sym: ParamSymbol, halves: u32) -> Self {
        Self::from_term(ScalarTerm { params: ParamMonomial::single(sym, halves), traces: vec![] })
    }

    pub fn trace_symbol(w: CyclicWord) -> Self {
        Self::from_term(ScalarTerm { params: ParamMonomial::one(), traces: vec![w] })
    }

    fn from_term(t: ScalarTerm) -> Self {
        let mut s = Scalar::zero();
        s.add_term(t, CplxRational::one());
        s
    }

    /// Normalized trace of a matrix product. Purely concrete products are
    /// folded to a number; anything with a formal letter becomes a trace
    /// symbol, with concrete multiples of the identity pulled out.
    pub fn trace_of(p: &MatProduct) -> Scalar {
        let atoms = p.atoms();
        let Some(first_formal) = atoms.iter().position(MatrixAtom::is_formal) else {
            return match atoms {
                [] => Scalar::one(),
                [MatrixAtom::Concrete(m)] => Scalar::constant(m.normalized_trace()),
                _ => unreachable!("adjacent concrete letters are always fused"),
            };
        };
        // rotate to start at a formal letter so the wrap-around concrete
        // pieces fuse
        let rotated =
            MatProduct::from_atoms(atoms[first_formal..].iter().chain(&atoms[..first_formal]).cloned());
        let mut coeff = CplxRational::one();
        let mut letters = Vec::with_capacity(rotated.atoms().len());
        for a in rotated.atoms() {
            match a {
                MatrixAtom::Concrete(m) => match m.as_scalar_multiple() {
                    Some(c) => coeff = &coeff * &c,
                    None => letters.push(a.clone()),
                },
                f => letters.push(f.clone()),
            }
        }
        let word = cyclic_normalize(letters).expect("contains a formal letter");
        let mut s = Scalar::zero();
        s.add_term(ScalarTerm { params: ParamMonomial::one(), traces: vec![word] }, coeff);
        s
    }

    pub fn add_term(&mut self, term: ScalarTerm, c: CplxRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(term) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ScalarTerm, &CplxRational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The value when the scalar has no parameters or trace symbols.
    pub fn as_constant(&self) -> Option<CplxRational> {
        match self.0.len() {
            0 => Some(CplxRational::zero()),
            1 => {
                let (t, c) = self.0.iter().next()?;
                (t.params.is_one() && t.traces.is_empty()).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &CplxRational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar(self.0.iter().map(|(t, v)| (t.clone(), v * c)).collect())
    }

    pub fn scale_rational(&self, q: &Rational) -> Scalar {
        self.scale(&CplxRational::real(q.clone()))
    }

    /// True when every parameter exponent is a whole number.
    pub fn has_integral_exponents(&self) -> bool {
        self.0.keys().all(|t| t.params.is_integral())
    }

    pub fn mentions_param(&self, sym: ParamSymbol) -> bool {
        self.0.keys().any(|t| t.params.half_exponent(sym) > 0)
    }

    pub fn is_param_free(&self) -> bool {
        self.0.keys().all(|t| t.params.is_one())
    }

    /// Integrates over `[0,1]` in the named variable: `x^a (1-x)^b` becomes
    /// the Beta value `a! b! / (a+b+1)!` and both symbols disappear.
    pub fn integrate(&self, pair: ParamPair) -> Result<Scalar> {
        let (x, y) = (pair.var(), pair.complement());
        let mut out = Scalar::zero();
        for (t, c) in &self.0 {
            let (a, b) = (t.params.half_exponent(x), t.params.half_exponent(y));
            if a % 2 == 1 || b % 2 == 1 {
                return Err(Error::NonIntegerExponent(format!(
                    "{} in term with coefficient {c}",
                    t.params
                )));
            }
            let w = beta_integer(a / 2, b / 2);
            let term = ScalarTerm { params: t.params.without(&[x, y]), traces: t.traces.clone() };
            out.add_term(term, c.scale(&w));
        }
        Ok(out)
    }

    /// Substitutes a rational value for one symbol; its partner is untouched.
    pub fn substitute(&self, sym: ParamSymbol, value: &Rational) -> Result<Scalar> {
        let root = rational_sqrt(value);
        let mut out = Scalar::zero();
        for (t, c) in &self.0 {
            let e = t.params.half_exponent(sym);
            let base = if e % 2 == 0 {
                num_traits::pow(value.clone(), (e / 2) as usize)
            } else {
                let r = root.clone().ok_or_else(|| Error::NotASquare {
                    symbol: sym.name(),
                    value: crate::scalars::rational::display_rational(value),
                })?;
                num_traits::pow(r, e as usize)
            };
            let term = ScalarTerm { params: t.params.without(&[sym]), traces: t.traces.clone() };
            out.add_term(term, c.scale(&base));
        }
        Ok(out)
    }

    /// Rewrites every power of `1-x` as a polynomial in `x`, so that equal
    /// functions of `x` get equal representations.
    pub fn expand_complement(&self, pair: ParamPair) -> Result<Scalar> {
        let (x, y) = (pair.var(), pair.complement());
        let mut out = Scalar::zero();
        for (t, c) in &self.0 {
            let (a, b) = (t.params.half_exponent(x), t.params.half_exponent(y));
            if b % 2 == 1 {
                return Err(Error::NonIntegerExponent(format!("{} cannot be expanded", t.params)));
            }
            let b = b / 2;
            for i in 0..=b {
                let w = int(binomial(b as i64, i as i64) * if i % 2 == 0 { 1 } else { -1 });
                let params = t.params.without(&[y]).with(x, a + 2 * i);
                out.add_term(ScalarTerm { params, traces: t.traces.clone() }, c.scale(&w));
            }
        }
        Ok(out)
    }

    /// d/dx with `d(1-x)/dx = -1`. Exponents of both symbols must be whole.
    pub fn derivative(&self, pair: ParamPair) -> Result<Scalar> {
        let (x, y) = (pair.var(), pair.complement());
        let mut out = Scalar::zero();
        for (t, c) in &self.0 {
            let (a, b) = (t.params.half_exponent(x), t.params.half_exponent(y));
            if a % 2 == 1 || b % 2 == 1 {
                return Err(Error::NonIntegerExponent(format!("cannot differentiate {}", t.params)));
            }
            if a > 0 {
                let params = t.params.with(x, a - 2);
                out.add_term(ScalarTerm { params, traces: t.traces.clone() }, c.scale(&int((a / 2) as i64)));
            }
            if b > 0 {
                let params = t.params.with(y, b - 2);
                out.add_term(
                    ScalarTerm { params, traces: t.traces.clone() },
                    c.scale(&int(-((b / 2) as i64))),
                );
            }
        }
        Ok(out)
    }

    /// Complex double value of a parameter-free, trace-free scalar.
    pub fn to_complex_f64(&self) -> Option<(f64, f64)> {
        self.as_constant().map(|c| c.to_f64())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (t, c) in &o.0 {
            out.add_term(t.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(self.0.iter().map(|(t, c)| (t.clone(), -c)).collect())
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (ta, ca) in &self.0 {
            for (tb, cb) in &o.0 {
                out.add_term(ta.mul(tb), ca * cb);
            }
        }
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        if self.0.len() < o.0.len() {
            return o + self;
        }
        let mut out = self;
        for (t, c) in o.0 {
            out.add_term(t, c);
        }
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl From<CplxRational> for Scalar {
    fn from(c: CplxRational) -> Self {
        Scalar::constant(c)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (t, c)) in self.0.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            if !t.params.is_one() {
                factors.push(t.params.to_string());
            }
            factors.extend(t.traces.iter().map(|w| w.to_string()));
            let mut coeff = c.clone();
            let mut negative = false;
            if c.is_real() && c.re < Rational::zero() {
                negative = true;
                coeff = -c;
            }
            let coeff_str = if !coeff.is_real() && !coeff.re.is_zero() {
                format!("({coeff})")
            } else {
                coeff.to_string()
            };
            let body = if factors.is_empty() {
                coeff_str
            } else if coeff.is_one() {
                factors.join("·")
            } else {
                format!("{coeff_str}·{}", factors.join("·"))
            };
            match (k, negative) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;

        #[derive(serde::Serialize)]
        struct Param {
            symbol: String,
            half_exponent: u32,
        }
        #[derive(serde::Serialize)]
        struct Term<'a> {
            coeff: &'a CplxRational,
            params: Vec<Param>,
            traces: Vec<Vec<String>>,
        }

        let mut seq = ser.serialize_seq(Some(self.0.len()))?;
        for (t, c) in &self.0 {
            let params = t
                .params
                .iter()
                .map(|(s, e)| Param { symbol: s.name(), half_exponent: *e })
                .collect();
            let traces = t
                .traces
                .iter()
                .map(|w| w.letters().iter().map(|a| a.to_string()).collect())
                .collect();
            seq.serialize_element(&Term { coeff: c, params, traces })?;
        }
        seq.end()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::one()
    }
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::matrix::QMatrix;
    use crate::scalars::rational::rat;

    fn t0() -> ParamSymbol {
        ParamSymbol::t(0)
    }

    #[test]
    fn ring_basics() {
        let a = &Scalar::from_int(3) + &Scalar::param(t0(), 1);
        assert_eq!(&Scalar::zero() + &a, a);
        let half = Scalar::param(t0(), 1);
        assert_eq!(&half * &half, Scalar::param(t0(), 2));
        let tr = Scalar::trace_of(&MatProduct::formal(1).mul(&MatProduct::formal(2)));
        let x = &Scalar::one() + &tr;
        let doubled = &x * &Scalar::from_int(2);
        assert_eq!(doubled, &x + &x);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn integrate_examples() {
        let pair = ParamPair::T(0);
        assert_eq!(Scalar::one().integrate(pair).unwrap(), Scalar::one());
        let omt = Scalar::param(ParamSymbol::one_minus_t(0), 2);
        assert_eq!(omt.integrate(pair).unwrap(), Scalar::from_rational(rat(1, 2)));
        let both = &Scalar::param(t0(), 2) * &omt;
        assert_eq!(both.integrate(pair).unwrap(), Scalar::from_rational(rat(1, 6)));
        assert!(matches!(
            Scalar::param(t0(), 1).integrate(pair),
            Err(Error::NonIntegerExponent(_))
        ));
        // other levels untouched
        let s1 = Scalar::param(ParamSymbol::s(1), 1);
        assert_eq!(s1.integrate(pair).unwrap(), s1);
    }

    #[test]
    fn substitute_examples() {
        let half = Scalar::param(t0(), 1);
        assert_eq!(half.substitute(t0(), &rat(1, 4)).unwrap(), Scalar::from_rational(rat(1, 2)));
        assert_eq!(Scalar::param(t0(), 4).substitute(t0(), &rat(1, 1)).unwrap(), Scalar::one());
        let omt = ParamSymbol::one_minus_t(0);
        let s = Scalar::param(omt, 2);
        assert_eq!(s.substitute(omt, &rat(3, 4)).unwrap(), Scalar::from_rational(rat(3, 4)));
        assert!(matches!(half.substitute(t0(), &rat(1, 2)), Err(Error::NotASquare { .. })));
        // partner untouched
        let mixed = &Scalar::param(t0(), 2) * &s;
        assert_eq!(mixed.substitute(t0(), &rat(1, 2)).unwrap(), s.scale_rational(&rat(1, 2)));
    }

    #[test]
    fn expand_and_differentiate() {
        let pair = ParamPair::T(0);
        let omt = Scalar::param(ParamSymbol::one_minus_t(0), 4); // (1-t)^2
        let expanded = omt.expand_complement(pair).unwrap();
        let expect = &(&Scalar::one() - &Scalar::param(t0(), 2).scale_rational(&int(2)))
            + &Scalar::param(t0(), 4);
        assert_eq!(expanded, expect);
        let d1 = omt.derivative(pair).unwrap().expand_complement(pair).unwrap();
        let d2 = expanded.derivative(pair).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn trace_folding() {
        let a = QMatrix::parse("[1,2;3,4]").unwrap();
        let p = MatProduct::concrete(a.clone());
        assert_eq!(Scalar::trace_of(&p), Scalar::from_rational(rat(5, 2)));
        assert_eq!(Scalar::trace_of(&MatProduct::identity()), Scalar::one());
        // tr(A Z1 B) = tr(Z1 B A)
        let b = QMatrix::parse("[0,1;1,0]").unwrap();
        let left = MatProduct::concrete(a.clone())
            .mul(&MatProduct::formal(1))
            .mul(&MatProduct::concrete(b.clone()));
        let right = MatProduct::formal(1).mul(&MatProduct::concrete(b.mul(&a)));
        assert_eq!(Scalar::trace_of(&left), Scalar::trace_of(&right));
        // scalar multiples of the identity are pulled out
        let two = QMatrix::scalar(2, CplxRational::from_int(2));
        let with_two = MatProduct::formal(3).mul(&MatProduct::concrete(two));
        assert_eq!(
            Scalar::trace_of(&with_two),
            Scalar::trace_of(&MatProduct::formal(3)).scale_rational(&int(2))
        );
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_int(2).to_string(), "2");
        let s = &Scalar::param(t0(), 1) - &Scalar::from_int(1);
        assert_eq!(s.to_string(), "-1 + t0^(1/2)");
        assert_eq!(Scalar::zero().to_string(), "0");
    }
}
