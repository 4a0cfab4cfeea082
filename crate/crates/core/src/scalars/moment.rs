use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::Result;
use crate::scalars::rational::{CplxRational, Rational};
use crate::scalars::scalar::{ParamPair, ParamSymbol, Scalar};

/// Polynomial in `ν = 1/N²` with [`Scalar`] coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MomentPoly(BTreeMap<u32, Scalar>);

impl MomentPoly {
    pub fn zero() -> Self {
        MomentPoly(BTreeMap::new())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Scalar::from_int(n))
    }

    /// `c · ν^g`
    pub fn monomial(g: u32, c: Scalar) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(g, c);
        }
        MomentPoly(m)
    }

    /// Builds `Σ coeffs[g] ν^g` from integers.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        coeffs
            .iter()
            .enumerate()
            .map(|(g, &c)| MomentPoly::monomial(g as u32, Scalar::from_int(c)))
            .fold(MomentPoly::zero(), |a, b| &a + &b)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, g: u32) -> Scalar {
        self.0.get(&g).cloned().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<u32> {
        self.0.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Scalar)> {
        self.0.iter().map(|(g, c)| (*g, c))
    }

    pub fn add_at(&mut self, g: u32, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let sum = match self.0.get(&g) {
            Some(prev) => prev + c,
            None => c.clone(),
        };
        if sum.is_zero() {
            self.0.remove(&g);
        } else {
            self.0.insert(g, sum);
        }
    }

    /// Multiplies by `ν^k`.
    pub fn shift(&self, k: u32) -> MomentPoly {
        MomentPoly(self.0.iter().map(|(g, c)| (g + k, c.clone())).collect())
    }

    pub fn scale(&self, c: &Scalar) -> MomentPoly {
        let mut out = MomentPoly::zero();
        for (g, v) in &self.0 {
            out.add_at(*g, &(v * c));
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<MomentPoly> {
        let mut out = MomentPoly::zero();
        for (g, v) in &self.0 {
            out.add_at(*g, &f(v)?);
        }
        Ok(out)
    }

    /// `Σ_g coeff_g · N^{-2g}`.
    pub fn eval(&self, n: &Rational) -> Scalar {
        let nu = (n * n).recip();
        self.0
            .iter()
            .map(|(g, c)| c.scale_rational(&num_traits::pow(nu.clone(), *g as usize)))
            .sum()
    }

    pub fn integrate(&self, pair: ParamPair) -> Result<MomentPoly> {
        self.map_coeffs(|c| c.integrate(pair))
    }

    pub fn substitute(&self, sym: ParamSymbol, value: &Rational) -> Result<MomentPoly> {
        self.map_coeffs(|c| c.substitute(sym, value))
    }

    pub fn expand_complement(&self, pair: ParamPair) -> Result<MomentPoly> {
        self.map_coeffs(|c| c.expand_complement(pair))
    }

    pub fn derivative(&self, pair: ParamPair) -> Result<MomentPoly> {
        self.map_coeffs(|c| c.derivative(pair))
    }

    /// Integer coefficients in ν order, when every coefficient is a plain
    /// integer.
    pub fn integer_coeffs(&self) -> Option<Vec<i64>> {
        use num_traits::ToPrimitive;
        let deg = self.degree().map_or(0, |d| d as usize + 1);
        let mut out = vec![0; deg];
        for (g, c) in &self.0 {
            let v = c.as_constant()?;
            if !v.is_real() || !v.re.is_integer() {
                return None;
            }
            out[*g as usize] = v.re.to_integer().to_i64()?;
        }
        Some(out)
    }

    pub fn is_param_free(&self) -> bool {
        self.0.values().all(Scalar::is_param_free)
    }

    /// Complex double value at `ν`, for trace-free, parameter-free polys.
    pub fn eval_f64(&self, nu: f64) -> Option<(f64, f64)> {
        let mut acc = (0.0, 0.0);
        for (g, c) in &self.0 {
            let (re, im) = c.to_complex_f64()?;
            let w = nu.powi(*g as i32);
            acc.0 += re * w;
            acc.1 += im * w;
        }
        Some(acc)
    }
}

impl Add for &MomentPoly {
    type Output = MomentPoly;
    fn add(self, o: &MomentPoly) -> MomentPoly {
        let mut out = self.clone();
        for (g, c) in &o.0 {
            out.add_at(*g, c);
        }
        out
    }
}

impl Sub for &MomentPoly {
    type Output = MomentPoly;
    fn sub(self, o: &MomentPoly) -> MomentPoly {
        self + &(-o)
    }
}

impl Neg for &MomentPoly {
    type Output = MomentPoly;
    fn neg(self) -> MomentPoly {
        MomentPoly(self.0.iter().map(|(g, c)| (*g, -c)).collect())
    }
}

impl Mul for &MomentPoly {
    type Output = MomentPoly;
    fn mul(self, o: &MomentPoly) -> MomentPoly {
        let mut out = MomentPoly::zero();
        for (ga, ca) in &self.0 {
            for (gb, cb) in &o.0 {
                out.add_at(ga + gb, &(ca * cb));
            }
        }
        out
    }
}

impl Add for MomentPoly {
    type Output = MomentPoly;
    fn add(self, o: MomentPoly) -> MomentPoly {
        &self + &o
    }
}

impl std::iter::Sum for MomentPoly {
    fn sum<I: Iterator<Item = MomentPoly>>(iter: I) -> MomentPoly {
        iter.fold(MomentPoly::zero(), |mut acc, p| {
            for (g, c) in &p.0 {
                acc.add_at(*g, c);
            }
            acc
        })
    }
}

impl From<Scalar> for MomentPoly {
    fn from(c: Scalar) -> Self {
        MomentPoly::constant(c)
    }
}

impl From<CplxRational> for MomentPoly {
    fn from(c: CplxRational) -> Self {
        MomentPoly::constant(Scalar::constant(c))
    }
}

impl fmt::Display for MomentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (g, c)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let coeff = if c.len() > 1 { format!("({c})") } else { c.to_string() };
            match g {
                0 => write!(f, "{coeff}")?,
                1 => write!(f, "{coeff}·ν")?,
                g => write!(f, "{coeff}·ν^{g}")?,
            }
        }
        Ok(())
    }
}

impl serde::Serialize for MomentPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(serde::Serialize)]
        struct Term<'a> {
            nu_power: u32,
            coeff: &'a Scalar,
        }
        #[derive(serde::Serialize)]
        struct Poly<'a> {
            terms: Vec<Term<'a>>,
        }
        Poly { terms: self.0.iter().map(|(g, c)| Term { nu_power: *g, coeff: c }).collect() }
            .serialize(ser)
    }
}
