use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Wire form of a rational: always `"num/den"`.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Short human form: `"3"` for integers, `"3/4"` otherwise.
pub fn display_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in '{s}'")));
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rational::from_integer(n))
        }
    }
}

/// Exact square root when `q` is the square of a rational.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `a! b! / (a+b+1)!`, the integral of `t^a (1-t)^b` over `[0, 1]`.
pub fn beta_integer(a: u32, b: u32) -> Rational {
    Rational::new(factorial(a) * factorial(b), factorial(a + b + 1))
}

/// Complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CplxRational {
    pub re: Rational,
    pub im: Rational,
}

impl CplxRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        CplxRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        CplxRational { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(int(n))
    }

    pub fn i() -> Self {
        CplxRational { re: Rational::zero(), im: Rational::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CplxRational { re: &self.re * q, im: &self.im * q }
    }

    pub fn conj(&self) -> Self {
        CplxRational { re: self.re.clone(), im: -&self.im }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Parses `"a"`, `"bi"`, `"a+bi"`, `"a-bi"` with rational `a`, `b`.
    pub fn parse(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty complex literal".into()));
        }
        if let Some(body) = s.strip_suffix('i') {
            // split at the last sign that is not the leading one
            let split = body
                .char_indices()
                .skip(1)
                .filter(|&(_, c)| c == '+' || c == '-')
                .map(|(k, _)| k)
                .last();
            let (re, im) = match split {
                Some(k) => (&body[..k], &body[k..]),
                None => ("0", body),
            };
            let im = match im {
                "" | "+" => "1",
                "-" => "-1",
                other => other.trim_start_matches('+'),
            };
            Ok(CplxRational::new(parse_rational(re)?, parse_rational(im)?))
        } else {
            Ok(CplxRational::real(parse_rational(&s)?))
        }
    }
}

impl fmt::Display for CplxRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |q: &Rational| -> String {
            if q.is_one() {
                "i".into()
            } else if (-q).is_one() {
                "-i".into()
            } else {
                format!("{}i", display_rational(q))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", display_rational(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im);
                if im.starts_with('-') {
                    write!(f, "{}{}", display_rational(&self.re), im)
                } else {
                    write!(f, "{}+{}", display_rational(&self.re), im)
                }
            }
        }
    }
}

impl Add for &CplxRational {
    type Output = CplxRational;
    fn add(self, o: &CplxRational) -> CplxRational {
        CplxRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &CplxRational {
    type Output = CplxRational;
    fn sub(self, o: &CplxRational) -> CplxRational {
        CplxRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &CplxRational {
    type Output = CplxRational;
    fn mul(self, o: &CplxRational) -> CplxRational {
        CplxRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Neg for &CplxRational {
    type Output = CplxRational;
    fn neg(self) -> CplxRational {
        CplxRational { re: -&self.re, im: -&self.im }
    }
}

impl Add for CplxRational {
    type Output = CplxRational;
    fn add(self, o: CplxRational) -> CplxRational {
        &self + &o
    }
}

impl Mul for CplxRational {
    type Output = CplxRational;
    fn mul(self, o: CplxRational) -> CplxRational {
        &self * &o
    }
}

impl serde::Serialize for CplxRational {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("CplxRational", 2)?;
        st.serialize_field("re", &format_rational(&self.re))?;
        st.serialize_field("im", &format_rational(&self.im))?;
        st.end()
    }
}
