//! GUE sampling and Monte Carlo estimates of expected normalized traces.
//!
//! Only words in GUE letters can be evaluated: free semicircular letters
//! have no finite matrix model, so they are rejected.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, AddAssign};

use matrixmultiply::CGemmOption;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::ncpoly::{BasisSymbol, Flavor, Monomial, NCPoly, VecExpr};
use crate::scalars::{MatProduct, MatrixAtom, QMatrix, Scalar};

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl FloatMatrix {
    pub fn zeros(n: usize) -> Self {
        FloatMatrix { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..n {
            m.data[k * n + k] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("rows of a square matrix must have equal length".into()));
        }
        Ok(FloatMatrix { n, data: rows.concat() })
    }

    pub fn from_exact(m: &QMatrix) -> Self {
        let data = m
            .entries()
            .iter()
            .map(|c| {
                let (re, im) = c.to_f64();
                Complex64::new(re, im)
            })
            .collect();
        FloatMatrix { n: m.dim(), data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn mul(&self, other: &FloatMatrix) -> FloatMatrix {
        assert_eq!(self.n, other.n, "matrix dimension mismatch in product");
        let n = self.n;
        let mut out = Self::zeros(n);
        let (rs, cs) = (n as isize, 1isize);
        // SAFETY: Complex64 is repr(C) with layout [re, im]; all three
        // buffers hold n*n elements with the given strides.
        unsafe {
            matrixmultiply::zgemm(
                CGemmOption::Standard,
                CGemmOption::Standard,
                n,
                n,
                n,
                [1.0, 0.0],
                self.data.as_ptr().cast(),
                rs,
                cs,
                other.data.as_ptr().cast(),
                rs,
                cs,
                [0.0, 0.0],
                out.data.as_mut_ptr().cast(),
                rs,
                cs,
            );
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> FloatMatrix {
        FloatMatrix { n: self.n, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn adjoint(&self) -> FloatMatrix {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &FloatMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `‖X − X*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `(1/N) Tr`.
    pub fn normalized_trace(&self) -> Complex64 {
        let sum: Complex64 = (0..self.n).map(|k| self.data[k * self.n + k]).sum();
        sum / self.n as f64
    }

    /// `(1/N) Tr(AB)` without forming `AB`.
    pub fn trace_of_product(&self, other: &FloatMatrix) -> Complex64 {
        let n = self.n;
        let mut sum = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                sum += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        sum / n as f64
    }
}

impl Add for &FloatMatrix {
    type Output = FloatMatrix;

    fn add(self, o: &FloatMatrix) -> FloatMatrix {
        assert_eq!(self.n, o.n, "matrix dimension mismatch in sum");
        FloatMatrix { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}

impl AddAssign<&FloatMatrix> for FloatMatrix {
    fn add_assign(&mut self, o: &FloatMatrix) {
        assert_eq!(self.n, o.n, "matrix dimension mismatch in sum");
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b;
        }
    }
}

/// A GUE matrix: `√N X_jj`, `√(2N) Re X_ij`, `√(2N) Im X_ij` (i < j) are
/// independent standard normals.
pub fn sample_gue<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<FloatMatrix> {
    if n == 0 {
        return Err(Error::Dimension("GUE dimension must be at least 1".into()));
    }
    let diag = (n as f64).sqrt().recip();
    let off = (2.0 * n as f64).sqrt().recip();
    let mut m = FloatMatrix::zeros(n);
    for i in 0..n {
        let d: f64 = rng.sample(StandardNormal);
        m.data[i * n + i] = Complex64::new(d * diag, 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re * off, im * off);
            m.data[i * n + j] = z;
            m.data[j * n + i] = z.conj();
        }
    }
    Ok(m)
}

fn check_gue_only(f: &NCPoly) -> Result<()> {
    match f.symbols().into_iter().find(|s| s.flavor() == Flavor::Semi) {
        Some(s) => Err(Error::SemicircularInNumeric(s.to_string())),
        None => Ok(()),
    }
}

fn exact_product(letters: &[MatrixAtom]) -> Result<QMatrix> {
    let mut acc: Option<QMatrix> = None;
    for a in letters {
        let MatrixAtom::Concrete(m) = a else {
            return Err(Error::Numeric(format!("formal matrix letter {a} has no numeric value")));
        };
        acc = Some(match acc {
            None => (**m).clone(),
            Some(p) => p.mul(m),
        });
    }
    acc.ok_or(Error::EmptyTraceWord)
}

/// Numeric value of a coefficient: parameter-free, with only concrete
/// trace symbols.
pub fn scalar_value(c: &Scalar) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (term, coeff) in c.terms() {
        if !term.params.is_one() {
            return Err(Error::Numeric(format!("coefficient {c} depends on interpolation parameters")));
        }
        let (re, im) = coeff.to_f64();
        let mut v = Complex64::new(re, im);
        for w in &term.traces {
            let (re, im) = exact_product(w.letters())?.normalized_trace().to_f64();
            v *= Complex64::new(re, im);
        }
        sum += v;
    }
    Ok(sum)
}

/// Evaluates words with a per-call memo of sub-products, so words sharing
/// factors (within one polynomial or across a batch) reuse them.
struct Evaluator<'a> {
    n: usize,
    assignment: &'a BTreeMap<BasisSymbol, FloatMatrix>,
    memo: HashMap<Monomial, FloatMatrix>,
}

impl<'a> Evaluator<'a> {
    fn new(n: usize, assignment: &'a BTreeMap<BasisSymbol, FloatMatrix>) -> Self {
        Evaluator { n, assignment, memo: HashMap::new() }
    }

    fn mat(&self, m: &MatProduct) -> Result<Option<FloatMatrix>> {
        if m.is_identity() {
            return Ok(None);
        }
        let q = exact_product(m.atoms())?;
        if q.dim() != self.n {
            return Err(Error::Dimension(format!("{}×{} matrix letter in a dimension-{} evaluation", q.dim(), q.dim(), self.n)));
        }
        Ok(Some(FloatMatrix::from_exact(&q)))
    }

    fn var(&self, v: &VecExpr) -> Result<FloatMatrix> {
        let mut out = FloatMatrix::zeros(self.n);
        for (s, c) in v.terms() {
            if s.flavor() == Flavor::Semi {
                return Err(Error::SemicircularInNumeric(s.to_string()));
            }
            let x = self.assignment.get(s).ok_or_else(|| Error::UndefinedSymbol(format!("no matrix assigned to {s}")))?;
            if x.dim() != self.n {
                return Err(Error::Dimension(format!("matrix for {s} has dimension {}", x.dim())));
            }
            out += &x.scale(scalar_value(c)?);
        }
        Ok(out)
    }

    fn product(&mut self, m: &Monomial) -> Result<FloatMatrix> {
        if let Some(p) = self.memo.get(m) {
            return Ok(p.clone());
        }
        let p = match m.degree() {
            0 => self.mat(&m.mats()[0])?.unwrap_or_else(|| FloatMatrix::identity(self.n)),
            1 => {
                let mut p = self.var(&m.vars()[0])?;
                if let Some(a) = self.mat(&m.mats()[0])? {
                    p = a.mul(&p);
                }
                if let Some(b) = self.mat(&m.mats()[1])? {
                    p = p.mul(&b);
                }
                p
            }
            r => {
                let (l, rt) = m.split_before_var(r / 2);
                self.product(&l)?.mul(&self.product(&rt)?)
            }
        };
        self.memo.insert(m.clone(), p.clone());
        Ok(p)
    }

    fn trace(&mut self, m: &Monomial) -> Result<Complex64> {
        let r = m.degree();
        if r < 2 {
            return Ok(self.product(m)?.normalized_trace());
        }
        let (l, rt) = m.split_before_var(r / 2);
        Ok(self.product(&l)?.trace_of_product(&self.product(&rt)?))
    }

    fn poly_trace(&mut self, f: &NCPoly) -> Result<Complex64> {
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, c) in f.terms() {
            sum += scalar_value(c)? * self.trace(m)?;
        }
        Ok(sum)
    }
}

/// `f(X)` for an assignment of matrices to the GUE symbols of `f`.
pub fn eval_poly_float(f: &NCPoly, assignment: &BTreeMap<BasisSymbol, FloatMatrix>) -> Result<FloatMatrix> {
    check_gue_only(f)?;
    let n = assignment
        .values()
        .next()
        .map(FloatMatrix::dim)
        .or(f.concrete_dim()?)
        .ok_or_else(|| Error::Dimension("no matrix fixes the dimension".into()))?;
    let mut ev = Evaluator::new(n, assignment);
    let mut out = FloatMatrix::zeros(n);
    for (m, c) in f.terms() {
        out += &ev.product(m)?.scale(scalar_value(c)?);
    }
    Ok(out)
}

fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Parts {
        re: f64,
        im: f64,
    }
    Parts { re: z.re, im: z.im }.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MCEstimate {
    #[serde(serialize_with = "serialize_complex")]
    pub mean: Complex64,
    /// Sample standard deviation over `√n_samples`.
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub dim: usize,
}

impl MCEstimate {
    /// `(Re mean − exact) / stderr`.
    pub fn z_score(&self, exact: f64) -> f64 {
        (self.mean.re - exact) / self.stderr
    }
}

/// Fixed-shape pairwise summation, so the result does not depend on how
/// the samples were scheduled.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn summarize(values: &[Complex64], seed: u64, dim: usize) -> MCEstimate {
    let n = values.len();
    let mean = pairwise_sum(values) / n as f64;
    let dev: Vec<Complex64> = values.iter().map(|v| Complex64::new((v - mean).norm_sqr(), 0.0)).collect();
    let var = if n > 1 { pairwise_sum(&dev).re / (n - 1) as f64 } else { f64::NAN };
    MCEstimate { mean, stderr: (var / n as f64).sqrt(), n_samples: n, seed, dim }
}

/// The random stream of sample `index`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws one GUE matrix per symbol, in symbol order.
pub fn sample_assignment(symbols: &[BasisSymbol], n: usize, rng: &mut ChaCha8Rng) -> Result<BTreeMap<BasisSymbol, FloatMatrix>> {
    symbols.iter().map(|s| Ok((s.clone(), sample_gue(n, rng)?))).collect()
}

pub fn mc_expected_trace(f: &NCPoly, n: usize, samples: usize, seed: u64) -> Result<MCEstimate> {
    Ok(mc_batch_with(std::slice::from_ref(f), n, samples, seed, Exec::default())?.remove(0))
}

/// Estimates for several polynomials from the same draws: sample `k` uses
/// stream `k` of `seed` and assigns matrices to the union of symbols.
pub fn mc_batch(fs: &[NCPoly], n: usize, samples: usize, seed: u64) -> Result<Vec<MCEstimate>> {
    mc_batch_with(fs, n, samples, seed, Exec::default())
}

pub fn mc_batch_with(fs: &[NCPoly], n: usize, samples: usize, seed: u64, exec: Exec) -> Result<Vec<MCEstimate>> {
    if samples == 0 {
        return Err(Error::Numeric("at least one sample is required".into()));
    }
    for f in fs {
        check_gue_only(f)?;
    }
    let mut symbols: Vec<BasisSymbol> = fs.iter().flat_map(NCPoly::symbols).collect();
    symbols.sort();
    symbols.dedup();
    let draws = exec.map_range(samples, |k| {
        let mut rng = sample_rng(seed, k as u64);
        let assignment = sample_assignment(&symbols, n, &mut rng)?;
        let mut ev = Evaluator::new(n, &assignment);
        fs.iter().map(|f| ev.poly_trace(f)).collect::<Result<Vec<_>>>()
    });
    let draws = draws.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..fs.len())
        .map(|j| {
            let vals: Vec<Complex64> = draws.iter().map(|d| d[j]).collect();
            summarize(&vals, seed, n)
        })
        .collect())
}
