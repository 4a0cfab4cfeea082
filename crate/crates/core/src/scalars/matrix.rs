use std::fmt;

use crate::error::{Error, Result};
use crate::scalars::rational::{int, CplxRational};

/// Dense square matrix with exact complex-rational entries, row-major.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QMatrix {
    dim: usize,
    entries: Vec<CplxRational>,
}

impl QMatrix {
    pub fn new(dim: usize, entries: Vec<CplxRational>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(QMatrix { dim, entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, CplxRational::one())
    }

    pub fn scalar(dim: usize, c: CplxRational) -> Self {
        let mut entries = vec![CplxRational::zero(); dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = c.clone();
        }
        QMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &CplxRational {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[CplxRational] {
        &self.entries
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch in product");
        let d = self.dim;
        let mut out = vec![CplxRational::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out[i * d + j] = &out[i * d + j] + &(a * b);
                    }
                }
            }
        }
        QMatrix { dim: d, entries: out }
    }

    /// Normalized trace `(1/d) Tr`.
    pub fn normalized_trace(&self) -> CplxRational {
        let mut acc = CplxRational::zero();
        for k in 0..self.dim {
            acc = &acc + self.get(k, k);
        }
        acc.scale(&crate::scalars::rational::rat(1, self.dim as i64))
    }

    /// `Some(c)` when the matrix equals `c · I`.
    pub fn as_scalar_multiple(&self) -> Option<CplxRational> {
        let c = self.get(0, 0).clone();
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.get(i, j);
                if (i == j && *e != c) || (i != j && !e.is_zero()) {
                    return None;
                }
            }
        }
        Some(c)
    }

    pub fn is_identity(&self) -> bool {
        self.as_scalar_multiple().is_some_and(|c| c.is_one())
    }

    /// Parses `[a, b; c, d]` where entries are complex rationals.
    pub fn parse(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("matrix literal must be bracketed: '{s}'")))?;
        let rows: Vec<Vec<CplxRational>> = body
            .split(';')
            .map(|row| row.split(',').map(CplxRational::parse).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parse(format!("matrix literal is not square: '{s}'")));
        }
        QMatrix::new(dim, rows.into_iter().flatten().collect())
    }

    pub fn from_ints(dim: usize, entries: &[i64]) -> Result<Self> {
        QMatrix::new(dim, entries.iter().map(|&n| CplxRational::real(int(n))).collect())
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ";")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}
