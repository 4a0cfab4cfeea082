//! Matrix letters, their products, and canonical cyclic words used as
//! formal trace symbols.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalars::matrix::QMatrix;

/// A single deterministic matrix letter: either a formal symbol `Z<i>` or a
/// concrete exact matrix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatrixAtom {
    Formal(u32),
    Concrete(Arc<QMatrix>),
}

impl MatrixAtom {
    pub fn concrete(m: QMatrix) -> Self {
        MatrixAtom::Concrete(Arc::new(m))
    }

    pub fn is_formal(&self) -> bool {
        matches!(self, MatrixAtom::Formal(_))
    }
}

impl fmt::Display for MatrixAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixAtom::Formal(i) => write!(f, "Z{i}"),
            MatrixAtom::Concrete(m) => write!(f, "{m}"),
        }
    }
}

/// Product of matrix letters. The empty product is the identity.
///
/// Adjacent concrete letters are multiplied eagerly and concrete identities
/// are dropped, so two products that are equal as words of formal letters
/// interleaved with concrete blocks have the same representation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatProduct(Vec<MatrixAtom>);

impl MatProduct {
    pub fn identity() -> Self {
        MatProduct(Vec::new())
    }

    pub fn formal(id: u32) -> Self {
        MatProduct(vec![MatrixAtom::Formal(id)])
    }

    pub fn concrete(m: QMatrix) -> Self {
        let mut p = MatProduct::identity();
        p.push(MatrixAtom::concrete(m));
        p
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = MatrixAtom>) -> Self {
        let mut p = MatProduct::identity();
        for a in atoms {
            p.push(a);
        }
        p
    }

    pub fn atoms(&self) -> &[MatrixAtom] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, atom: MatrixAtom) {
        match atom {
            MatrixAtom::Concrete(m) => {
                let fused = match self.0.last() {
                    Some(MatrixAtom::Concrete(prev)) => {
                        let prod = prev.mul(&m);
                        self.0.pop();
                        prod
                    }
                    _ => (*m).clone(),
                };
                if !fused.is_identity() {
                    self.0.push(MatrixAtom::concrete(fused));
                }
            }
            formal => self.0.push(formal),
        }
    }

    pub fn mul(&self, other: &MatProduct) -> MatProduct {
        let mut out = self.clone();
        for a in &other.0 {
            out.push(a.clone());
        }
        out
    }

    /// Dimension of the concrete letters, if any.
    pub fn concrete_dim(&self) -> Result<Option<usize>> {
        let mut dim = None;
        for a in &self.0 {
            if let MatrixAtom::Concrete(m) = a {
                match dim {
                    None => dim = Some(m.dim()),
                    Some(d) if d != m.dim() => {
                        return Err(Error::Dimension(format!(
                            "concrete letters of dimensions {d} and {} in one product",
                            m.dim()
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(dim)
    }
}

impl fmt::Display for MatProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "I");
        }
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// A nonempty letter sequence stored in its lexicographically minimal
/// rotation, standing for `tr` of the product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord(Vec<MatrixAtom>);

impl CyclicWord {
    pub fn letters(&self) -> &[MatrixAtom] {
        &self.0
    }
}

pub fn cyclic_normalize(letters: Vec<MatrixAtom>) -> Result<CyclicWord> {
    if letters.is_empty() {
        return Err(Error::EmptyTraceWord);
    }
    let n = letters.len();
    let best = (0..n)
        .min_by(|&a, &b| {
            let ra = letters[a..].iter().chain(&letters[..a]);
            let rb = letters[b..].iter().chain(&letters[..b]);
            ra.cmp(rb)
        })
        .unwrap_or(0);
    let mut out = letters;
    out.rotate_left(best);
    Ok(CyclicWord(out))
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tr[")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "]")
    }
}
