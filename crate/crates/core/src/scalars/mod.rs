//! Exact coefficient arithmetic: complex rationals, half-integer parameter
//! monomials, formal trace symbols and polynomials in `ν = 1/N²`.

pub mod matrix;
pub mod moment;
pub mod rational;
pub mod scalar;
pub mod trace;

pub use matrix::QMatrix;
pub use moment::MomentPoly;
pub use rational::{int, rat, CplxRational, Rational};
pub use scalar::{ParamKind, ParamMonomial, ParamPair, ParamSymbol, Scalar, ScalarTerm};
pub use trace::{cyclic_normalize, CyclicWord, MatProduct, MatrixAtom};
