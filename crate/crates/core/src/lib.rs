//! Numerical toolkit for finite-dimensional real spectral triples.
//!
//! Operators are dense complex matrices. The crate decides reality,
//! 1st-order, 2nd-order and Hodge conditions by direct computation of
//! generated algebras, commutants and Wedderburn structure, and carries the
//! closed-form classification of Standard Model internal Dirac operators so
//! the two routes can be compared.

pub mod algebra;
pub mod io;
pub mod linalg;
pub mod scan;
pub mod sm;
pub mod triple;

pub use algebra::{AlgebraError, AntilinearMap, StarAlgebra, WedderburnBlock};
pub use linalg::{ComplexMatrix, LinalgError, MatrixSubspace, Tolerance};
pub use triple::{RealSpectralTriple, Sign, SignTriple, TripleAnalysis, TripleError};
