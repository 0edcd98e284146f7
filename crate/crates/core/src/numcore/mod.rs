//! Exact integer linear algebra and extended-precision numerics.

pub mod eigen;
pub mod ext;
pub mod fast;
pub mod matrix;
pub mod poly;
pub mod roots;

pub use eigen::{null_vector, singular_values, sym_eigenvalues};
pub use ext::{max_precision_bits, CInterval, ExtReal, Interval, Rounding, DEFAULT_PRECISION_BITS};
pub use matrix::{IntMatrix, IntVector};
pub use poly::IntPolynomial;
pub use roots::{certified_roots, poly_roots, ComplexList, ComplexRoot, RootBox};
