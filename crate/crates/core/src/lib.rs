//! Exact determinants of square matrices of multivariate integer polynomials.
//!
//! The determinant is computed by a modular method: the entries are reduced
//! modulo several word-size Fourier-friendly primes, evaluated on a grid of
//! roots of unity by number-theoretic transforms, the numeric determinant is
//! taken at every grid node, the results are interpolated back to
//! coefficients, and the exact integers are recovered by mixed-radix CRT.
//!
//! Polynomial containers are generic over the coefficient scalar (see
//! [`scalar`]); the aliases below cover the common cases.

pub mod error;
pub mod modarith;
pub mod moddet;
pub mod ntt;
pub mod pipeline;
pub mod polytensor;
pub mod reconstruct;
pub mod scalar;
pub mod sylvester;
pub mod text;

use num_bigint::BigInt;

pub use error::{ArithError, ParseError, PipelineError, ShapeError};
pub use modarith::PrimeSpec;
pub use pipeline::{resume, run, Config, Determinant, Plan, Workspace};
pub use polytensor::{CoeffTensor, ModTensor, Poly, PolyMatrix};

/// Arbitrary-precision integer polynomial.
pub type IntPoly = Poly<BigInt>;
/// Dense tensor of arbitrary-precision integer coefficients.
pub type IntTensor = CoeffTensor<BigInt>;
/// Matrix of arbitrary-precision integer polynomials.
pub type IntMatrix = PolyMatrix<BigInt>;
/// Polynomial with machine-word coefficients.
pub type SmallPoly = Poly<i64>;
/// Matrix of machine-word coefficient polynomials.
pub type SmallMatrix = PolyMatrix<i64>;
