//! Dense multivariate polynomial representation.
//!
//! Polynomials are parsed and normalised as sparse term maps ([`Poly`]) and
//! encoded into zero-filled row-major tensors ([`CoeffTensor`]) whose axis
//! lengths are powers of two, ready for the transforms.

mod matrix;
mod poly;
mod tensor;

pub use matrix::{DegreeVector, PolyMatrix};
pub use poly::{Monomial, Poly};
pub use tensor::{encode, pad_shape, CoeffTensor, ModTensor};

pub(crate) use tensor::transpose;
