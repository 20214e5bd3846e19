//! Coefficient scalar traits.
//!
//! Polynomials, tensors and matrices are generic over their coefficient ring.
//! [`Coeff`] is what storage and normalisation need; [`IntCoeff`] adds what
//! the modular pipeline needs to reduce a coefficient into a prime field and
//! to bound it. `i64`, `i128` and `BigInt` all qualify.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::Neg;

use num_bigint::{BigInt, ToBigInt};
use num_integer::Integer;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Coeff: Num + Neg<Output = Self> + Clone + Eq + Hash + Debug + Send + Sync {}

impl<T> Coeff for T where T: Num + Neg<Output = Self> + Clone + Eq + Hash + Debug + Send + Sync {}

pub trait IntCoeff: Coeff + Integer + Signed + FromPrimitive + ToPrimitive + ToBigInt + Display {
    /// Canonical residue in `[0, p)`.
    fn residue(&self, p: u64) -> u64 {
        if let Some(modulus) = Self::from_u64(p) {
            if let Some(r) = self.mod_floor(&modulus).to_u64() {
                return r;
            }
        }
        let big = self.to_bigint().expect("integer coefficient converts to BigInt");
        big.mod_floor(&BigInt::from(p)).to_u64().expect("residue below p")
    }
}

impl<T> IntCoeff for T where T: Coeff + Integer + Signed + FromPrimitive + ToPrimitive + ToBigInt + Display {}
