//! Mixed-radix CRT reconstruction.
//!
//! An integer `X` in `[0, P)` is written as `X = sum(alpha_j * m_j)` with
//! `m_0 = 1`, `m_j = p_0 * ... * p_{j-1}` and digits `0 <= alpha_j < p_j`.
//! The digits come from word-size arithmetic only:
//!
//! `alpha_i = ((x_i - alpha_0) c_i - sum_{1<=j<i} alpha_j m_j c_i) mod p_i`
//!
//! where `c_i = (p_0 * ... * p_{i-1})^-1 mod p_i`. Multi-precision appears
//! only in the final Horner evaluation.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::ShapeError;
use crate::modarith::{add_mod, inv_mod, mul_mod, sub_mod};
use crate::polytensor::{CoeffTensor, ModTensor};

/// Coefficients per scheduling unit when the caller does not choose one.
pub const DEFAULT_CHUNK_COEFFS: usize = 1024;

/// Precomputed tables for one ordered list of primes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtBasis {
    primes: Vec<u64>,
    /// `weight_mod[i][j] = m_j mod p_i` for `j < i`.
    weight_mod: Vec<Vec<u64>>,
    /// `inverses[i] = c_i`; `inverses[0]` is unused and set to 1.
    inverses: Vec<u64>,
    weights: Vec<BigUint>,
    product: BigUint,
}

/// Mixed-radix digits of one integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MrDigits(pub Vec<u64>);

impl CrtBasis {
    pub fn new(primes: &[u64]) -> Result<Self, ShapeError> {
        if primes.is_empty() {
            return Err(ShapeError::Mismatch("empty prime list".into()));
        }
        for (i, &p) in primes.iter().enumerate() {
            if primes[..i].contains(&p) {
                return Err(ShapeError::DuplicatePrime(p));
            }
        }
        let mut weights = Vec::with_capacity(primes.len());
        let mut product = BigUint::one();
        for &p in primes {
            weights.push(product.clone());
            product *= p;
        }
        let mut weight_mod = Vec::with_capacity(primes.len());
        let mut inverses = Vec::with_capacity(primes.len());
        for (i, &p) in primes.iter().enumerate() {
            let row: Vec<u64> = (0..i).map(|j| (&weights[j] % p).iter_u64_digits().next().unwrap_or(0)).collect();
            // m_i mod p_i = m_{i-1} * p_{i-1} mod p_i
            let m_i = if i == 0 { 1 % p } else { mul_mod(row[i - 1], primes[i - 1] % p, p) };
            let c = if i == 0 { 1 } else { inv_mod(m_i, p).map_err(|_| ShapeError::DuplicatePrime(p))? };
            weight_mod.push(row);
            inverses.push(c);
        }
        Ok(CrtBasis { primes: primes.to_vec(), weight_mod, inverses, weights, product })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `c_i` for `i >= 1`.
    pub fn inverse(&self, i: usize) -> u64 {
        self.inverses[i]
    }

    /// Mixed-radix weights `m_j`.
    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    pub fn product(&self) -> &BigUint {
        &self.product
    }

    /// Digits for one residue set, by the serial recurrence.
    pub fn mrc_digits(&self, residues: &[u64]) -> MrDigits {
        let mut digits = vec![0u64; self.len()];
        self.digits_into(residues, &mut digits);
        MrDigits(digits)
    }

    fn digits_into(&self, x: &[u64], alpha: &mut [u64]) {
        assert_eq!(x.len(), self.len(), "one residue per prime");
        alpha[0] = x[0];
        for i in 1..self.len() {
            let p = self.primes[i];
            let c = self.inverses[i];
            let t1 = sub_mod(x[i] % p, alpha[0] % p, p);
            let t2 = mul_mod(t1, c, p);
            let mut t3 = 0;
            for j in 1..i {
                let t4 = mul_mod(alpha[j] % p, self.weight_mod[i][j], p);
                t3 = add_mod(t3, mul_mod(t4, c, p), p);
            }
            alpha[i] = sub_mod(t2, t3, p);
        }
    }

    /// `alpha_0 + p_0 (alpha_1 + p_1 (alpha_2 + ...))`, in `[0, P)`.
    pub fn horner_lift(&self, digits: &MrDigits) -> BigUint {
        assert_eq!(digits.0.len(), self.len(), "one digit per prime");
        let mut x = BigUint::zero();
        for i in (0..self.len()).rev() {
            x *= self.primes[i];
            x += digits.0[i];
        }
        x
    }

    /// Signed integer congruent to each residue, in `(-P/2, P/2]`.
    pub fn reconstruct(&self, residues: &[u64]) -> BigInt {
        signed_lift(&self.horner_lift(&self.mrc_digits(residues)), &self.product)
    }
}

/// Maps `x` in `[0, P)` to `x` if `2x <= P`, else `x - P`.
pub fn signed_lift(x: &BigUint, product: &BigUint) -> BigInt {
    if x << 1u32 <= *product {
        BigInt::from_biguint(Sign::Plus, x.clone())
    } else {
        BigInt::from_biguint(Sign::Plus, x.clone()) - BigInt::from_biguint(Sign::Plus, product.clone())
    }
}

/// Combines one residue tensor per prime (in basis order) into signed
/// integer coefficients.
pub fn combine_tensor(
    tensors: &[ModTensor],
    basis: &CrtBasis,
    chunk_coeffs: usize,
) -> Result<CoeffTensor<BigInt>, ShapeError> {
    if tensors.len() != basis.len() {
        return Err(ShapeError::Mismatch(format!("{} residue tensors for {} primes", tensors.len(), basis.len())));
    }
    let first = &tensors[0];
    for (t, &p) in tensors.iter().zip(basis.primes()) {
        if t.prime.p != p {
            return Err(ShapeError::Mismatch(format!("tensor mod {} where basis has {p}", t.prime.p)));
        }
        if t.shape() != first.shape() || t.tensor.axes() != first.tensor.axes() {
            return Err(ShapeError::Mismatch(format!("shape {:?} vs {:?}", t.shape(), first.shape())));
        }
    }
    let slices: Vec<&[u64]> = tensors.iter().map(|t| t.values()).collect();
    let coeffs = combine_slices(&slices, basis, chunk_coeffs)?;
    CoeffTensor::from_parts(first.shape().to_vec(), first.tensor.axes().to_vec(), coeffs)
}

/// Coefficient-wise reconstruction over raw residue buffers, one per prime.
pub fn combine_slices(residues: &[&[u64]], basis: &CrtBasis, chunk_coeffs: usize) -> Result<Vec<BigInt>, ShapeError> {
    let pn = basis.len();
    if residues.len() != pn {
        return Err(ShapeError::Mismatch(format!("{} residue buffers for {pn} primes", residues.len())));
    }
    let len = residues[0].len();
    if residues.iter().any(|r| r.len() != len) {
        return Err(ShapeError::Mismatch("residue buffers differ in length".into()));
    }
    let chunk = chunk_coeffs.max(1);
    let mut out = vec![BigInt::zero(); len];
    out.par_chunks_mut(chunk).enumerate().for_each(|(k, dst)| {
        let base = k * chunk;
        // coefficient-major copy of this chunk's residues
        let mut local = vec![0u64; dst.len() * pn];
        for (i, r) in residues.iter().enumerate() {
            for (c, &v) in r[base..base + dst.len()].iter().enumerate() {
                local[c * pn + i] = v;
            }
        }
        let mut digits = MrDigits(vec![0; pn]);
        for (c, slot) in dst.iter_mut().enumerate() {
            basis.digits_into(&local[c * pn..(c + 1) * pn], &mut digits.0);
            *slot = signed_lift(&basis.horner_lift(&digits), &basis.product);
        }
    });
    Ok(out)
}
