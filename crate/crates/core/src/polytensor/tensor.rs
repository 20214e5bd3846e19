use rayon::prelude::*;

use crate::error::ShapeError;
use crate::modarith::{add_mod, mul_mod, pow_mod, PrimeSpec};
use crate::scalar::{Coeff, IntCoeff};

use super::poly::{Monomial, Poly};

/// Dense coefficient array of one multivariate polynomial.
///
/// Layout is row-major with the last axis fastest. `axes[k]` names the
/// variable (by index into the owning variable list) stored along axis `k`;
/// a freshly encoded tensor has `axes = [0, 1, ..., vn-1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffTensor<T> {
    shape: Vec<usize>,
    axes: Vec<usize>,
    coeffs: Vec<T>,
}

impl<T> CoeffTensor<T> {
    pub fn from_parts(shape: Vec<usize>, axes: Vec<usize>, coeffs: Vec<T>) -> Result<Self, ShapeError> {
        if shape.len() != axes.len() {
            return Err(ShapeError::Mismatch(format!("{} axes for a {}-dimensional shape", axes.len(), shape.len())));
        }
        let mut seen = vec![false; axes.len()];
        for &a in &axes {
            if a >= axes.len() || std::mem::replace(&mut seen[a], true) {
                return Err(ShapeError::Mismatch(format!("axes {axes:?} are not a permutation")));
            }
        }
        let len: usize = shape.iter().product();
        if coeffs.len() != len {
            return Err(ShapeError::Mismatch(format!("{} coefficients for shape {:?}", coeffs.len(), shape)));
        }
        Ok(CoeffTensor { shape, axes, coeffs })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn axes(&self) -> &[usize] {
        &self.axes
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [T] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        offset(&self.shape, index)
    }

    pub fn get(&self, index: &[usize]) -> &T {
        &self.coeffs[self.offset(index)]
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> CoeffTensor<U> {
        CoeffTensor { shape: self.shape.clone(), axes: self.axes.clone(), coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl<T: Clone + Send + Sync> CoeffTensor<T> {
    /// Moves the last variable to the front: logical order
    /// `(x_1, ..., x_vn)` becomes `(x_vn, x_1, ..., x_{vn-1})`, and the data
    /// is transposed so the new last axis is contiguous.
    pub fn axis_rotate(&self) -> Self {
        let v = self.shape.len();
        if v <= 1 {
            return self.clone();
        }
        let last = self.shape[v - 1];
        let rest = self.coeffs.len() / last.max(1);
        let mut shape = Vec::with_capacity(v);
        shape.push(last);
        shape.extend_from_slice(&self.shape[..v - 1]);
        let mut axes = Vec::with_capacity(v);
        axes.push(self.axes[v - 1]);
        axes.extend_from_slice(&self.axes[..v - 1]);
        CoeffTensor { shape, axes, coeffs: transpose(&self.coeffs, rest, last) }
    }
}

impl<T: Coeff> CoeffTensor<T> {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        CoeffTensor { shape: shape.to_vec(), axes: (0..shape.len()).collect(), coeffs: vec![T::zero(); len] }
    }

    /// Reads the nonzero coefficients back as a term list in variable order.
    pub fn decode(&self) -> Poly<T> {
        let v = self.shape.len();
        let mut poly = Poly::zero(v);
        let mut index = vec![0usize; v];
        for c in &self.coeffs {
            if !c.is_zero() {
                let mut m = vec![0u32; v];
                for (k, &i) in index.iter().enumerate() {
                    m[self.axes[k]] = i as u32;
                }
                poly.add_term(m, c.clone()).expect("arity matches");
            }
            increment(&mut index, &self.shape);
        }
        poly
    }
}

impl<T: IntCoeff> CoeffTensor<T> {
    /// Canonical residues of every coefficient modulo `prime.p`.
    pub fn reduce_mod(&self, prime: &PrimeSpec) -> ModTensor {
        ModTensor { prime: *prime, tensor: self.map(|c| c.residue(prime.p)) }
    }
}

/// Encodes a term list into a dense tensor of the given shape (axes in
/// variable order). Repeated monomials are summed.
pub fn encode<T: Coeff>(terms: &[(Monomial, T)], shape: &[usize]) -> Result<CoeffTensor<T>, ShapeError> {
    let mut t = CoeffTensor::<T>::zeros(shape);
    for (m, c) in terms {
        let off = checked_offset(shape, m)?;
        let sum = t.coeffs[off].clone() + c.clone();
        t.coeffs[off] = sum;
    }
    Ok(t)
}

impl<T: Coeff> Poly<T> {
    pub fn to_tensor(&self, shape: &[usize]) -> Result<CoeffTensor<T>, ShapeError> {
        let mut t = CoeffTensor::zeros(shape);
        if self.nvars() != shape.len() {
            return Err(ShapeError::ArityMismatch { got: shape.len(), expected: self.nvars() });
        }
        for (m, c) in self.terms() {
            let off = checked_offset(shape, m)?;
            t.coeffs[off] = c.clone();
        }
        Ok(t)
    }
}

fn checked_offset(shape: &[usize], m: &[u32]) -> Result<usize, ShapeError> {
    if m.len() != shape.len() {
        return Err(ShapeError::ArityMismatch { got: m.len(), expected: shape.len() });
    }
    let mut off = 0;
    for (axis, (&e, &len)) in m.iter().zip(shape).enumerate() {
        if e as usize >= len {
            return Err(ShapeError::DegreeOverflow { axis, exponent: e, len });
        }
        off = off * len + e as usize;
    }
    Ok(off)
}

pub(crate) fn offset(shape: &[usize], index: &[usize]) -> usize {
    debug_assert_eq!(shape.len(), index.len());
    index.iter().zip(shape).fold(0, |acc, (&i, &n)| {
        debug_assert!(i < n);
        acc * n + i
    })
}

/// Advances a row-major multi-index; wraps to zero after the last element.
pub(crate) fn increment(index: &mut [usize], shape: &[usize]) {
    for k in (0..index.len()).rev() {
        index[k] += 1;
        if index[k] < shape[k] {
            return;
        }
        index[k] = 0;
    }
}

/// Transposes a row-major `rows x cols` matrix.
pub(crate) fn transpose<T: Clone + Send + Sync>(data: &[T], rows: usize, cols: usize) -> Vec<T> {
    debug_assert_eq!(data.len(), rows * cols);
    if rows <= 1 || cols <= 1 {
        return data.to_vec();
    }
    let build = |c: usize| (0..rows).map(move |r| data[r * cols + c].clone());
    if data.len() >= 1 << 16 {
        (0..cols).into_par_iter().flat_map_iter(build).collect()
    } else {
        (0..cols).flat_map(build).collect()
    }
}

/// Per-axis lengths rounded up to powers of two, with the exponent of the
/// largest one.
pub fn pad_shape(required: &[usize]) -> (Vec<usize>, u32) {
    let shape: Vec<usize> = required.iter().map(|&n| n.max(1).next_power_of_two()).collect();
    let q_max = shape.iter().map(|n| n.trailing_zeros()).max().unwrap_or(0);
    (shape, q_max)
}

/// Coefficient tensor reduced modulo one prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModTensor {
    pub prime: PrimeSpec,
    pub tensor: CoeffTensor<u64>,
}

impl ModTensor {
    pub fn new(prime: PrimeSpec, tensor: CoeffTensor<u64>) -> Result<Self, ShapeError> {
        if let Some(bad) = tensor.coeffs().iter().find(|&&x| x >= prime.p) {
            return Err(ShapeError::Mismatch(format!("residue {bad} not below {}", prime.p)));
        }
        Ok(ModTensor { prime, tensor })
    }

    pub fn shape(&self) -> &[usize] {
        self.tensor.shape()
    }

    pub fn values(&self) -> &[u64] {
        self.tensor.coeffs()
    }

    pub fn axis_rotate(&self) -> Self {
        ModTensor { prime: self.prime, tensor: self.tensor.axis_rotate() }
    }

    /// Value of the encoded polynomial at `point` (indexed by variable).
    pub fn eval(&self, point: &[u64]) -> u64 {
        let p = self.prime.p;
        let shape = self.tensor.shape();
        let axes = self.tensor.axes();
        let mut index = vec![0usize; shape.len()];
        let mut acc = 0;
        for &c in self.tensor.coeffs() {
            if c != 0 {
                let mut term = c;
                for (k, &i) in index.iter().enumerate() {
                    term = mul_mod(term, pow_mod(point[axes[k]], i as u64, p), p);
                }
                acc = add_mod(acc, term, p);
            }
            increment(&mut index, shape);
        }
        acc
    }
}
