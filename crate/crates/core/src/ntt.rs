//! Number-theoretic transforms over `Z/pZ` in Stockham self-sorting form.
//!
//! A length `N = 2^l` transform runs `l` out-of-place passes between two
//! buffers. Each pass reads its operands at stride (the permutation), scales
//! the difference by a twiddle factor and writes a butterfly pair, so the
//! result comes out in natural order without a bit-reversal sweep.
//!
//! Multivariate transforms evaluate a dense coefficient tensor on the grid of
//! root-of-unity powers: transform every row along the contiguous last axis,
//! rotate the axes so the next variable becomes contiguous, and repeat once
//! per variable.

use rayon::prelude::*;

use crate::error::ShapeError;
use crate::modarith::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod, PrimeSpec};
use crate::polytensor::{transpose, CoeffTensor, ModTensor};

/// Rows per scheduling unit when the caller does not choose one.
pub const DEFAULT_CHUNK_ROWS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Powers of the roots of unity for every transform length `2^0 ..= 2^max_log`.
#[derive(Clone, Debug)]
pub struct TwiddleTable {
    prime: PrimeSpec,
    forward: Vec<Vec<u64>>,
    inverse: Vec<Vec<u64>>,
    inv_len: Vec<u64>,
}

impl TwiddleTable {
    /// Tables up to the prime's full two-power order.
    pub fn new(prime: &PrimeSpec) -> Self {
        Self::with_max_log(prime, prime.q).expect("q is within range")
    }

    /// Tables up to length `2^max_log`; `max_log` must not exceed `prime.q`.
    pub fn with_max_log(prime: &PrimeSpec, max_log: u32) -> Result<Self, ShapeError> {
        if max_log > prime.q || max_log >= usize::BITS - 1 {
            return Err(ShapeError::UnsupportedLength {
                len: 1usize.checked_shl(max_log).unwrap_or(usize::MAX),
                max: prime.max_len(),
            });
        }
        let p = prime.p;
        let mut forward = Vec::with_capacity(max_log as usize + 1);
        let mut inverse = Vec::with_capacity(max_log as usize + 1);
        let mut inv_len = Vec::with_capacity(max_log as usize + 1);
        for l in 0..=max_log {
            let n = 1usize << l;
            let w = prime.root_of_len(l);
            let w_inv = inv_mod(w, p).expect("root of unity is nonzero");
            forward.push(powers(w, n / 2, p));
            inverse.push(powers(w_inv, n / 2, p));
            inv_len.push(inv_mod(n as u64 % p, p).expect("length is invertible"));
        }
        Ok(TwiddleTable { prime: *prime, forward, inverse, inv_len })
    }

    pub fn prime(&self) -> &PrimeSpec {
        &self.prime
    }

    pub fn max_len(&self) -> usize {
        1 << (self.forward.len() - 1)
    }

    /// `(1, w_N, ..., w_N^{N/2-1})` for `N = 2^log_len`.
    pub fn row(&self, log_len: u32, dir: Direction) -> &[u64] {
        match dir {
            Direction::Forward => &self.forward[log_len as usize],
            Direction::Inverse => &self.inverse[log_len as usize],
        }
    }

    fn check_len(&self, len: usize) -> Result<u32, ShapeError> {
        if len == 0 || !len.is_power_of_two() || len > self.max_len() {
            return Err(ShapeError::UnsupportedLength { len, max: self.max_len() });
        }
        Ok(len.trailing_zeros())
    }
}

fn powers(w: u64, count: usize, p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut acc = 1 % p;
    for _ in 0..count {
        out.push(acc);
        acc = mul_mod(acc, w, p);
    }
    out
}

/// One Stockham transform of `x` (length `N`), using `y` as the second
/// buffer. `tw` holds `w_N^j` for `j < N/2`.
fn stockham(x: &mut [u64], y: &mut [u64], tw: &[u64], p: u64) {
    let n_total = x.len();
    let mut src: &mut [u64] = x;
    let mut dst: &mut [u64] = y;
    let mut n = n_total;
    let mut stride = 1;
    let mut in_scratch = false;
    while n > 1 {
        let half = n / 2;
        for j in 0..half {
            let w = tw[j * stride];
            for k in 0..stride {
                // S1: strided read of the two halves
                let a = src[k + stride * j];
                let b = src[k + stride * (j + half)];
                // S3 butterfly, S2 twiddle on the difference
                dst[k + stride * 2 * j] = add_mod(a, b, p);
                dst[k + stride * (2 * j + 1)] = mul_mod(sub_mod(a, b, p), w, p);
            }
        }
        std::mem::swap(&mut src, &mut dst);
        in_scratch = !in_scratch;
        n = half;
        stride *= 2;
    }
    if in_scratch {
        // src is the scratch buffer here, dst is x
        dst.copy_from_slice(src);
    }
}

/// Transforms every length-`len` row of `data` in place.
pub fn transform_rows(
    data: &mut [u64],
    len: usize,
    table: &TwiddleTable,
    dir: Direction,
    chunk_rows: usize,
) -> Result<(), ShapeError> {
    let log_len = table.check_len(len)?;
    if !data.len().is_multiple_of(len) {
        return Err(ShapeError::Mismatch(format!("{} values do not split into rows of {len}", data.len())));
    }
    if len == 1 {
        return Ok(());
    }
    let p = table.prime.p;
    let tw = table.row(log_len, dir);
    let scale = table.inv_len[log_len as usize];
    data.par_chunks_mut(len * chunk_rows.max(1)).for_each(|chunk| {
        let mut scratch = vec![0u64; len];
        for row in chunk.chunks_mut(len) {
            stockham(row, &mut scratch, tw, p);
            if dir == Direction::Inverse {
                row.iter_mut().for_each(|v| *v = mul_mod(*v, scale, p));
            }
        }
    });
    Ok(())
}

pub fn ntt_forward_1d(data: &[u64], table: &TwiddleTable) -> Result<Vec<u64>, ShapeError> {
    let mut out = data.to_vec();
    transform_rows(&mut out, data.len(), table, Direction::Forward, 1)?;
    Ok(out)
}

pub fn ntt_inverse_1d(data: &[u64], table: &TwiddleTable) -> Result<Vec<u64>, ShapeError> {
    let mut out = data.to_vec();
    transform_rows(&mut out, data.len(), table, Direction::Inverse, 1)?;
    Ok(out)
}

/// Multivariate transform of a row-major buffer of the given shape. The
/// buffer comes back in the original axis order.
pub fn transform_multi(
    mut data: Vec<u64>,
    shape: &[usize],
    table: &TwiddleTable,
    dir: Direction,
    chunk_rows: usize,
) -> Result<Vec<u64>, ShapeError> {
    let total: usize = shape.iter().product();
    if data.len() != total {
        return Err(ShapeError::Mismatch(format!("{} values for shape {shape:?}", data.len())));
    }
    for &len in shape {
        table.check_len(len)?;
    }
    let mut current = shape.to_vec();
    for _ in 0..shape.len() {
        let last = *current.last().expect("nonempty shape");
        transform_rows(&mut data, last, table, dir, chunk_rows)?;
        if current.len() > 1 {
            data = transpose(&data, total / last, last);
            current.rotate_right(1);
        }
    }
    Ok(data)
}

fn multi(t: &ModTensor, table: &TwiddleTable, dir: Direction, chunk_rows: usize) -> Result<ModTensor, ShapeError> {
    if t.prime.p != table.prime.p {
        return Err(ShapeError::Mismatch(format!(
            "tensor reduced mod {} but table built for {}",
            t.prime.p, table.prime.p
        )));
    }
    let shape = t.shape().to_vec();
    let axes = t.tensor.axes().to_vec();
    let data = transform_multi(t.values().to_vec(), &shape, table, dir, chunk_rows)?;
    Ok(ModTensor { prime: t.prime, tensor: CoeffTensor::from_parts(shape, axes, data)? })
}

/// Evaluates the polynomial on the full grid of root-of-unity powers:
/// entry `(a_0, ..., a_{vn-1})` holds the value at `(w_{N_0}^{a_0}, ...)`.
pub fn ntt_forward_multi(t: &ModTensor, table: &TwiddleTable) -> Result<ModTensor, ShapeError> {
    multi(t, table, Direction::Forward, DEFAULT_CHUNK_ROWS)
}

pub fn ntt_forward_multi_chunked(
    t: &ModTensor,
    table: &TwiddleTable,
    chunk_rows: usize,
) -> Result<ModTensor, ShapeError> {
    multi(t, table, Direction::Forward, chunk_rows)
}

/// Interpolates a grid of values back to the unique coefficient tensor.
pub fn ntt_inverse_multi(t: &ModTensor, table: &TwiddleTable) -> Result<ModTensor, ShapeError> {
    multi(t, table, Direction::Inverse, DEFAULT_CHUNK_ROWS)
}

pub fn ntt_inverse_multi_chunked(
    t: &ModTensor,
    table: &TwiddleTable,
    chunk_rows: usize,
) -> Result<ModTensor, ShapeError> {
    multi(t, table, Direction::Inverse, chunk_rows)
}

/// Evaluation points of axis `k` for a transform of length `len`: the powers
/// of `w_len`.
pub fn node_values(prime: &PrimeSpec, len: usize) -> Vec<u64> {
    let w = prime.root_of_len(len.trailing_zeros());
    (0..len as u64).map(|a| pow_mod(w, a, prime.p)).collect()
}
