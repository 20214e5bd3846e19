//! Determinants over `Z/pZ`.
//!
//! Elimination follows the condensation scheme: at step `i` the first nonzero
//! entry `z_i` of row `i` (column `Id_i`) is the pivot, and every later row is
//! replaced by `z_i * row_j - M[j][Id_i] * row_i`, which clears column `Id_i`
//! below the pivot without any division. The division-free update scales the
//! determinant by `z_i` once per updated row, and the pivots sit in permuted
//! columns, so the result is
//!
//! `det = sign(Id) * prod(z_i) / prod(z_i^(r-1-i))`.

use rayon::prelude::*;

use crate::error::ShapeError;
use crate::modarith::{inv_mod, mul_mod, neg_mod, pow_mod, sub_mod, PrimeSpec};

/// Nodes per scheduling unit when the caller does not choose one.
pub const DEFAULT_CHUNK_NODES: usize = 256;

/// Square matrix of residues modulo one prime, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    order: usize,
    entries: Vec<u64>,
    prime: PrimeSpec,
}

impl ModMatrix {
    pub fn new(order: usize, entries: Vec<u64>, prime: PrimeSpec) -> Result<Self, ShapeError> {
        if entries.len() != order * order {
            return Err(ShapeError::Mismatch(format!("{} entries for order {order}", entries.len())));
        }
        if let Some(bad) = entries.iter().find(|&&e| e >= prime.p) {
            return Err(ShapeError::Mismatch(format!("entry {bad} not below {}", prime.p)));
        }
        Ok(ModMatrix { order, entries, prime })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn prime(&self) -> &PrimeSpec {
        &self.prime
    }
}

/// Pivot chosen at one elimination step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PivotRecord {
    pub step: usize,
    pub value: u64,
    pub column: usize,
}

/// Result of an elimination: the pivots, or the step at which a row ran out
/// of nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Elimination {
    Full(Vec<PivotRecord>),
    ZeroRow(usize),
}

/// Runs the elimination in place on a row-major `order x order` buffer.
pub fn eliminate(m: &mut [u64], order: usize, p: u64) -> Elimination {
    let mut pivots = Vec::with_capacity(order);
    for i in 0..order {
        let row_i = i * order;
        let Some(col) = (0..order).find(|&c| m[row_i + c] != 0) else {
            return Elimination::ZeroRow(i);
        };
        let z = m[row_i + col];
        pivots.push(PivotRecord { step: i, value: z, column: col });
        let (head, tail) = m.split_at_mut((i + 1) * order);
        let pivot_row = &head[row_i..];
        for row in tail.chunks_exact_mut(order) {
            let t = row[col];
            if t == 0 {
                // z * row_j only rescales; keep the scaling consistent
                row.iter_mut().for_each(|v| *v = mul_mod(*v, z, p));
                continue;
            }
            for c in 0..order {
                let s1 = mul_mod(z, row[c], p);
                let s2 = mul_mod(t, pivot_row[c], p);
                row[c] = sub_mod(s1, s2, p);
            }
            row[col] = 0;
        }
    }
    Elimination::Full(pivots)
}

/// Parity of the permutation given by the pivot columns.
fn permutation_is_odd(columns: impl Iterator<Item = usize>) -> bool {
    let cols: Vec<usize> = columns.collect();
    let mut inversions = 0usize;
    for a in 0..cols.len() {
        for b in a + 1..cols.len() {
            if cols[a] > cols[b] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 1
}

fn det_from_pivots(pivots: &[PivotRecord], order: usize, p: u64) -> u64 {
    let mut product = 1 % p;
    let mut inflation = 1 % p;
    for piv in pivots {
        product = mul_mod(product, piv.value, p);
        inflation = mul_mod(inflation, pow_mod(piv.value, (order - 1 - piv.step) as u64, p), p);
    }
    let det = mul_mod(product, inv_mod(inflation, p).expect("pivots are nonzero"), p);
    if permutation_is_odd(pivots.iter().map(|piv| piv.column)) {
        neg_mod(det, p)
    } else {
        det
    }
}

/// Determinant of a row-major buffer, consuming it as workspace.
pub fn det_in_place(m: &mut [u64], order: usize, p: u64) -> u64 {
    match eliminate(m, order, p) {
        Elimination::ZeroRow(_) => 0,
        Elimination::Full(pivots) => det_from_pivots(&pivots, order, p),
    }
}

pub fn det_mod(m: &ModMatrix) -> u64 {
    let mut work = m.entries.clone();
    det_in_place(&mut work, m.order, m.prime.p)
}

/// Determinant at every interpolation node.
///
/// `grids[u]` holds the evaluation grid of unique entry `u` (all grids share
/// one length, the node count); `layout[pos]` maps a row-major matrix
/// position to its unique entry. Node `a` of the output is the determinant
/// of the matrix assembled from `grids[layout[pos]][a]`.
pub fn det_grid(
    grids: &[Vec<u64>],
    layout: &[usize],
    order: usize,
    prime: &PrimeSpec,
    chunk_nodes: usize,
) -> Result<Vec<u64>, ShapeError> {
    if layout.len() != order * order {
        return Err(ShapeError::Mismatch(format!("layout of {} positions for order {order}", layout.len())));
    }
    let nodes = grids.first().map_or(0, Vec::len);
    if grids.iter().any(|g| g.len() != nodes) {
        return Err(ShapeError::Mismatch("entry grids differ in length".into()));
    }
    if let Some(&bad) = layout.iter().find(|&&u| u >= grids.len()) {
        return Err(ShapeError::Mismatch(format!("layout refers to missing entry {bad}")));
    }
    let p = prime.p;
    let mut out = vec![0u64; nodes];
    out.par_chunks_mut(chunk_nodes.max(1)).enumerate().for_each(|(chunk, values)| {
        let base = chunk * chunk_nodes.max(1);
        let mut work = vec![0u64; order * order];
        for (k, value) in values.iter_mut().enumerate() {
            let node = base + k;
            for (slot, &u) in work.iter_mut().zip(layout) {
                *slot = grids[u][node];
            }
            *value = det_in_place(&mut work, order, p);
        }
    });
    Ok(out)
}
