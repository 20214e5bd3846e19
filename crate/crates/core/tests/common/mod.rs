//! Independent reference implementations shared by the integration tests.
//! Nothing here goes through the transform, elimination or CRT code paths.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use polydet::{IntMatrix, IntPoly, Poly, PolyMatrix};
use rand::Rng;

/// Dense-free symbolic polynomial: exponent vector -> coefficient.
pub type Terms = BTreeMap<Vec<u32>, BigInt>;

pub fn terms_of(p: &IntPoly) -> Terms {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

fn add_into(acc: &mut Terms, m: Vec<u32>, c: BigInt) {
    let e = acc.entry(m).or_insert_with(BigInt::zero);
    *e += c;
}

fn normalize(t: Terms) -> Terms {
    t.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

pub fn mul_terms(a: &Terms, b: &Terms) -> Terms {
    let mut out = Terms::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            add_into(&mut out, m, ca * cb);
        }
    }
    normalize(out)
}

/// Determinant by cofactor expansion along the first row, over exact
/// integer polynomials.
pub fn expand_det(m: &IntMatrix) -> Terms {
    let r = m.order();
    let entries: Vec<Vec<Terms>> = (0..r).map(|i| (0..r).map(|j| terms_of(m.entry(i, j))).collect()).collect();
    let cols: Vec<usize> = (0..r).collect();
    let mut memo = BTreeMap::new();
    expand(&entries, 0, &cols, m.nvars(), &mut memo)
}

fn expand(e: &[Vec<Terms>], row: usize, cols: &[usize], nvars: usize, memo: &mut BTreeMap<Vec<usize>, Terms>) -> Terms {
    if cols.is_empty() {
        let mut one = Terms::new();
        one.insert(vec![0; nvars], BigInt::one());
        return one;
    }
    if let Some(t) = memo.get(cols) {
        return t.clone();
    }
    let mut acc = Terms::new();
    for (k, &c) in cols.iter().enumerate() {
        if e[row][c].is_empty() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = expand(e, row + 1, &rest, nvars, memo);
        let prod = mul_terms(&e[row][c], &minor);
        for (m, v) in prod {
            add_into(&mut acc, m, if k % 2 == 0 { v } else { -v });
        }
    }
    let acc = normalize(acc);
    memo.insert(cols.to_vec(), acc.clone());
    acc
}

/// Laplace expansion mod p over u128 intermediates.
pub fn laplace_mod(m: &[u64], r: usize, p: u64) -> u64 {
    fn go(m: &[u64], r: usize, row: usize, cols: &[usize], p: u64) -> u64 {
        if cols.is_empty() {
            return 1 % p;
        }
        let mut acc: u128 = 0;
        for (k, &c) in cols.iter().enumerate() {
            let a = m[row * r + c] as u128;
            if a == 0 {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let t = a * go(m, r, row + 1, &rest, p) as u128 % p as u128;
            acc = if k % 2 == 0 { (acc + t) % p as u128 } else { (acc + p as u128 - t) % p as u128 };
        }
        acc as u64
    }
    let cols: Vec<usize> = (0..r).collect();
    go(m, r, 0, &cols, p)
}

/// Exact integer determinant by Laplace expansion.
pub fn laplace_int(m: &[i64], r: usize) -> BigInt {
    fn go(m: &[i64], r: usize, row: usize, cols: &[usize]) -> BigInt {
        if cols.is_empty() {
            return BigInt::one();
        }
        let mut acc = BigInt::zero();
        for (k, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let t = BigInt::from(m[row * r + c]) * go(m, r, row + 1, &rest);
            if k % 2 == 0 {
                acc += t
            } else {
                acc -= t
            }
        }
        acc
    }
    let cols: Vec<usize> = (0..r).collect();
    go(m, r, 0, &cols)
}

pub fn pow_u128(mut b: u128, mut e: u64, p: u128) -> u128 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// O(N^2) DFT: out[k] = sum_j x[j] w^(jk) mod p.
pub fn naive_dft(x: &[u64], w: u64, p: u64) -> Vec<u64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc: u128 = 0;
            for (j, &v) in x.iter().enumerate() {
                acc = (acc + v as u128 * pow_u128(w as u128, (j * k) as u64, p as u128)) % p as u128;
            }
            acc as u64
        })
        .collect()
}

pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, max_deg: u32, max_terms: usize, coeff: i64) -> IntPoly {
    let nterms = rng.gen_range(0..=max_terms);
    let terms = (0..nterms).map(|_| {
        let m: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=max_deg)).collect();
        (m, BigInt::from(rng.gen_range(-coeff..=coeff)))
    });
    Poly::from_terms(nvars, terms).unwrap()
}

pub fn var_names(n: usize) -> Vec<String> {
    ["x", "y", "z", "w"][..n].iter().map(|s| s.to_string()).collect()
}

pub fn random_matrix<R: Rng>(rng: &mut R, r: usize, nvars: usize, max_deg: u32, coeff: i64) -> IntMatrix {
    // occasionally repeat an entry so dedup paths are exercised
    let mut entries: Vec<IntPoly> = Vec::with_capacity(r * r);
    for _ in 0..r * r {
        if !entries.is_empty() && rng.gen_bool(0.15) {
            let k = rng.gen_range(0..entries.len());
            entries.push(entries[k].clone());
        } else {
            entries.push(random_poly(rng, nvars, max_deg, 4, coeff));
        }
    }
    PolyMatrix::new(var_names(nvars), r, entries).unwrap()
}
