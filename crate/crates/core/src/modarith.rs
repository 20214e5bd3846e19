//! Word-size prime field arithmetic.
//!
//! Every modulus handled here is below `2^62`, so products are formed in a
//! 128-bit intermediate and reduced exactly. Besides the field operations the
//! module finds primes of the form `c * 2^q + 1` together with a primitive
//! `2^q`-th root of unity, which is what the transforms need.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::ArithError;

/// Largest modulus (exclusive) accepted by the field routines.
pub const MODULUS_LIMIT: u64 = 1 << 62;

/// Default lower end of the prime scan: nine-digit primes.
pub const DEFAULT_PRIME_START: u64 = 1_000_000_000;

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p);
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    debug_assert!(a < p && b < p);
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`, by the extended Euclidean algorithm.
pub fn inv_mod(a: u64, p: u64) -> Result<u64, ArithError> {
    let a = a % p;
    if a == 0 {
        return Err(ArithError::NoInverse { value: a, modulus: p });
    }
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(ArithError::NoInverse { value: a, modulus: p });
    }
    Ok(t0.rem_euclid(p as i128) as u64)
}

/// Deterministic Miller-Rabin. The first twelve primes as witnesses decide
/// every input below `3.3 * 10^24`, which covers all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n.is_multiple_of(w) {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime `p = c * 2^q + 1` with a primitive `2^q`-th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct PrimeSpec {
    pub p: u64,
    pub c: u64,
    pub q: u32,
    pub omega: u64,
}

impl PrimeSpec {
    /// Builds the spec for `p` at two-power exponent `q`, searching the root
    /// deterministically.
    pub fn new(p: u64, q: u32) -> Result<Self, ArithError> {
        if p >= MODULUS_LIMIT || !is_prime(p) {
            return Err(ArithError::NotPrime(p));
        }
        if q >= 63 || !(p - 1).is_multiple_of(1u64 << q) {
            return Err(ArithError::OrderUnavailable { order: 1u128 << q.min(127), modulus: p });
        }
        let omega = find_root_of_order(p, 1u64 << q)?;
        Ok(PrimeSpec { p, c: (p - 1) >> q, q, omega })
    }

    /// Largest transform length supported by this prime's root.
    pub fn max_len(&self) -> usize {
        1usize << self.q
    }

    /// Primitive root of unity of order `2^log_len`, for `log_len <= q`.
    pub fn root_of_len(&self, log_len: u32) -> u64 {
        assert!(log_len <= self.q, "length 2^{log_len} exceeds 2^{}", self.q);
        pow_mod(self.omega, 1u64 << (self.q - log_len), self.p)
    }

    /// Checks the three structural invariants.
    pub fn is_valid(&self) -> bool {
        if self.p >= MODULUS_LIMIT || !is_prime(self.p) || self.c == 0 || self.q >= 63 {
            return false;
        }
        if (self.c as u128) << self.q != (self.p - 1) as u128 {
            return false;
        }
        if self.omega == 0 || self.omega >= self.p {
            return false;
        }
        is_primitive_root_of_order(self.omega, 1u64 << self.q, self.p)
    }
}

fn is_primitive_root_of_order(w: u64, order: u64, p: u64) -> bool {
    if pow_mod(w, order, p) != 1 {
        return false;
    }
    order < 2 || pow_mod(w, order / 2, p) != 1
}

/// Finds a primitive root of unity of the two-power `order` modulo `p` as
/// `a^((p-1)/order)` over the candidates `a = 2, 3, 5, 7, ...` (primes in
/// ascending order), keeping the first that passes the half-order check.
pub fn find_root_of_order(p: u64, order: u64) -> Result<u64, ArithError> {
    let unavailable = ArithError::OrderUnavailable { order: order as u128, modulus: p };
    if order == 0 || !order.is_power_of_two() || p < 2 || !(p - 1).is_multiple_of(order) {
        return Err(unavailable);
    }
    if order == 1 {
        return Ok(1);
    }
    let cofactor = (p - 1) / order;
    let mut a = 2u64;
    while a < p {
        if is_prime(a) {
            let w = pow_mod(a, cofactor, p);
            if pow_mod(w, order / 2, p) != 1 {
                return Ok(w);
            }
        }
        a += 1;
    }
    Err(unavailable)
}

/// Ascending scan for Fourier-friendly primes.
#[derive(Clone, Debug)]
pub struct PrimeSearch {
    /// Each prime must satisfy `p = 1 (mod 2^q)`.
    pub q: u32,
    /// Smallest admissible prime.
    pub start: u64,
    /// Candidates above this value are never examined.
    pub limit: u64,
    /// Minimum number of primes returned regardless of the product target.
    pub min_count: usize,
}

impl PrimeSearch {
    pub fn new(q: u32) -> Self {
        PrimeSearch { q, start: DEFAULT_PRIME_START, limit: MODULUS_LIMIT - 1, min_count: 2 }
    }

    pub fn start(mut self, start: u64) -> Self {
        self.start = start;
        self
    }

    pub fn limit(mut self, limit: u64) -> Self {
        self.limit = limit.min(MODULUS_LIMIT - 1);
        self
    }

    pub fn min_count(mut self, min_count: usize) -> Self {
        self.min_count = min_count;
        self
    }

    /// Returns the shortest ascending prefix of admissible primes whose
    /// product reaches `min_product` and whose length is at least
    /// `min_count`.
    pub fn run(&self, min_product: &BigUint) -> Result<Vec<PrimeSpec>, ArithError> {
        if self.q >= 62 {
            return Err(ArithError::InsufficientPrimes { found: 0, product_bits: 0, target_bits: min_product.bits() });
        }
        let step = 1u64 << self.q;
        // smallest candidate >= start that is 1 mod step
        let start = self.start.max(2);
        let mut cand = match (start - 1).checked_next_multiple_of(step) {
            Some(m) => m + 1,
            None => u64::MAX,
        };
        if cand == 1 {
            cand += step;
        }
        let mut found = Vec::new();
        let mut product = BigUint::one();
        while found.len() < self.min_count || &product < min_product {
            if cand > self.limit {
                return Err(ArithError::InsufficientPrimes {
                    found: found.len(),
                    product_bits: product.bits(),
                    target_bits: min_product.bits(),
                });
            }
            if is_prime(cand) {
                let spec = PrimeSpec::new(cand, self.q)?;
                product *= cand;
                found.push(spec);
            }
            cand = cand.saturating_add(step);
        }
        Ok(found)
    }
}

/// Convenience wrapper over [`PrimeSearch`] with the default scan limit and
/// the two-prime minimum.
pub fn find_fourier_primes(q: u32, min_product: &BigUint, start: u64) -> Result<Vec<PrimeSpec>, ArithError> {
    PrimeSearch::new(q).start(start).run(min_product)
}

/// One row of a prime census.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusRow {
    pub order: u64,
    /// Primes with `order | p - 1`, i.e. admitting a root of unity of that order.
    pub divisible: usize,
    /// Primes whose `p - 1` has 2-adic valuation exactly `log2(order)`.
    pub exact_valuation: usize,
}

/// The first `count` primes strictly greater than `lower`.
pub fn primes_above(lower: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = lower.saturating_add(1);
    while out.len() < count && n < u64::MAX {
        if is_prime(n) {
            out.push(n);
        }
        n += 1;
    }
    out
}

/// Counts, for each two-power order, how many of the first `prime_count`
/// primes above `lower` admit a primitive root of unity of that order.
pub fn census(orders: &[u64], prime_count: usize, lower: u64) -> Vec<CensusRow> {
    let primes = primes_above(lower, prime_count);
    orders
        .iter()
        .map(|&order| {
            let divisible = primes.iter().filter(|&&p| (p - 1) % order == 0).count();
            let exact_valuation =
                primes.iter().filter(|&&p| (p - 1) % order == 0 && (p - 1) % (order * 2) != 0).count();
            CensusRow { order, divisible, exact_valuation }
        })
        .collect()
}
