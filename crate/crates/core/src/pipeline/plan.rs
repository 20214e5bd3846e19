use num_bigint::BigUint;
use num_traits::One;

use crate::error::PipelineError;
use crate::modarith::{PrimeSearch, PrimeSpec};
use crate::polytensor::{pad_shape, PolyMatrix};
use crate::scalar::IntCoeff;

use super::workspace::{sha256_hex, StoredConfig};
use super::Config;

/// Sizes and primes for one determinant computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    pub order: usize,
    pub vars: Vec<String>,
    /// Per-variable maximum entry degree.
    pub entry_degrees: Vec<u32>,
    /// Per-variable degree bound of the determinant.
    pub det_degrees: Vec<u32>,
    /// Interpolation grid, `N_i = 2^ceil(log2(D_i + 1))`.
    pub shape: Vec<usize>,
    pub q_max: u32,
    /// Bound on the absolute value of every determinant coefficient.
    pub boundary: BigUint,
    pub primes: Vec<PrimeSpec>,
    /// Number of distinct entries.
    pub unique: usize,
}

impl Plan {
    pub fn nodes(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn prime_count(&self) -> usize {
        self.primes.len()
    }

    pub fn mu(&self) -> f64 {
        self.unique as f64 / (self.order * self.order) as f64
    }

    pub fn prime_product(&self) -> BigUint {
        self.primes.iter().map(|s| BigUint::from(s.p)).product()
    }

    /// Product target for the signed lift: `2 * boundary + 1`.
    pub fn product_target(&self) -> BigUint {
        (&self.boundary << 1u32) + 1u32
    }

    pub fn hash(&self) -> String {
        let primes: Vec<String> = self.primes.iter().map(|s| format!("{}:{}:{}", s.p, s.q, s.omega)).collect();
        sha256_hex(
            format!(
                "order={};vars={};shape={:?};boundary={};primes={}",
                self.order,
                self.vars.join(","),
                self.shape,
                self.boundary,
                primes.join(",")
            )
            .as_bytes(),
        )
    }
}

/// `r! * prod_i max_j ||M_ij||_1`: each determinant term is a product of one
/// entry per row, and a product's coefficients are bounded by the product of
/// the factors' l1 norms.
pub fn coefficient_bound<T: IntCoeff>(m: &PolyMatrix<T>) -> BigUint {
    let r = m.order();
    let factorial: BigUint = (1..=r as u64).map(BigUint::from).product();
    (0..r).fold(factorial, |acc, i| {
        let row_max = (0..r).map(|j| m.entry(i, j).l1_norm()).max().unwrap_or_default();
        acc * row_max
    })
}

/// `D_v = sum over rows of the largest degree in `v` within that row`.
pub fn degree_bound<T: IntCoeff>(m: &PolyMatrix<T>) -> Vec<u32> {
    let r = m.order();
    (0..m.nvars())
        .map(|v| (0..r).map(|i| (0..r).map(|j| m.entry(i, j).degree_in(v)).max().unwrap_or(0)).sum())
        .collect()
}

impl Config {
    pub(crate) fn stored(&self) -> StoredConfig {
        StoredConfig { prime_start: self.prime_start, min_primes: self.min_primes, scan_limit: self.scan_limit }
    }
}

pub fn plan<T: IntCoeff>(m: &PolyMatrix<T>, config: &Config) -> Result<Plan, PipelineError> {
    if m.order() == 0 || m.nvars() == 0 {
        return Err(PipelineError::InvalidInput("matrix needs order >= 1 and at least one variable".into()));
    }
    let det_degrees = degree_bound(m);
    let required: Vec<usize> = det_degrees.iter().map(|&d| d as usize + 1).collect();
    let (shape, q_max) = pad_shape(&required);
    let boundary = coefficient_bound(m);
    let target = (&boundary << 1u32) + BigUint::one();
    let primes = PrimeSearch::new(q_max)
        .start(config.prime_start)
        .limit(config.scan_limit)
        .min_count(config.min_primes.max(2))
        .run(&target)
        .map_err(PipelineError::Planning)?;
    Ok(Plan {
        order: m.order(),
        vars: m.vars().to_vec(),
        entry_degrees: m.degree_vector().degrees,
        det_degrees,
        shape,
        q_max,
        boundary,
        primes,
        unique: m.unique_count(),
    })
}
