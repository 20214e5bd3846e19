//! End-to-end determinant pipeline.
//!
//! For every prime: reduce and forward-transform each distinct entry once,
//! take the determinant at every interpolation node, and interpolate back.
//! The per-prime coefficient residues are then combined by mixed-radix CRT.
//! Work runs on a dedicated thread pool; results are merged by unit index,
//! so the output does not depend on the worker count or chunk sizes.

mod plan;
mod predict;
mod run;
pub mod workspace;

use std::time::Duration;

use num_bigint::BigInt;
use rayon::ThreadPool;

use crate::error::PipelineError;
use crate::modarith::{DEFAULT_PRIME_START, MODULUS_LIMIT};
use crate::moddet::DEFAULT_CHUNK_NODES;
use crate::ntt::DEFAULT_CHUNK_ROWS;
use crate::polytensor::{CoeffTensor, Poly};
use crate::reconstruct::DEFAULT_CHUNK_COEFFS;
use crate::text::format_poly;

pub use plan::{coefficient_bound, degree_bound, plan, Plan};
pub use predict::{predict, predicted_seconds, Prediction};
pub use run::{resume, run, RunOutput};
pub use workspace::{StoredConfig, Workspace};

/// Worker pool size and the granularity of each parallel stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    /// `None` uses one worker per available core.
    pub workers: Option<usize>,
    pub chunk_rows: usize,
    pub chunk_nodes: usize,
    pub chunk_coeffs: usize,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule {
            workers: None,
            chunk_rows: DEFAULT_CHUNK_ROWS,
            chunk_nodes: DEFAULT_CHUNK_NODES,
            chunk_coeffs: DEFAULT_CHUNK_COEFFS,
        }
    }
}

impl Schedule {
    pub fn pool(&self) -> Result<ThreadPool, PipelineError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.workers {
            builder = builder.num_threads(n.max(1));
        }
        builder.build().map_err(|e| PipelineError::Pool(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Primes are scanned upward from here.
    pub prime_start: u64,
    /// At least this many primes are used (never fewer than two).
    pub min_primes: usize,
    /// Prime candidates above this are not examined.
    pub scan_limit: u64,
    pub schedule: Schedule,
    /// Stop with [`PipelineError::Interrupted`] after computing this many
    /// units. Simulates a crash; the workspace stays resumable.
    pub interrupt_after: Option<usize>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prime_start: DEFAULT_PRIME_START,
            min_primes: 2,
            scan_limit: MODULUS_LIMIT - 1,
            schedule: Schedule::default(),
            interrupt_after: None,
        }
    }
}

impl Config {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.schedule.workers = Some(workers);
        self
    }

    /// Same execution settings with the planning parameters from a workspace.
    pub fn with_stored(&self, stored: &StoredConfig) -> Self {
        Config {
            prime_start: stored.prime_start,
            min_primes: stored.min_primes,
            scan_limit: stored.scan_limit,
            ..self.clone()
        }
    }
}

/// Wall time spent in each stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageTimes {
    pub fft: Duration,
    pub det: Duration,
    pub ifft: Duration,
    pub crt: Duration,
}

impl StageTimes {
    pub fn total(&self) -> Duration {
        self.fft + self.det + self.ifft + self.crt
    }
}

/// Exact determinant as a dense coefficient tensor on the interpolation grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Determinant {
    pub vars: Vec<String>,
    pub tensor: CoeffTensor<BigInt>,
}

impl Determinant {
    pub fn new(vars: Vec<String>, tensor: CoeffTensor<BigInt>) -> Self {
        Determinant { vars, tensor }
    }

    pub fn to_poly(&self) -> Poly<BigInt> {
        self.tensor.decode()
    }

    /// Actual per-variable degrees (zero for the zero polynomial).
    pub fn degrees(&self) -> Vec<u32> {
        self.to_poly().max_degrees()
    }

    pub fn to_text(&self) -> String {
        format_poly(&self.to_poly(), &self.vars)
    }
}

impl std::fmt::Display for Determinant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_text())
    }
}
