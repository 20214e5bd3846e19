use std::time::Instant;

use crate::error::PipelineError;
use crate::ntt::{transform_multi, Direction, TwiddleTable};
use crate::polytensor::PolyMatrix;
use crate::scalar::IntCoeff;

use super::plan::Plan;

/// Running-time estimate `T = C_p * r^2 * round(mean(T_e), 2) * mu`.
///
/// With `mu = k / r^2` the total is `C_p * k * round(mean, 2)`, which is kept
/// exactly in hundredths of a second.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub prime_count: usize,
    pub order: usize,
    pub unique: usize,
    /// Measured per-entry forward transform times, seconds.
    pub samples: Vec<f64>,
    /// `round(mean(samples), 2)` in hundredths of a second.
    pub mean_centis: u64,
    /// Predicted total in hundredths of a second.
    pub total_centis: u128,
}

/// Rounds half away from zero to hundredths.
fn to_centis(seconds: f64) -> u64 {
    (seconds * 100.0).round().max(0.0) as u64
}

impl Prediction {
    pub fn from_samples(prime_count: usize, order: usize, unique: usize, samples: Vec<f64>) -> Self {
        let mean = if samples.is_empty() { 0.0 } else { samples.iter().sum::<f64>() / samples.len() as f64 };
        let mean_centis = to_centis(mean);
        let total_centis = prime_count as u128 * unique as u128 * mean_centis as u128;
        Prediction { prime_count, order, unique, samples, mean_centis, total_centis }
    }

    pub fn mu(&self) -> f64 {
        self.unique as f64 / (self.order * self.order) as f64
    }

    pub fn mean_seconds(&self) -> f64 {
        self.mean_centis as f64 / 100.0
    }

    pub fn total_seconds(&self) -> f64 {
        self.total_centis as f64 / 100.0
    }

    /// Total formatted with exactly two decimals, e.g. `2088.96`.
    pub fn total_text(&self) -> String {
        format!("{}.{:02}", self.total_centis / 100, self.total_centis % 100)
    }
}

/// The formula on plain numbers.
pub fn predicted_seconds(prime_count: usize, order: usize, mean_seconds: f64, mu: f64) -> f64 {
    let rounded = to_centis(mean_seconds) as f64 / 100.0;
    prime_count as f64 * (order * order) as f64 * rounded * mu
}

/// Times the forward transform of up to `sample_size` distinct entries under
/// the plan's first prime and extrapolates.
pub fn predict<T: IntCoeff>(m: &PolyMatrix<T>, plan: &Plan, sample_size: usize) -> Result<Prediction, PipelineError> {
    let prime = plan.primes.first().ok_or_else(|| PipelineError::InvalidInput("plan has no primes".into()))?;
    let table = TwiddleTable::with_max_log(prime, plan.q_max)?;
    let count = sample_size.max(1).min(m.unique_count());
    let mut samples = Vec::with_capacity(count);
    for u in 0..count {
        let start = Instant::now();
        let coeffs = m.unique_entry(u).to_tensor(&plan.shape)?.reduce_mod(prime);
        let grid = transform_multi(coeffs.tensor.into_coeffs(), &plan.shape, &table, Direction::Forward, 64)?;
        std::hint::black_box(&grid);
        samples.push(start.elapsed().as_secs_f64());
    }
    Ok(Prediction::from_samples(plan.prime_count(), m.order(), m.unique_count(), samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let p = Prediction::from_samples(6, 16, 256, vec![1.36]);
        assert_eq!(p.total_centis, 208896);
        assert_eq!(p.total_text(), "2088.96");
        assert_eq!(p.mu(), 1.0);
    }

    #[test]
    fn all_entries_identical() {
        // mu = 1/r^2 collapses the formula to C_p * round(mean, 2)
        let p = Prediction::from_samples(3, 4, 1, vec![0.5, 0.75]);
        assert_eq!(p.mean_centis, 63);
        assert_eq!(p.total_text(), "1.89");
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(to_centis(0.125), 13);
        assert_eq!(to_centis(0.004), 0);
        assert!((predicted_seconds(6, 16, 1.36, 1.0) - 2088.96).abs() < 1e-9);
    }
}
