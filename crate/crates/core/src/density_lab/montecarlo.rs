use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::statistics::Statistics;

use super::ranking::{rank, RankedTable, Scorer, Widths};
use crate::error::{Error, Result};
use crate::primality::{is_prime_trial, li_of, PI_POWERS_OF_TWO};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 1;

/// Sample `i` is the `i`-th 32-bit word of the ChaCha8 stream for the seed.
pub const RNG_ALGORITHM: &str = "chacha8-word-position";

const CHUNK: usize = 4096;

/// Samples `start..start + count` of the stream for `seed`.
pub fn sample_words(seed: u64, start: u64, count: usize) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(u128::from(start));
    (0..count).map(|_| rng.next_u32()).collect()
}

fn draw(seed: u64, samples: usize, bits: usize) -> Vec<u64> {
    let shift = 32 - bits as u32;
    (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let start = c * CHUNK;
            let len = CHUNK.min(samples - start);
            sample_words(seed, start as u64, len)
                .into_iter()
                .map(move |w| u64::from(w >> shift))
        })
        .collect()
}

/// A seeded run comparing natural and BiEntropy-ranked prime density.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McReport {
    pub seed: u64,
    pub rng_algorithm: String,
    pub samples: usize,
    pub bits: usize,
    pub power: u32,
    pub primes_found: u64,
    pub primes_expected: f64,
    pub ranked: RankedTable,
    /// Natural-order minus ranked-order cumulative primes at ranks `0..=samples`.
    pub delta_series: Vec<f64>,
    /// Linear minus prime-number-theorem expectation at ranks `0..=samples`.
    pub theoretical_delta: Vec<f64>,
    pub half_delta_squared: Vec<f64>,
    /// `delta_series - half_delta_squared` over ranks `1..=samples`.
    pub errors: Vec<f64>,
    pub error_mean: f64,
    pub error_stddev: f64,
}

/// Draw `samples` uniform values in `[0, 2^bits)`, score them with BiEntropy at
/// `bits` and `power`, and compare the ranked prime density with the natural one.
pub fn monte_carlo(samples: usize, bits: usize, power: u32, seed: u64) -> Result<McReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    if !(2..=32).contains(&bits) {
        return Err(Error::Domain {
            what: "bits",
            value: bits as f64,
            domain: "2..=32",
        });
    }
    let xs = draw(seed, samples, bits);
    let ranked = rank(
        &xs,
        Scorer::Bien { power },
        Widths::new(bits, 3),
        is_prime_trial,
    )?;
    let mut natural: Vec<(u64, bool)> = ranked.entries.iter().map(|e| (e.x, e.is_prime)).collect();
    natural.sort_unstable();
    let mut delta_series = Vec::with_capacity(samples + 1);
    delta_series.push(0.0);
    let mut nat = 0i64;
    for (r, &(_, prime)) in natural.iter().enumerate() {
        nat += i64::from(prime);
        delta_series.push((nat - ranked.cumulative_primes[r] as i64) as f64);
    }
    let theoretical_delta = theoretical_delta_for(samples, bits);
    let half_delta_squared: Vec<f64> = theoretical_delta.iter().map(|d| d * d / 2.0).collect();
    let errors: Vec<f64> = (1..=samples)
        .map(|i| delta_series[i] - half_delta_squared[i])
        .collect();
    Ok(McReport {
        seed,
        rng_algorithm: RNG_ALGORITHM.to_string(),
        samples,
        bits,
        power,
        primes_found: ranked.total_primes(),
        primes_expected: expected_primes(samples, bits),
        error_mean: (&errors).mean(),
        error_stddev: (&errors).std_dev(),
        ranked,
        delta_series,
        theoretical_delta,
        half_delta_squared,
        errors,
    })
}

/// `samples * pi(2^bits) / 2^bits`.
pub fn expected_primes(samples: usize, bits: usize) -> f64 {
    samples as f64 * PI_POWERS_OF_TWO[bits] as f64 / (1u64 << bits) as f64
}

/// Δ for a run: expected primes among the `i` smallest samples under a flat
/// density minus the same under the `1 / ln x` density.
pub fn theoretical_delta(mc: &McReport) -> Vec<f64> {
    theoretical_delta_for(mc.samples, mc.bits)
}

pub fn theoretical_delta_for(samples: usize, bits: usize) -> Vec<f64> {
    let range = (1u64 << bits) as f64;
    let density = PI_POWERS_OF_TWO[bits] as f64 / range;
    let per_unit = samples as f64 / range;
    (0..=samples)
        .map(|i| {
            let x = i as f64 * range / samples as f64;
            let pnt = if x < 2.0 { 0.0 } else { per_unit * li_of(x).expect("x >= 2") };
            i as f64 * density - pnt
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn words_are_position_addressed() {
        let all = sample_words(7, 0, 10_000);
        assert_eq!(sample_words(7, 4321, 5), all[4321..4326]);
        let drawn = draw(7, 10_000, 32);
        assert!(drawn.iter().zip(&all).all(|(&d, &w)| d == u64::from(w)));
        assert_ne!(sample_words(8, 0, 4), all[..4]);
    }

    #[test]
    fn expected_count() {
        assert_abs_diff_eq!(expected_primes(10_000, 32), 473.3, epsilon = 0.05);
    }

    #[test]
    fn delta_starts_at_zero_and_scales_with_samples() {
        let d1 = theoretical_delta_for(1000, 32);
        let d2 = theoretical_delta_for(2000, 32);
        assert_eq!(d1[0], 0.0);
        assert_eq!(d1.len(), 1001);
        for i in (0..=1000).step_by(50) {
            assert_abs_diff_eq!(d2[2 * i], 2.0 * d1[i], epsilon = 1e-9 * d1[i].abs().max(1.0));
        }
        assert!(d1[500] < 0.0);
    }

    #[test]
    fn small_run_is_reproducible() {
        let a = monte_carlo(2000, 32, 10, 3).unwrap();
        let b = monte_carlo(2000, 32, 10, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.delta_series.len(), 2001);
        assert_eq!(*a.delta_series.last().unwrap(), 0.0);
        assert_eq!(a.rng_algorithm, RNG_ALGORITHM);
        let c = monte_carlo(2000, 32, 10, 4).unwrap();
        assert_ne!(a.ranked, c.ranked);
        assert!(monte_carlo(0, 32, 10, 1).is_err());
        assert!(monte_carlo(10, 33, 10, 1).is_err());
    }

    #[test]
    fn narrow_runs_count_primes_exactly() {
        let r = monte_carlo(500, 8, 1, 9).unwrap();
        assert!(r.ranked.entries.iter().all(|e| e.x < 256));
        let primes = r.ranked.entries.iter().filter(|e| is_prime_trial(e.x)).count() as u64;
        assert_eq!(r.primes_found, primes);
    }
}
