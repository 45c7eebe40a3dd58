//! Shannon entropy and BiEntropy.
//!
//! BiEntropy is a weighted average of the binary Shannon entropies of a string
//! and of its first `n - 2` binary derivatives. Level `k` carries weight `2^k`,
//! so the shortest derivatives dominate; the final single-bit derivative is not
//! used. Raising each level's entropy to a power `t > 1` sharpens the measure
//! against small departures from maximal disorder (`t = 10` is the "P10" form).

use serde::Serialize;

use crate::bitstring::{derivative_chain, encode_binary, BitString};
use crate::error::{Error, Result};

/// Binary Shannon entropy in bits, `0 log 0 = 0`, without a domain check.
#[inline]
pub(crate) fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// `H(p) = -p log2 p - (1 - p) log2 (1 - p)` for `p` in `[0, 1]`.
pub fn shannon(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain {
            what: "p",
            value: p,
            domain: "[0, 1]",
        });
    }
    Ok(binary_entropy(p))
}

/// One level of a weighted entropy sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelTerm {
    pub level: usize,
    /// Proportion fed to the entropy function.
    pub p: f64,
    /// `H(p)` before any power is applied.
    pub entropy: f64,
    /// The contribution before weighting (`H(p)^t`, or 0 for suppressed levels).
    pub term: f64,
    pub weight: u64,
}

/// Per-level breakdown of a BiEntropy or TriEntropy score.
///
/// `score == sum(term * weight) / normalizer` and `normalizer == sum(weight)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyProfile {
    pub per_level: Vec<LevelTerm>,
    pub normalizer: u64,
    pub score: f64,
}

impl EntropyProfile {
    pub(crate) fn from_terms(per_level: Vec<LevelTerm>) -> Self {
        let normalizer: u64 = per_level.iter().map(|l| l.weight).sum();
        let weighted: f64 = per_level.iter().map(|l| l.term * l.weight as f64).sum();
        Self {
            per_level,
            normalizer,
            score: weighted / normalizer as f64,
        }
    }

    /// `sum(term * weight)` before normalization.
    pub fn weighted_sum(&self) -> f64 {
        self.per_level
            .iter()
            .map(|l| l.term * l.weight as f64)
            .sum()
    }
}

fn check_power(power: u32) -> Result<()> {
    if power == 0 {
        return Err(Error::InvalidParameter(
            "entropy power must be at least 1".into(),
        ));
    }
    Ok(())
}

/// Full per-level breakdown of `bien(s, power)`.
pub fn bien_profile(s: &BitString, power: u32) -> Result<EntropyProfile> {
    check_power(power)?;
    let chain = derivative_chain(s)?;
    let used = s.width() - 1;
    let per_level = chain.levels()[..used]
        .iter()
        .enumerate()
        .map(|(k, level)| {
            let p = level.ones_proportion();
            let entropy = binary_entropy(p);
            LevelTerm {
                level: k,
                p,
                entropy,
                term: entropy.powi(power as i32),
                weight: 1u64 << k,
            }
        })
        .collect();
    Ok(EntropyProfile::from_terms(per_level))
}

/// BiEntropy of `s` with each level's entropy raised to `power`.
///
/// This is the scan path: it walks the derivatives in place on the packed
/// representation and never materializes the chain.
pub fn bien(s: &BitString, power: u32) -> Result<f64> {
    check_power(power)?;
    let n = s.width();
    if n < 2 {
        return Err(Error::WidthUnderflow { width: n, min: 2 });
    }
    Ok(bien_packed(s.value(), n, power))
}

#[inline]
pub(crate) fn bien_packed(mut value: u64, n: usize, power: u32) -> f64 {
    let mut width = n;
    let mut total = 0.0;
    let mut weight = 1.0;
    for _ in 0..n - 1 {
        if value == 0 {
            break;
        }
        let h = binary_entropy(f64::from(value.count_ones()) / width as f64);
        total += h.powi(power as i32) * weight;
        weight *= 2.0;
        width -= 1;
        let m = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
        value = (value ^ (value >> 1)) & m;
    }
    total / ((1u64 << (n - 1)) - 1) as f64
}

/// `bien(encode_binary(x, width), power)`.
pub fn bien_of_integer(x: u64, width: usize, power: u32) -> Result<f64> {
    bien(&encode_binary(x, width)?, power)
}
