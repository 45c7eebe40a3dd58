//! Periodic composites, the not-prime probability of a random string, and the
//! expected-count series for Fermat and Mersenne primes.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::bientropy::bien;
use crate::bitstring::{encode_binary, BitString};
use crate::error::{Error, Result};

/// Known Fermat primes with their half-length `n` (the prime is `2^n + 1`,
/// written in `2n` bits).
pub const FERMAT_PRIMES: [(u64, u64); 5] = [(3, 1), (5, 2), (17, 4), (257, 8), (65537, 16)];

/// Exponents `p` of the 51 known Mersenne primes `2^p - 1`.
pub const MERSENNE_EXPONENTS: [u64; 51] = [
    2, 3, 5, 7, 13, 17, 19, 31, 61, 89, 107, 127, 521, 607, 1279, 2203, 2281, 3217, 4253, 4423,
    9689, 9941, 11213, 19937, 21701, 23209, 44497, 86243, 110503, 132049, 216091, 756839, 859433,
    1257787, 1398269, 2976221, 3021377, 6972593, 13466917, 20996011, 24036583, 25964951,
    30402457, 32582657, 37156667, 42643801, 43112609, 57885161, 74207281, 77232917, 82589933,
];

/// Largest Fermat index whose argument `2^(2n) + 1` is a finite `f64`.
pub const FERMAT_MAX_EXACT: u64 = 511;

/// Cap on terms summed while searching for a crossing.
pub const CROSSING_CAP: u64 = 1 << 32;

/// One term of an expected-count series.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoteRow {
    pub n: u64,
    /// Exponent `e` of the logarithm's argument `2^e + 1` (Fermat) or `2^e - 1` (Mersenne).
    pub exponent: u64,
    pub term: f64,
    pub partial_sum: f64,
    /// Known primes covered up to this term.
    pub actual_count: u64,
    /// `term(n) / term(n - 1)`; absent for the first row.
    pub ratio: Option<f64>,
}

/// `1 / ln(2^(2n) + 1)`.
pub fn fermat_term(n: u64) -> Result<f64> {
    if n == 0 || n > FERMAT_MAX_EXACT {
        return Err(Error::Domain {
            what: "n",
            value: n as f64,
            domain: "1..=511",
        });
    }
    let e = 2.0 * n as f64;
    Ok(1.0 / (e * LN_2 + (-e).exp2().ln_1p()))
}

/// `1 / (2n ln 2)`, the large-`n` form of the Fermat term.
pub fn fermat_log_term(n: u64) -> f64 {
    1.0 / (2.0 * n as f64 * LN_2)
}

fn fermat_actual(n: u64) -> u64 {
    FERMAT_PRIMES.iter().filter(|&&(_, half)| half <= n).count() as u64
}

fn series(
    indices: impl Iterator<Item = (u64, u64, f64)>,
    actual: impl Fn(u64) -> u64,
) -> Vec<AsymptoteRow> {
    let mut rows: Vec<AsymptoteRow> = Vec::new();
    let mut sum = 0.0;
    for (n, exponent, term) in indices {
        sum += term;
        let ratio = rows.last().map(|prev| term / prev.term);
        rows.push(AsymptoteRow {
            n,
            exponent,
            term,
            partial_sum: sum,
            actual_count: actual(exponent),
            ratio,
        });
    }
    rows
}

/// Rows `1..=terms` of the Fermat series.
pub fn fermat_sum(terms: u64) -> Result<Vec<AsymptoteRow>> {
    if terms == 0 {
        return Err(Error::InvalidParameter("need at least one term".into()));
    }
    let mut values = Vec::with_capacity(terms as usize);
    for n in 1..=terms {
        values.push((n, 2 * n, fermat_term(n)?));
    }
    Ok(series(values.into_iter(), |e| fermat_actual(e / 2)))
}

/// Partial sum of the Fermat series continued past the exact range with the
/// log form.
pub fn fermat_log_approx_sum(terms: u64) -> f64 {
    (1..=terms)
        .map(|n| {
            if n <= FERMAT_MAX_EXACT {
                fermat_term(n).expect("in range")
            } else {
                fermat_log_term(n)
            }
        })
        .sum()
}

/// First `n` at which the continued Fermat series reaches `target`.
pub fn fermat_crossing(target: f64) -> Result<u64> {
    let mut sum = 0.0;
    for n in 1..=CROSSING_CAP {
        sum += if n <= FERMAT_MAX_EXACT {
            fermat_term(n)?
        } else {
            fermat_log_term(n)
        };
        if sum >= target {
            return Ok(n);
        }
    }
    Err(Error::ResourceCap {
        requested: u64::MAX,
        cap: CROSSING_CAP,
    })
}

/// `1 / ln(2^m - 1)` for `m >= 2`.
pub fn mersenne_term(m: u64) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain {
            what: "m",
            value: m as f64,
            domain: "m >= 2",
        });
    }
    let e = m as f64;
    Ok(1.0 / (e * LN_2 + (-(-e).exp2()).ln_1p()))
}

/// Mersenne series with one row per bit-length `m = 2..=terms + 1`.
pub fn mersenne_sum(terms: u64) -> Result<Vec<AsymptoteRow>> {
    if terms == 0 {
        return Err(Error::InvalidParameter("need at least one term".into()));
    }
    let mut values = Vec::with_capacity(terms as usize);
    for n in 1..=terms {
        values.push((n, n + 1, mersenne_term(n + 1)?));
    }
    Ok(series(values.into_iter(), |m| {
        MERSENNE_EXPONENTS.iter().filter(|&&p| p <= m).count() as u64
    }))
}

/// Which all-zero or all-one pattern rules a string out as prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NotPrimeSource {
    AllOnes,
    /// Derivative level `k` is all zeros (`k = 0` is the string itself).
    ZeroDerivative(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NotPrimeBreakdown {
    pub m: usize,
    /// Each source with its count of `m`-bit strings.
    pub sources: Vec<(NotPrimeSource, u128)>,
    pub denominator: u128,
    pub total: f64,
}

impl NotPrimeBreakdown {
    pub fn numerator(&self) -> u128 {
        self.sources.iter().map(|&(_, c)| c).sum()
    }
}

/// Share of `m`-bit strings that are all ones or have an all-zero derivative,
/// counted source by source.
pub fn not_prime_probability(m: usize) -> Result<NotPrimeBreakdown> {
    if !(3..=64).contains(&m) {
        return Err(Error::Domain {
            what: "m",
            value: m as f64,
            domain: "3..=64",
        });
    }
    let mut sources = vec![
        (NotPrimeSource::AllOnes, 1u128),
        (NotPrimeSource::ZeroDerivative(0), 1u128),
    ];
    sources.extend((1..=m - 2).map(|k| (NotPrimeSource::ZeroDerivative(k), 1u128 << k)));
    let denominator = 1u128 << m;
    let numerator: u128 = sources.iter().map(|&(_, c)| c).sum();
    Ok(NotPrimeBreakdown {
        m,
        sources,
        denominator,
        total: numerator as f64 / denominator as f64,
    })
}

/// A composite whose binary form is two identical halves.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodicComposite {
    pub bits: usize,
    pub binary: String,
    pub decimal: u64,
    pub bien: f64,
}

pub const PERIODIC_COMPOSITE_CAP: u64 = 1 << 24;

/// Every `x < limit` of the form `a * (2^n + 1)` with `2 <= a < 2^n` and
/// `2n <= max_bits`, listed at the smallest such `2n` bits.
pub fn periodic_composites(limit: u64, max_bits: usize) -> Result<Vec<PeriodicComposite>> {
    if limit > PERIODIC_COMPOSITE_CAP {
        return Err(Error::ResourceCap {
            requested: limit,
            cap: PERIODIC_COMPOSITE_CAP,
        });
    }
    let mut best: std::collections::BTreeMap<u64, usize> = Default::default();
    for n in 1..=(max_bits / 2).min(31) {
        let period = (1u64 << n) + 1;
        if 2 * period > limit {
            break;
        }
        for a in 2..(1u64 << n) {
            let x = a * period;
            if x >= limit {
                break;
            }
            best.entry(x).or_insert(2 * n);
        }
    }
    best.into_iter()
        .map(|(x, bits)| {
            let s = encode_binary(x, bits)?;
            Ok(PeriodicComposite {
                bits,
                binary: s.to_string(),
                decimal: x,
                bien: bien(&s, 1)?,
            })
        })
        .collect()
}

/// True iff the low `n_half` bits of `x` are the complement of the high ones.
pub fn is_n_periodic(x: u64, n_half: usize) -> Result<bool> {
    if n_half == 0 || n_half > 32 {
        return Err(Error::Domain {
            what: "n_half",
            value: n_half as f64,
            domain: "1..=32",
        });
    }
    let s = BitString::new(x, 2 * n_half)?;
    let mask = if n_half == 32 { u32::MAX as u64 } else { (1u64 << n_half) - 1 };
    let (a, b) = (s.value() >> n_half, s.value() & mask);
    Ok(b == mask - a)
}

/// True iff the base-`base` digits of `x` form two identical halves.
pub fn is_periodic_in_base(x: u64, base: u64) -> Result<bool> {
    if base < 2 {
        return Err(Error::Domain {
            what: "base",
            value: base as f64,
            domain: "base >= 2",
        });
    }
    let mut digits = Vec::new();
    let mut v = x;
    while v > 0 {
        digits.push(v % base);
        v /= base;
    }
    let len = digits.len();
    Ok(len >= 2 && len % 2 == 0 && digits[..len / 2] == digits[len / 2..])
}
