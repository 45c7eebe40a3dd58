//! Trinary strings, pairwise trinary difference (PTD) derivatives and TriEntropy.
//!
//! The PTD of a triple is `(|a-b| + |b-c| + |a-c|) mod 3`; a derivative maps
//! each overlapping triple to one trit, so a level is two trits shorter than
//! the one before. Over all 27 triples the PTD yields 0, 1, 2 with
//! frequencies 3/27, 12/27, 12/27, which become the symbol priors for
//! derivative levels. The input string uses equiprobable priors.
//!
//! Each level is reduced to a single proportion `p = sum(freq_i * prior_i)` and
//! scored with the binary entropy `H(p)`. Level `k` carries weight `3^k` for
//! `k = 0..=(n-3)/2`. A derivative level that is all zero is suppressed
//! together with every level after it; level 0 never is.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bientropy::{bien_of_integer, binary_entropy, EntropyProfile, LevelTerm};
use crate::error::{Error, Result};

/// Priors for the symbols of the input string.
pub const INPUT_PRIORS: [f64; 3] = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0];
/// Priors for PTD derivative symbols (3/27, 12/27, 12/27).
pub const DERIVATIVE_PRIORS: [f64; 3] = [1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0];

/// Widest string `encode_trinary` accepts (3^40 < 2^64 < 3^41).
pub const MAX_ENCODE_WIDTH: usize = 40;
/// Widest string `trien` accepts; keeps every weight 3^k inside a u64.
pub const MAX_TRIEN_WIDTH: usize = 81;

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct TritString {
    trits: Vec<u8>,
}

impl TritString {
    pub fn from_trits(trits: &[u8]) -> Result<Self> {
        if trits.is_empty() {
            return Err(Error::WidthUnderflow { width: 0, min: 1 });
        }
        if let Some(&bad) = trits.iter().find(|&&t| t > 2) {
            return Err(Error::InvalidParameter(format!("trit digit {bad}")));
        }
        Ok(Self {
            trits: trits.to_vec(),
        })
    }

    pub fn width(&self) -> usize {
        self.trits.len()
    }

    pub fn trits(&self) -> &[u8] {
        &self.trits
    }

    /// Occurrences of 0, 1 and 2.
    pub fn counts(&self) -> [u64; 3] {
        let mut c = [0u64; 3];
        for &t in &self.trits {
            c[t as usize] += 1;
        }
        c
    }

    pub fn is_all_zero(&self) -> bool {
        self.trits.iter().all(|&t| t == 0)
    }

    /// Swaps the symbols 1 and 2.
    pub fn swap_one_two(&self) -> Self {
        Self {
            trits: self.trits.iter().map(|&t| (3 - t) % 3).collect(),
        }
    }

    /// The string read as a base-3 integer, if it fits in a u64.
    pub fn value(&self) -> Option<u64> {
        self.trits.iter().try_fold(0u64, |acc, &t| {
            acc.checked_mul(3)?.checked_add(u64::from(t))
        })
    }
}

impl fmt::Display for TritString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.trits {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl FromStr for TritString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let trits = s
            .chars()
            .map(|c| {
                c.to_digit(3)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::InvalidParameter(format!("'{c}' is not a trit")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_trits(&trits)
    }
}

/// Base-3 digits of `x`, most significant first, zero-padded to `width`.
pub fn encode_trinary(x: u64, width: usize) -> Result<TritString> {
    if width == 0 {
        return Err(Error::WidthUnderflow { width, min: 1 });
    }
    if width > MAX_ENCODE_WIDTH {
        return Err(Error::WidthTooLarge {
            width,
            max: MAX_ENCODE_WIDTH,
        });
    }
    let mut trits = vec![0u8; width];
    let mut rest = x;
    for slot in trits.iter_mut().rev() {
        *slot = (rest % 3) as u8;
        rest /= 3;
    }
    if rest != 0 {
        return Err(Error::WidthOverflow {
            value: x,
            width,
            radix: 3,
        });
    }
    Ok(TritString { trits })
}

/// Pairwise trinary difference of a triple.
#[inline]
pub fn ptd(a: u8, b: u8, c: u8) -> u8 {
    debug_assert!(a < 3 && b < 3 && c < 3);
    (a.abs_diff(b) + b.abs_diff(c) + a.abs_diff(c)) % 3
}

/// PTD over each overlapping triple; the result is two trits shorter.
pub fn trinary_derivative(s: &TritString) -> Result<TritString> {
    if s.width() < 3 {
        return Err(Error::WidthUnderflow {
            width: s.width(),
            min: 3,
        });
    }
    Ok(TritString {
        trits: s.trits.windows(3).map(|w| ptd(w[0], w[1], w[2])).collect(),
    })
}

/// A trit string with its PTD derivatives down to width 3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriDerivativeChain {
    pub levels: Vec<TritString>,
    /// First derivative level (k >= 1) that is all zero; it and later levels score 0.
    pub zeroed_from: Option<usize>,
}

fn check_trien_width(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::WidthUnderflow { width: n, min: 3 });
    }
    if n.is_multiple_of(2) {
        return Err(Error::EvenWidth(n));
    }
    if n > MAX_TRIEN_WIDTH {
        return Err(Error::WidthTooLarge {
            width: n,
            max: MAX_TRIEN_WIDTH,
        });
    }
    Ok(())
}

/// Levels `0..=(n-3)/2` of widths `n, n-2, ..., 3`.
pub fn tri_derivative_chain(s: &TritString) -> Result<TriDerivativeChain> {
    check_trien_width(s.width())?;
    let top = (s.width() - 3) / 2;
    let mut levels = Vec::with_capacity(top + 1);
    levels.push(s.clone());
    for _ in 0..top {
        let next = trinary_derivative(levels.last().expect("non-empty"))?;
        levels.push(next);
    }
    let zeroed_from = levels
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, l)| l.is_all_zero())
        .map(|(k, _)| k);
    Ok(TriDerivativeChain {
        levels,
        zeroed_from,
    })
}

/// `sum_i (c_i / sum c) * q_i`.
pub fn prior_weighted_p(counts: [u64; 3], priors: [f64; 3]) -> Result<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyString);
    }
    let prior_sum: f64 = priors.iter().sum();
    if priors.iter().any(|q| !(0.0..=1.0).contains(q)) || (prior_sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "priors {priors:?} are not a distribution"
        )));
    }
    Ok(counts
        .iter()
        .zip(priors)
        .map(|(&c, q)| c as f64 / total as f64 * q)
        .sum())
}

/// TriEntropy profile from per-level symbol counts.
///
/// `counts[0]` describes the input string and `counts[k]` derivative level `k`.
/// A level `k >= 1` whose symbols are all zero is suppressed along with every
/// level after it.
pub fn trien_from_level_counts(counts: &[[u64; 3]]) -> Result<EntropyProfile> {
    if counts.is_empty() {
        return Err(Error::EmptyString);
    }
    let mut suppressed = false;
    let mut per_level = Vec::with_capacity(counts.len());
    let mut weight = 1u64;
    for (k, &c) in counts.iter().enumerate() {
        let priors = if k == 0 {
            INPUT_PRIORS
        } else {
            DERIVATIVE_PRIORS
        };
        let p = prior_weighted_p(c, priors)?;
        let entropy = binary_entropy(p);
        if k >= 1 && c[1] == 0 && c[2] == 0 {
            suppressed = true;
        }
        per_level.push(LevelTerm {
            level: k,
            p,
            entropy,
            term: if suppressed { 0.0 } else { entropy },
            weight,
        });
        weight = weight
            .checked_mul(3)
            .ok_or_else(|| Error::InvalidParameter("too many trinary levels".into()))?;
    }
    Ok(EntropyProfile::from_terms(per_level))
}

pub fn trien_profile(s: &TritString) -> Result<EntropyProfile> {
    let chain = tri_derivative_chain(s)?;
    let counts: Vec<[u64; 3]> = chain.levels.iter().map(TritString::counts).collect();
    trien_from_level_counts(&counts)
}

/// TriEntropy of an odd-width trit string.
pub fn trien(s: &TritString) -> Result<f64> {
    Ok(trien_profile(s)?.score)
}

/// `trien(encode_trinary(x, width))`.
pub fn trien_of_integer(x: u64, width: usize) -> Result<f64> {
    trien(&encode_trinary(x, width)?)
}

/// BiEntropy of the binary form plus TriEntropy of the trinary form.
pub fn tribien(x: u64, bin_width: usize, tri_width: usize, power: u32) -> Result<f64> {
    Ok(bien_of_integer(x, bin_width, power)? + trien_of_integer(x, tri_width)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ts(s: &str) -> TritString {
        s.parse().unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_trinary(0, 9).unwrap().to_string(), "000000000");
        assert_eq!(encode_trinary(13, 3).unwrap().to_string(), "111");
        assert_eq!(encode_trinary(19682, 9).unwrap().to_string(), "222222222");
        assert!(matches!(
            encode_trinary(19683, 9),
            Err(Error::WidthOverflow { .. })
        ));
        assert_eq!(encode_trinary(12_345, 12).unwrap().value(), Some(12_345));
    }

    // PTD column of the 27-row PTD table, rows in lexicographic (A, B, C) order.
    const PTD_COLUMN: [u8; 27] = [
        0, 2, 1, 2, 2, 1, 1, 1, 1, //
        2, 2, 1, 2, 0, 2, 1, 2, 2, //
        1, 1, 1, 1, 2, 2, 1, 2, 0,
    ];

    #[test]
    fn ptd_matches_table_and_is_permutation_invariant() {
        let mut histogram = [0u32; 3];
        for a in 0..3u8 {
            for b in 0..3u8 {
                for c in 0..3u8 {
                    let row = (a * 9 + b * 3 + c) as usize;
                    let v = ptd(a, b, c);
                    assert_eq!(v, PTD_COLUMN[row], "({a},{b},{c})");
                    for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                        assert_eq!(ptd(x, y, z), v);
                    }
                    histogram[v as usize] += 1;
                }
            }
        }
        assert_eq!(histogram, [3, 12, 12]);
        assert_eq!(ptd(0, 0, 1), 2);
        assert_eq!(ptd(0, 1, 2), 1);
        assert_eq!(ptd(2, 2, 2), 0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(trinary_derivative(&ts("000000000")).unwrap(), ts("0000000"));
        assert_eq!(trinary_derivative(&ts("111111111")).unwrap(), ts("0000000"));
        assert_eq!(trinary_derivative(&ts("012012012")).unwrap(), ts("1111111"));
        assert!(trinary_derivative(&ts("01")).is_err());
    }

    #[test]
    fn chain_widths() {
        let chain = tri_derivative_chain(&ts("012012012")).unwrap();
        let widths: Vec<usize> = chain.levels.iter().map(TritString::width).collect();
        assert_eq!(widths, vec![9, 7, 5, 3]);
        assert_eq!(chain.zeroed_from, Some(2));
        assert!(matches!(
            tri_derivative_chain(&ts("0120")),
            Err(Error::EvenWidth(4))
        ));
    }

    #[test]
    fn prior_weighted_p_examples() {
        let eps = 1e-12;
        assert_abs_diff_eq!(
            prior_weighted_p([1, 2, 4], DERIVATIVE_PRIORS).unwrap(),
            25.0 / 63.0,
            epsilon = eps
        );
        assert_abs_diff_eq!(
            prior_weighted_p([1, 1, 3], DERIVATIVE_PRIORS).unwrap(),
            17.0 / 45.0,
            epsilon = eps
        );
        assert_abs_diff_eq!(
            prior_weighted_p([2, 6, 1], INPUT_PRIORS).unwrap(),
            1.0 / 3.0,
            epsilon = eps
        );
        assert_abs_diff_eq!(
            prior_weighted_p([1, 1, 1], DERIVATIVE_PRIORS).unwrap(),
            1.0 / 3.0,
            epsilon = eps
        );
        assert!(matches!(
            prior_weighted_p([0, 0, 0], INPUT_PRIORS),
            Err(Error::EmptyString)
        ));
        assert!(prior_weighted_p([1, 1, 1], [0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn worked_nine_trit_fixture() {
        let profile =
            trien_from_level_counts(&[[2, 6, 1], [1, 2, 4], [1, 1, 3], [1, 1, 1]]).unwrap();
        assert_eq!(profile.normalizer, 40);
        let entropies: Vec<f64> = profile.per_level.iter().map(|l| l.entropy).collect();
        for (got, want) in entropies.iter().zip([0.92, 0.97, 0.96, 0.92]) {
            assert_abs_diff_eq!(*got, want, epsilon = 0.005);
        }
        assert_abs_diff_eq!(profile.weighted_sum(), 37.23, epsilon = 0.01);
        assert_abs_diff_eq!(profile.score, 0.93, epsilon = 0.005);
    }

    #[test]
    fn constant_and_period_three_strings() {
        let h_third = binary_entropy(1.0 / 3.0);
        assert_abs_diff_eq!(trien(&ts("000000000")).unwrap(), h_third / 40.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trien(&ts("000000000")).unwrap(), 0.0230, epsilon = 5e-5);
        // level 1 is all ones (p = 4/9), level 2 vanishes and suppresses the rest
        let expected = (h_third + 3.0 * binary_entropy(4.0 / 9.0)) / 40.0;
        assert_abs_diff_eq!(trien(&ts("012012012")).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.0973, epsilon = 5e-5);
    }

    #[test]
    fn period_three_strings_score_below_the_median() {
        let mut all: Vec<f64> = (0..19_683u64)
            .map(|x| trien_of_integer(x, 9).unwrap())
            .collect();
        all.sort_by(f64::total_cmp);
        let median = all[all.len() / 2];
        for block in ["012", "021", "102", "120", "201", "210", "001", "112"] {
            let s = ts(&block.repeat(3));
            let chain = tri_derivative_chain(&s).unwrap();
            assert!(trien(&s).unwrap() < median, "{s}");
            if block.chars().collect::<std::collections::HashSet<_>>().len() == 3 {
                let first = &chain.levels[1];
                assert!(first.trits().iter().all(|&t| t == first.trits()[0]), "{s}");
            }
        }
    }

    #[test]
    fn tribien_is_the_sum() {
        assert_abs_diff_eq!(
            tribien(0, 8, 9, 1).unwrap(),
            binary_entropy(1.0 / 3.0) / 40.0,
            epsilon = 1e-12
        );
        for x in [1u64, 17, 85, 127, 255] {
            let sum = bien_of_integer(x, 8, 1).unwrap() + trien_of_integer(x, 9).unwrap();
            assert_eq!(tribien(x, 8, 9, 1).unwrap(), sum);
        }
        assert!(tribien(256, 8, 9, 1).is_err());
        assert!(tribien(243, 8, 5, 1).is_err());
    }

    #[test]
    fn lower_bound_over_nine_trits() {
        let bound = binary_entropy(1.0 / 3.0) / 40.0;
        for x in 0..19_683u64 {
            let t = trien_of_integer(x, 9).unwrap();
            assert!(t >= bound - 1e-15 && t <= 1.0, "{x}: {t}");
        }
    }

    #[test]
    fn relabeling_one_and_two_is_symmetric_for_short_strings() {
        for n in [3usize, 5] {
            for x in 0..3u64.pow(n as u32) {
                let s = encode_trinary(x, n).unwrap();
                let a = trien(&s).unwrap();
                let b = trien(&s.swap_one_two()).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
        // From 7 trits on, level-2 values depend on which symbol was repeated.
        let s = ts("222222110");
        assert!((trien(&s).unwrap() - trien(&s.swap_one_two()).unwrap()).abs() > 1e-6);
    }

    fn odd_width(mut digits: Vec<u8>) -> TritString {
        if digits.len().is_multiple_of(2) {
            digits.push(0);
        }
        if digits.len() < 3 {
            digits.extend([1, 2]);
        }
        TritString::from_trits(&digits).unwrap()
    }

    proptest! {
        #[test]
        fn reversal_is_symmetric(digits in proptest::collection::vec(0u8..3, 1..=25)) {
            let s = odd_width(digits);
            let mut rev = s.trits().to_vec();
            rev.reverse();
            let r = TritString::from_trits(&rev).unwrap();
            prop_assert!((trien(&s).unwrap() - trien(&r).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn relabeling_keeps_first_level_zeros(digits in proptest::collection::vec(0u8..3, 1..=25)) {
            let s = odd_width(digits);
            let a = trinary_derivative(&s).unwrap();
            let b = trinary_derivative(&s.swap_one_two()).unwrap();
            let zeros = |t: &TritString| t.trits().iter().map(|&d| d == 0).collect::<Vec<_>>();
            prop_assert_eq!(zeros(&a), zeros(&b));
        }
    }
}
