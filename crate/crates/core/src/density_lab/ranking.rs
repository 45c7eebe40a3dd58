use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bientropy::bien_of_integer;
use crate::error::{Error, Result};
use crate::primality::sieve;
use crate::trientropy::{trien_of_integer, tribien};

/// Which entropy a population is ranked by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Scorer {
    Bien { power: u32 },
    Trien,
    TriBien { power: u32 },
}

/// Binary and trinary widths used to expand each number.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Widths {
    pub bits: usize,
    pub trits: usize,
}

impl Widths {
    pub const fn new(bits: usize, trits: usize) -> Self {
        Self { bits, trits }
    }
}

impl Scorer {
    pub fn score(&self, x: u64, widths: Widths) -> Result<f64> {
        match *self {
            Scorer::Bien { power } => bien_of_integer(x, widths.bits, power),
            Scorer::Trien => trien_of_integer(x, widths.trits),
            Scorer::TriBien { power } => tribien(x, widths.bits, widths.trits, power),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedEntry {
    pub x: u64,
    pub score: f64,
    pub is_prime: bool,
}

/// A population sorted by `(score, x)` ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedTable {
    pub scorer: Scorer,
    pub widths: Widths,
    pub entries: Vec<RankedEntry>,
    /// `cumulative_primes[i]` counts primes among ranks `0..=i`.
    pub cumulative_primes: Vec<u64>,
}

/// One equal-sized run of ranks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Segment {
    /// 1-based.
    pub index: usize,
    pub primes: u64,
    /// Score of the last member.
    pub upper_score: f64,
}

/// Score every member of `population`, then sort by score with ties broken by
/// ascending value.
pub fn rank<F>(population: &[u64], scorer: Scorer, widths: Widths, is_prime: F) -> Result<RankedTable>
where
    F: Fn(u64) -> bool + Sync,
{
    let mut entries = population
        .par_iter()
        .map(|&x| {
            Ok(RankedEntry {
                x,
                score: scorer.score(x, widths)?,
                is_prime: is_prime(x),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    entries.par_sort_by(|a, b| a.score.total_cmp(&b.score).then(a.x.cmp(&b.x)));
    let cumulative_primes = entries
        .iter()
        .scan(0u64, |acc, e| {
            *acc += u64::from(e.is_prime);
            Some(*acc)
        })
        .collect();
    Ok(RankedTable {
        scorer,
        widths,
        entries,
        cumulative_primes,
    })
}

/// Rank `0..limit` using a sieve for primality.
pub fn rank_range(limit: u64, scorer: Scorer, widths: Widths) -> Result<RankedTable> {
    let table = sieve(limit.max(2))?;
    let population: Vec<u64> = (0..limit).collect();
    rank(&population, scorer, widths, |x| {
        table.is_prime(x).expect("population lies inside the table")
    })
}

impl RankedTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_primes(&self) -> u64 {
        self.cumulative_primes.last().copied().unwrap_or(0)
    }

    /// Cumulative prime counts as reals, for fitting.
    pub fn cumulative_series(&self) -> Vec<f64> {
        self.cumulative_primes.iter().map(|&c| c as f64).collect()
    }

    /// Rank of each value, indexed by value. Only meaningful for `0..limit` populations.
    pub fn rank_of(&self) -> Vec<usize> {
        let mut ranks = vec![usize::MAX; self.len()];
        for (r, e) in self.entries.iter().enumerate() {
            if let Some(slot) = ranks.get_mut(e.x as usize) {
                *slot = r;
            }
        }
        ranks
    }

    /// Prime counts over `count` equal runs of ranks.
    pub fn segments(&self, count: usize) -> Result<Vec<Segment>> {
        if count == 0 || !self.len().is_multiple_of(count) {
            return Err(Error::Bounds(format!(
                "{} entries do not split into {count} equal segments",
                self.len()
            )));
        }
        let y = self.len() / count;
        (1..=count)
            .map(|i| {
                Ok(Segment {
                    index: i,
                    primes: q(self, y, i)?,
                    upper_score: self.entries[i * y - 1].score,
                })
            })
            .collect()
    }
}

/// Primes among ranks `[(i - 1) y, i y)`.
pub fn q(ranked: &RankedTable, y: usize, i: usize) -> Result<u64> {
    let n = ranked.len();
    if y == 0 || !n.is_multiple_of(y) || i == 0 || i > n / y {
        return Err(Error::Bounds(format!(
            "q(y={y}, i={i}) over {n} ranked entries"
        )));
    }
    let hi = ranked.cumulative_primes[i * y - 1];
    let lo = if i == 1 {
        0
    } else {
        ranked.cumulative_primes[(i - 1) * y - 1]
    };
    Ok(hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primality::is_prime_trial;
    use proptest::prelude::*;

    const BIEN1: Scorer = Scorer::Bien { power: 1 };

    #[test]
    fn table_three_segments() {
        let t = rank_range(256, BIEN1, Widths::new(8, 9)).unwrap();
        let primes: Vec<u64> = t.segments(8).unwrap().iter().map(|s| s.primes).collect();
        assert_eq!(primes, [1, 1, 8, 6, 6, 9, 9, 14]);
        let bounds = [0.1141, 0.2395, 0.4558, 0.4734, 0.9350, 0.9487, 0.9506, 0.9532];
        for (s, b) in t.segments(8).unwrap().iter().zip(bounds) {
            assert!((s.upper_score - b).abs() < 5e-5, "{} vs {b}", s.upper_score);
        }
        assert_eq!(q(&t, 32, 8).unwrap(), 14);
        assert_eq!(q(&t, 256, 1).unwrap(), 54);
        assert_eq!(q(&t, 32, 1).unwrap(), 1);
        assert!(q(&t, 32, 9).is_err());
        assert!(q(&t, 32, 0).is_err());
        assert!(q(&t, 30, 1).is_err());
    }

    #[test]
    fn tiny_population_is_total_and_deterministic() {
        let a = rank_range(4, BIEN1, Widths::new(2, 3)).unwrap();
        let b = rank_range(4, BIEN1, Widths::new(2, 3)).unwrap();
        assert_eq!(a, b);
        let xs: Vec<u64> = a.entries.iter().map(|e| e.x).collect();
        assert_eq!(xs, [0, 3, 1, 2]);
    }

    #[test]
    fn width_overflow_is_reported() {
        assert!(rank_range(300, BIEN1, Widths::new(8, 9)).is_err());
    }

    proptest! {
        #[test]
        fn ranking_is_a_sorted_permutation(
            mut pop in proptest::collection::vec(0u64..65_536, 1..200),
            power in 1u32..=10,
            which in 0usize..3,
        ) {
            let scorer = [Scorer::Bien { power }, Scorer::Trien, Scorer::TriBien { power }][which];
            let t = rank(&pop, scorer, Widths::new(16, 11), is_prime_trial).unwrap();
            let mut ranked: Vec<u64> = t.entries.iter().map(|e| e.x).collect();
            for w in t.entries.windows(2) {
                prop_assert!((w[0].score, w[0].x) <= (w[1].score, w[1].x));
            }
            ranked.sort_unstable();
            pop.sort_unstable();
            prop_assert_eq!(ranked, pop.clone());
            let primes = pop.iter().filter(|&&x| is_prime_trial(x)).count() as u64;
            prop_assert_eq!(t.total_primes(), primes);
        }
    }
}
