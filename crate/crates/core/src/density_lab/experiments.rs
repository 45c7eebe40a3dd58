use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::fit::{fit_cubic, FitResult};
use super::ranking::{rank_range, RankedTable, Scorer, Widths};
use crate::error::{Error, Result};

/// Largest population for `trientropy_density`.
pub const TRIEN_DENSITY_CAP: u64 = 1_594_323; // 3^13
/// Largest checkpoint for `tribien_cubics`.
pub const TRIBIEN_CAP: u64 = 16_384;

/// Smallest odd trit width (at least 3) that holds every value below `limit`.
pub fn trit_width_for(limit: u64) -> usize {
    let mut width = 3;
    while 3u64.pow(width as u32) < limit {
        width += 2;
    }
    width
}

fn bit_width_for(limit: u64) -> usize {
    (64 - limit.saturating_sub(1).leading_zeros() as usize).max(2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriDensity {
    pub ranked: RankedTable,
    pub fit: FitResult,
}

/// Rank `0..limit` by TriEntropy and fit a through-origin cubic to the
/// cumulative prime count.
pub fn trientropy_density(limit: u64) -> Result<TriDensity> {
    if limit > TRIEN_DENSITY_CAP {
        return Err(Error::ResourceCap {
            requested: limit,
            cap: TRIEN_DENSITY_CAP,
        });
    }
    let widths = Widths::new(bit_width_for(limit), trit_width_for(limit));
    let ranked = rank_range(limit, Scorer::Trien, widths)?;
    let fit = fit_cubic(&ranked.cumulative_series())?;
    Ok(TriDensity { ranked, fit })
}

pub const SEGMENTS: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GridCellCounts {
    pub members: Vec<u64>,
    pub primes: usize,
    pub sixes: usize,
}

/// Counts on either side of the main diagonal; "above" means the TriEntropy
/// segment exceeds the BiEntropy segment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TriangleCounts {
    pub primes_above: usize,
    pub primes_below: usize,
    pub sixes_above: usize,
    pub sixes_below: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InteractionGrid {
    pub widths: Widths,
    /// `cells[b][t]`: BiEntropy segment `b`, TriEntropy segment `t`.
    pub cells: Vec<Vec<GridCellCounts>>,
    /// Cells holding both a prime and a multiple of six.
    pub collisions: Vec<(usize, usize)>,
    pub triangles: TriangleCounts,
    /// Uniformity of the non-primes over all cells.
    pub non_prime_uniformity: ChiSquare,
}

impl InteractionGrid {
    /// Primes minus multiples of six per cell.
    pub fn signed_counts(&self) -> Vec<Vec<i64>> {
        self.cells
            .iter()
            .map(|row| row.iter().map(|c| c.primes as i64 - c.sixes as i64).collect())
            .collect()
    }
}

/// Split `0..limit` into 16 BiEntropy and 16 TriEntropy segments and cross them.
pub fn interaction_grid(limit: u64, widths: Widths) -> Result<InteractionGrid> {
    if limit == 0 || !limit.is_multiple_of(SEGMENTS as u64) {
        return Err(Error::InvalidParameter(format!(
            "limit {limit} must be a positive multiple of {SEGMENTS}"
        )));
    }
    let by_bien = rank_range(limit, Scorer::Bien { power: 1 }, widths)?;
    let by_trien = rank_range(limit, Scorer::Trien, widths)?;
    let size = (limit / SEGMENTS as u64) as usize;
    let (b_rank, t_rank) = (by_bien.rank_of(), by_trien.rank_of());
    let prime = {
        let mut p = vec![false; limit as usize];
        for e in &by_bien.entries {
            p[e.x as usize] = e.is_prime;
        }
        p
    };
    let mut cells = vec![vec![GridCellCounts::default(); SEGMENTS]; SEGMENTS];
    let mut triangles = TriangleCounts::default();
    for x in 0..limit {
        let (b, t) = (b_rank[x as usize] / size, t_rank[x as usize] / size);
        let cell = &mut cells[b][t];
        cell.members.push(x);
        let is_prime = prime[x as usize];
        let six = x % 6 == 0;
        cell.primes += usize::from(is_prime);
        cell.sixes += usize::from(six);
        if t > b {
            triangles.primes_above += usize::from(is_prime);
            triangles.sixes_above += usize::from(six);
        } else if t < b {
            triangles.primes_below += usize::from(is_prime);
            triangles.sixes_below += usize::from(six);
        }
    }
    let mut collisions = Vec::new();
    for (b, row) in cells.iter().enumerate() {
        for (t, c) in row.iter().enumerate() {
            if c.primes > 0 && c.sixes > 0 {
                collisions.push((b, t));
            }
        }
    }
    let non_prime_uniformity = chi_square_uniform(
        cells
            .iter()
            .flatten()
            .map(|c| (c.members.len() - c.primes) as f64),
    );
    Ok(InteractionGrid {
        widths,
        cells,
        collisions,
        triangles,
        non_prime_uniformity,
    })
}

fn chi_square_uniform(counts: impl Iterator<Item = f64>) -> ChiSquare {
    let counts: Vec<f64> = counts.collect();
    let expected = counts.iter().sum::<f64>() / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|c| (c - expected).powi(2) / expected)
        .sum::<f64>();
    let dof = counts.len() - 1;
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN);
    ChiSquare {
        statistic,
        dof,
        p_value,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CubicCheckpoint {
    pub x: u64,
    pub widths: Widths,
    pub fit: FitResult,
    /// Fitted cumulative count at the last rank.
    pub endpoint: f64,
    /// Primes below `x`.
    pub primes: u64,
    pub relative_error: f64,
}

/// For each checkpoint `X`, rank `0..X` by TriBiEntropy (BiEntropy at the bit
/// length of `X - 1` plus TriEntropy at `trits`) and fit a through-origin cubic.
pub fn tribien_cubics(checkpoints: &[u64], trits: usize, power: u32) -> Result<Vec<CubicCheckpoint>> {
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "checkpoints must be strictly ascending".into(),
        ));
    }
    checkpoints
        .iter()
        .map(|&x| {
            if x > TRIBIEN_CAP {
                return Err(Error::ResourceCap {
                    requested: x,
                    cap: TRIBIEN_CAP,
                });
            }
            let widths = Widths::new(bit_width_for(x), trits);
            let ranked = rank_range(x, Scorer::TriBien { power }, widths)?;
            let fit = fit_cubic(&ranked.cumulative_series())?;
            let endpoint = *fit.fitted.last().expect("non-empty fit");
            let primes = ranked.total_primes();
            Ok(CubicCheckpoint {
                x,
                widths,
                relative_error: (endpoint - primes as f64).abs() / primes as f64,
                endpoint,
                primes,
                fit,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primality::{pi_of, sieve};

    #[test]
    fn widths() {
        assert_eq!(trit_width_for(256), 7);
        assert_eq!(trit_width_for(19_683), 9);
        assert_eq!(trit_width_for(19_684), 11);
        assert_eq!(trit_width_for(2), 3);
        assert_eq!(bit_width_for(256), 8);
        assert_eq!(bit_width_for(257), 9);
        assert_eq!(bit_width_for(2), 2);
    }

    #[test]
    fn small_density_run() {
        let d = trientropy_density(243).unwrap();
        assert_eq!(d.ranked.len(), 243);
        assert_eq!(d.ranked.widths.trits, 5);
        let t = sieve(243).unwrap();
        assert_eq!(d.ranked.total_primes(), pi_of(242, &t).unwrap());
        assert!(trientropy_density(TRIEN_DENSITY_CAP + 1).is_err());
    }

    #[test]
    fn interaction_grid_partitions_the_population() {
        let g = interaction_grid(256, Widths::new(8, 9)).unwrap();
        let mut seen = vec![0; 256];
        for row in &g.cells {
            for c in row {
                for &x in &c.members {
                    seen[x as usize] += 1;
                }
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
        for i in 0..SEGMENTS {
            let row: usize = g.cells[i].iter().map(|c| c.members.len()).sum();
            let col: usize = g.cells.iter().map(|r| r[i].members.len()).sum();
            assert_eq!((row, col), (16, 16));
        }
        let primes: usize = g.cells.iter().flatten().map(|c| c.primes).sum();
        let sixes: usize = g.cells.iter().flatten().map(|c| c.sixes).sum();
        assert_eq!((primes, sixes), (54, 43));
        assert_eq!(g.non_prime_uniformity.dof, 255);
        assert!(g.non_prime_uniformity.p_value > 0.01);
        assert!(interaction_grid(250, Widths::new(8, 9)).is_err());
    }

    #[test]
    fn chi_square_of_a_flat_histogram_is_zero() {
        let c = chi_square_uniform([4.0; 10].into_iter());
        assert_eq!(c.statistic, 0.0);
        assert!((c.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_checkpoints() {
        assert!(matches!(
            tribien_cubics(&[2], 9, 1),
            Err(Error::DegenerateFit { .. })
        ));
        assert!(tribien_cubics(&[64, 16], 9, 1).is_err());
        assert!(tribien_cubics(&[TRIBIEN_CAP + 1], 9, 1).is_err());
        let rows = tribien_cubics(&[16, 64, 256, 1024, 2048, 4096, 8192, 16384], 9, 1).unwrap();
        let at_4096 = rows.iter().find(|r| r.x == 4096).unwrap();
        assert!(at_4096.relative_error < 0.05, "{}", at_4096.relative_error);
        assert_eq!(at_4096.widths.bits, 12);
        // Observed signs of the leading coefficient, frozen as a regression fixture.
        let signs: Vec<bool> = rows.iter().map(|r| r.fit.coefficients[0] > 0.0).collect();
        assert_eq!(signs, [true, false, false, false, false, false, true, false]);
    }
}
