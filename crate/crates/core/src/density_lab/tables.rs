use serde::Serialize;
use statrs::statistics::Statistics;

use crate::bientropy::bien_of_integer;
use crate::error::{Error, Result};
use crate::primality::{classify, sieve, Klass, NumberRecord};
use crate::trientropy::trien_of_integer;

/// Upper edges of the white, yellow, orange and red bands.
pub const BAND_THRESHOLDS: [f64; 4] = [0.15, 0.25, 0.5, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Colour {
    White,
    Yellow,
    Orange,
    Red,
    Purple,
}

impl Colour {
    pub const BANDS: [Colour; 4] = [Colour::White, Colour::Yellow, Colour::Orange, Colour::Red];

    pub fn hex(self) -> &'static str {
        match self {
            Colour::White => "#FFFFFF",
            Colour::Yellow => "#FFD700",
            Colour::Orange => "#FF8C00",
            Colour::Red => "#CC0000",
            Colour::Purple => "#800080",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Colour::White => "White",
            Colour::Yellow => "Yellow",
            Colour::Orange => "Orange",
            Colour::Red => "Red",
            Colour::Purple => "Purple",
        }
    }

    /// Band of a BiEntropy value; bands are `[lo, hi)` except the last, which
    /// includes 1.
    pub fn of(bien: f64) -> Colour {
        BAND_THRESHOLDS
            .iter()
            .position(|&hi| bien < hi)
            .map_or(Colour::Red, |i| Colour::BANDS[i])
    }
}

/// Records for every `x < limit` with BiEntropy at `bits` and, if requested,
/// TriEntropy at `trits`.
pub fn number_records(
    limit: u64,
    bits: usize,
    power: u32,
    trits: Option<usize>,
) -> Result<Vec<NumberRecord>> {
    let table = sieve(limit + 2)?;
    (0..limit)
        .map(|x| {
            let (klass, flags) = classify(x, &table)?;
            Ok(NumberRecord {
                x,
                bien: bien_of_integer(x, bits, power)?,
                trien: trits.map(|w| trien_of_integer(x, w)).transpose()?,
                klass,
                flags,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Band {
    pub colour: Colour,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub primes: usize,
    pub proportion: f64,
}

/// Counts and prime proportions per BiEntropy band.
pub fn banded_proportions(records: &[NumberRecord], thresholds: &[f64]) -> Result<Vec<Band>> {
    if thresholds.is_empty() || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "band thresholds must be non-empty and increasing".into(),
        ));
    }
    let last = thresholds.len() - 1;
    let band_of = |b: f64| {
        thresholds
            .iter()
            .position(|&hi| b < hi)
            .unwrap_or(last)
    };
    let mut bands: Vec<Band> = thresholds
        .iter()
        .enumerate()
        .map(|(i, &hi)| Band {
            colour: Colour::BANDS.get(i).copied().unwrap_or(Colour::Red),
            lo: if i == 0 { 0.0 } else { thresholds[i - 1] },
            hi,
            count: 0,
            primes: 0,
            proportion: 0.0,
        })
        .collect();
    for r in records {
        let band = &mut bands[band_of(r.bien)];
        band.count += 1;
        band.primes += usize::from(r.is_prime());
    }
    for band in &mut bands {
        if band.count > 0 {
            band.proportion = band.primes as f64 / band.count as f64;
        }
    }
    Ok(bands)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub x: u64,
    pub bien: f64,
    /// Band colour, ignoring primality.
    pub band: Colour,
    pub prime: bool,
}

impl GridCell {
    /// Colour as drawn: purple for primes, the band colour otherwise.
    pub fn colour(&self) -> Colour {
        if self.prime {
            Colour::Purple
        } else {
            self.band
        }
    }
}

/// The 8-bit numbers laid out by high nibble (rows) and low nibble (columns),
/// each axis ordered by 4-bit BiEntropy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Figure1Grid {
    pub nibble_order: [u8; 16],
    pub cells: Vec<Vec<GridCell>>,
}

pub fn figure1_grid() -> Figure1Grid {
    let mut nibble_order: [u8; 16] = std::array::from_fn(|i| i as u8);
    let nibble_bien = |v: u8| bien_of_integer(u64::from(v), 4, 1).expect("4-bit nibble");
    nibble_order.sort_by(|&a, &b| nibble_bien(a).total_cmp(&nibble_bien(b)).then(a.cmp(&b)));
    let table = sieve(256).expect("small sieve");
    let cells = nibble_order
        .iter()
        .map(|&hi| {
            nibble_order
                .iter()
                .map(|&lo| {
                    let x = (u64::from(hi) << 4) | u64::from(lo);
                    let bien = bien_of_integer(x, 8, 1).expect("8-bit value");
                    GridCell {
                        x,
                        bien,
                        band: Colour::of(bien),
                        prime: table.is_prime(x).expect("in table"),
                    }
                })
                .collect()
        })
        .collect();
    Figure1Grid {
        nibble_order,
        cells,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatClass {
    Prime,
    NotPrime,
    Odd,
    Mersenne,
    Twin,
}

impl StatClass {
    pub const ALL: [StatClass; 5] = [
        StatClass::Prime,
        StatClass::NotPrime,
        StatClass::Odd,
        StatClass::Mersenne,
        StatClass::Twin,
    ];

    pub fn label(self) -> &'static str {
        match self {
            StatClass::Prime => "Prime",
            StatClass::NotPrime => "Not Prime",
            StatClass::Odd => "Odd",
            StatClass::Mersenne => "Mersenne",
            StatClass::Twin => "Twin",
        }
    }

    fn contains(self, r: &NumberRecord) -> bool {
        match self {
            StatClass::Prime => r.klass == Klass::Prime,
            StatClass::NotPrime => r.klass != Klass::Prime,
            StatClass::Odd => r.klass == Klass::OddComposite,
            StatClass::Mersenne => r.flags.mersenne_prime,
            StatClass::Twin => r.flags.twin_prime_member,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassStats {
    pub class: StatClass,
    pub mean: f64,
    /// Sample standard deviation.
    pub stddev: f64,
    pub n: usize,
}

/// Mean and sample standard deviation of BiEntropy per class.
pub fn class_means(records: &[NumberRecord]) -> Vec<ClassStats> {
    StatClass::ALL
        .iter()
        .map(|&class| {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| class.contains(r))
                .map(|r| r.bien)
                .collect();
            ClassStats {
                class,
                mean: (&values).mean(),
                stddev: (&values).std_dev(),
                n: values.len(),
            }
        })
        .collect()
}
