//! Primes: sieve tables, trial division, classification flags, pi(x) and Li(x).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest table `sieve` will build.
pub const SIEVE_CAP: u64 = 1 << 25;

/// `PI_POWERS_OF_TWO[k]` is pi(2^k), the number of primes `<= 2^k`.
pub const PI_POWERS_OF_TWO: [u64; 33] = [
    0, 1, 2, 4, 6, 11, 18, 31, 54, 97, 172, 309, 564, 1028, 1900, 3512, 6542, 12251, 23000, 43390,
    82025, 155611, 295947, 564163, 1077871, 2063689, 3957809, 7603553, 14630843, 28192750,
    54400028, 105097565, 203280221,
];

/// Primality and prefix prime counts over `[0, limit)`.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    limit: u64,
    is_prime: Vec<bool>,
    cumulative: Vec<u32>,
}

/// Sieve of Eratosthenes over `[0, limit)`.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::InvalidParameter(format!(
            "sieve limit must be at least 2, got {limit}"
        )));
    }
    if limit > SIEVE_CAP {
        return Err(Error::ResourceCap {
            requested: limit,
            cap: SIEVE_CAP,
        });
    }
    let n = limit as usize;
    let mut is_prime = vec![true; n];
    is_prime[0] = false;
    is_prime[1] = false;
    let mut p = 2;
    while p * p < n {
        if is_prime[p] {
            for m in (p * p..n).step_by(p) {
                is_prime[m] = false;
            }
        }
        p += 1;
    }
    let mut cumulative = Vec::with_capacity(n);
    let mut count = 0u32;
    for &flag in &is_prime {
        count += u32::from(flag);
        cumulative.push(count);
    }
    Ok(PrimeTable {
        limit,
        is_prime,
        cumulative,
    })
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn is_prime(&self, x: u64) -> Result<bool> {
        self.check(x)?;
        Ok(self.is_prime[x as usize])
    }

    /// Primes in the table, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.is_prime
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| i as u64)
    }

    /// `cumulative()[x]` is pi(x).
    pub fn cumulative(&self) -> &[u32] {
        &self.cumulative
    }

    fn check(&self, x: u64) -> Result<()> {
        if x >= self.limit {
            return Err(Error::OutOfTable {
                x,
                limit: self.limit,
            });
        }
        Ok(())
    }
}

/// Number of primes `<= x`.
pub fn pi_of(x: u64, table: &PrimeTable) -> Result<u64> {
    table.check(x)?;
    Ok(u64::from(table.cumulative[x as usize]))
}

/// Exact trial division stepping through 6k +- 1 candidates.
pub fn is_prime_trial(x: u64) -> bool {
    if x < 4 {
        return x >= 2;
    }
    if x.is_multiple_of(2) || x.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= x {
        if x.is_multiple_of(d) || x.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

fn small_primes_through(limit: u64) -> Vec<u64> {
    let table = sieve(limit + 1).expect("base primes fit under the cap");
    table.primes().collect()
}

const SEGMENT: u64 = 1 << 18;

fn sieve_segment(lo: u64, hi: u64, base: &[u64], out: &mut Vec<bool>) {
    out.clear();
    out.resize((hi - lo) as usize, true);
    for &p in base {
        if p * p >= hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut m = start;
        while m < hi {
            out[(m - lo) as usize] = false;
            m += p;
        }
    }
    for x in lo..hi.min(2) {
        out[(x - lo) as usize] = false;
    }
}

/// Primes in `[lo, hi)` by a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi <= lo {
        return Vec::new();
    }
    let base = small_primes_through(isqrt(hi - 1));
    let mut buf = Vec::new();
    let mut found = Vec::new();
    let mut start = lo;
    while start < hi {
        let end = (start + SEGMENT).min(hi);
        sieve_segment(start, end, &base, &mut buf);
        found.extend(
            buf.iter()
                .enumerate()
                .filter(|(_, &p)| p)
                .map(|(i, _)| start + i as u64),
        );
        start = end;
    }
    found
}

/// Number of primes below `limit`, by a parallel segmented sieve.
pub fn count_primes_below(limit: u64) -> u64 {
    if limit <= 2 {
        return 0;
    }
    let base = small_primes_through(isqrt(limit - 1));
    let segments = limit.div_ceil(SEGMENT);
    (0..segments)
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            let lo = i * SEGMENT;
            let hi = (lo + SEGMENT).min(limit);
            sieve_segment(lo, hi, &base, buf);
            buf.iter().filter(|&&p| p).count() as u64
        })
        .sum()
}

pub(crate) fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r.saturating_mul(r) > x {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= x {
        r += 1;
    }
    r
}

/// Primality class. 0 counts as even and 1 as odd, so the odd class holds
/// every odd non-prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Klass {
    Prime,
    EvenComposite,
    OddComposite,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub mersenne_prime: bool,
    pub fermat_prime: bool,
    pub twin_prime_member: bool,
    pub divisible_by_six: bool,
}

/// A natural number with its entropies and classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberRecord {
    pub x: u64,
    pub bien: f64,
    pub trien: Option<f64>,
    pub klass: Klass,
    pub flags: Flags,
}

impl NumberRecord {
    pub fn is_prime(&self) -> bool {
        self.klass == Klass::Prime
    }
}

fn is_mersenne_form(x: u64) -> bool {
    x >= 1 && (x + 1).is_power_of_two()
}

fn is_fermat_form(x: u64) -> bool {
    // 2^(2^k) + 1 for k = 0..=5
    (0..6).any(|k| x == (1u64 << (1u32 << k)) + 1)
}

/// Class and flags of `x`. The table must reach `x + 2` for twin detection.
pub fn classify(x: u64, table: &PrimeTable) -> Result<(Klass, Flags)> {
    table.check(x.checked_add(2).ok_or(Error::OutOfTable {
        x,
        limit: table.limit,
    })?)?;
    let prime = table.is_prime[x as usize];
    let klass = if prime {
        Klass::Prime
    } else if x.is_multiple_of(2) {
        Klass::EvenComposite
    } else {
        Klass::OddComposite
    };
    let twin = prime
        && ((x >= 2 && table.is_prime[(x - 2) as usize]) || table.is_prime[(x + 2) as usize]);
    let flags = Flags {
        mersenne_prime: prime && is_mersenne_form(x),
        fermat_prime: prime && is_fermat_form(x),
        twin_prime_member: twin,
        divisible_by_six: x.is_multiple_of(6),
    };
    Ok((klass, flags))
}

/// Class and flags by trial division, for values beyond any table.
pub fn classify_trial(x: u64) -> (Klass, Flags) {
    let prime = is_prime_trial(x);
    let klass = if prime {
        Klass::Prime
    } else if x.is_multiple_of(2) {
        Klass::EvenComposite
    } else {
        Klass::OddComposite
    };
    let twin = prime
        && ((x >= 2 && is_prime_trial(x - 2)) || x.checked_add(2).is_some_and(is_prime_trial));
    (
        klass,
        Flags {
            mersenne_prime: prime && is_mersenne_form(x),
            fermat_prime: prime && is_fermat_form(x),
            twin_prime_member: twin,
            divisible_by_six: x.is_multiple_of(6),
        },
    )
}

/// Bits in the `m - 1` derivatives of an `m`-bit string, `(m^2 - m) / 2`.
pub fn derivative_count(m: u64) -> u64 {
    (m * m - m) / 2
}

/// Offset logarithmic integral `Li(x) = integral from 2 to x of dt / ln t`.
///
/// Evaluated by adaptive Simpson quadrature after substituting `t = e^u`,
/// which turns the integrand into the smooth `e^u / u`.
pub fn li_of(x: f64) -> Result<f64> {
    if x.is_nan() || x < 2.0 {
        return Err(Error::Domain {
            what: "x",
            value: x,
            domain: "[2, inf)",
        });
    }
    Ok(li_between(2.0, x))
}

/// `integral from a to b of dt / ln t` for `2 <= a <= b`.
pub(crate) fn li_between(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (lo, hi) = (a.ln(), b.ln());
    let f = |u: f64| u.exp() / u;
    // Split into unit pieces so the tolerance stays relative on each.
    let pieces = ((hi - lo).ceil() as usize).max(1);
    let step = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let l = lo + step * i as f64;
            let r = if i + 1 == pieces { hi } else { l + step };
            let (fl, fm, fr) = (f(l), f(0.5 * (l + r)), f(r));
            let whole = (r - l) / 6.0 * (fl + 4.0 * fm + fr);
            let tol = 1e-12 * whole.abs().max(1e-300);
            adaptive_simpson(&f, l, r, fl, fm, fr, whole, tol, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sieve_examples() {
        let t = sieve(256).unwrap();
        assert_eq!(pi_of(255, &t).unwrap(), 54);
        let t = sieve(65_536).unwrap();
        assert_eq!(pi_of(65_535, &t).unwrap(), 6542);
        let t = sieve(10).unwrap();
        assert_eq!(t.primes().collect::<Vec<_>>(), vec![2, 3, 5, 7]);
        assert!(!t.is_prime(0).unwrap() && !t.is_prime(1).unwrap());
        assert!(matches!(t.is_prime(10), Err(Error::OutOfTable { .. })));
        assert!(sieve(1).is_err());
        assert!(matches!(
            sieve(SIEVE_CAP + 1),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn pi_examples() {
        let t = sieve(300).unwrap();
        assert_eq!(pi_of(256, &t).unwrap(), 54);
        assert_eq!(pi_of(2, &t).unwrap(), 1);
        assert_eq!(PI_POWERS_OF_TWO[32], 203_280_221);
    }

    #[test]
    fn powers_of_two_fixture_matches_sieve() {
        let t = sieve((1 << 24) + 1).unwrap();
        for (k, &want) in PI_POWERS_OF_TWO.iter().enumerate().take(25) {
            assert_eq!(pi_of(1 << k, &t).unwrap(), want, "2^{k}");
        }
        assert_eq!(count_primes_below(1 << 24), PI_POWERS_OF_TWO[24]);
    }

    #[test]
    fn trial_division_examples() {
        assert!(!is_prime_trial(0));
        assert!(!is_prime_trial(1));
        assert!(is_prime_trial(2));
        assert!(is_prime_trial(103));
        assert!(is_prime_trial(4_294_967_291));
        assert!(!is_prime_trial(4_294_967_295));
        assert!(is_prime_trial(18_446_744_073_709_551_557));
    }

    #[test]
    fn largest_prime_below_two_to_the_32() {
        let top = primes_in_range((1 << 32) - 1000, 1 << 32);
        assert_eq!(top.last(), Some(&4_294_967_291));
        for p in top {
            assert!(is_prime_trial(p));
        }
    }

    #[test]
    fn sieve_agrees_with_trial_division_below_a_million() {
        let t = sieve(1_000_000).unwrap();
        for x in 0..1_000_000u64 {
            assert_eq!(t.is_prime(x).unwrap(), is_prime_trial(x), "{x}");
        }
        assert_eq!(
            primes_in_range(0, 1_000_000),
            t.primes().collect::<Vec<_>>()
        );
    }

    #[test]
    fn classify_examples() {
        let t = sieve(258).unwrap();
        let (k, f) = classify(127, &t).unwrap();
        assert_eq!(k, Klass::Prime);
        assert!(f.mersenne_prime && !f.fermat_prime);
        let (k, f) = classify(17, &t).unwrap();
        assert_eq!(k, Klass::Prime);
        assert!(f.fermat_prime && f.twin_prime_member);
        let (k, f) = classify(42, &t).unwrap();
        assert_eq!(k, Klass::EvenComposite);
        assert!(f.divisible_by_six);
        assert_eq!(classify(1, &t).unwrap().0, Klass::OddComposite);
        assert_eq!(classify(0, &t).unwrap().0, Klass::EvenComposite);
        assert!(classify(256, &t).is_err());
        for x in 0..256 {
            assert_eq!(classify(x, &t).unwrap(), classify_trial(x), "{x}");
        }
    }

    #[test]
    fn class_counts_below_256() {
        let t = sieve(258).unwrap();
        let classes: Vec<_> = (0..256).map(|x| classify(x, &t).unwrap()).collect();
        let count = |pred: &dyn Fn(&(Klass, Flags)) -> bool| classes.iter().filter(|c| pred(c)).count();
        assert_eq!(count(&|c| c.0 == Klass::Prime), 54);
        assert_eq!(count(&|c| c.0 != Klass::Prime), 202);
        assert_eq!(count(&|c| c.0 == Klass::OddComposite), 75);
        assert_eq!(count(&|c| c.1.mersenne_prime), 4);
        assert_eq!(count(&|c| c.1.twin_prime_member), 33);
        assert_eq!(count(&|c| c.0 != Klass::EvenComposite), 129);
        assert_eq!(count(&|c| c.1.divisible_by_six), 43);
        assert_eq!(count(&|c| c.1.divisible_by_six && c.0 == Klass::EvenComposite), 43);
    }

    #[test]
    fn derivative_counts() {
        assert_eq!(derivative_count(8), 28);
        assert_eq!(derivative_count(16), 120);
        assert_eq!(derivative_count(32), 496);
    }

    // Ramanujan's series for li(x); independent of the quadrature above.
    fn li_series(x: f64) -> f64 {
        const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
        let ln = x.ln();
        let mut sum = 0.0;
        let mut power_over_fact = 1.0;
        let mut inner = 0.0;
        for n in 1..400 {
            power_over_fact *= ln / n as f64;
            if (n - 1) % 2 == 0 {
                inner += 1.0 / (n as f64);
            }
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let term = sign * power_over_fact / 2f64.powi(n - 1) * inner;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && n > 10 {
                break;
            }
        }
        EULER_GAMMA + ln.ln() + x.sqrt() * sum
    }

    #[test]
    fn li_matches_series_oracle() {
        let li2 = li_series(2.0);
        assert_relative_eq!(li2, 1.045_163_780_117_492_7, max_relative = 1e-12);
        assert_eq!(li_of(2.0).unwrap(), 0.0);
        assert_relative_eq!(li_of(10.0).unwrap(), 5.120_435_724_669_8, max_relative = 1e-10);
        for x in [3.0, 10.0, 100.0, 256.0, 1e4, 65_536.0, 1e6, 4_294_967_296.0] {
            let want = li_series(x) - li2;
            assert_relative_eq!(li_of(x).unwrap(), want, max_relative = 1e-8);
        }
        assert!(li_of(1.5).is_err());
    }

    #[test]
    #[ignore = "slow: sieves every number below 2^32"]
    fn pi_of_two_to_the_32() {
        assert_eq!(count_primes_below(1 << 32), 203_280_221);
    }
}
