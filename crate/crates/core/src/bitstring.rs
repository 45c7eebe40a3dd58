//! Fixed-width binary strings, binary derivatives and periodicity.
//!
//! A [`BitString`] is stored packed in a `u64`, most significant bit first, so
//! widths are capped at 64. The width is always explicit: leading zeros are
//! part of the string and change its entropy.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported width in bits.
pub const MAX_WIDTH: usize = 64;

#[inline]
fn mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// A binary string of 1..=64 bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct BitString {
    value: u64,
    width: usize,
}

impl BitString {
    /// Wraps `value` as a string of `width` bits, rejecting values that do not fit.
    pub fn new(value: u64, width: usize) -> Result<Self> {
        if width == 0 {
            return Err(Error::WidthUnderflow { width, min: 1 });
        }
        if width > MAX_WIDTH {
            return Err(Error::WidthTooLarge {
                width,
                max: MAX_WIDTH,
            });
        }
        if value & !mask(width) != 0 {
            return Err(Error::WidthOverflow {
                value,
                width,
                radix: 2,
            });
        }
        Ok(Self { value, width })
    }

    /// Builds a string from 0/1 digits, most significant first.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut value = 0u64;
        for &b in bits {
            if b > 1 {
                return Err(Error::InvalidParameter(format!("bit digit {b}")));
            }
            value = (value << 1) | u64::from(b);
        }
        if bits.len() > MAX_WIDTH {
            return Err(Error::WidthTooLarge {
                width: bits.len(),
                max: MAX_WIDTH,
            });
        }
        Self::new(value, bits.len())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// The string read as an unsigned integer.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit at position `i`, counting from the most significant end.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.width, "bit index {i} out of range");
        ((self.value >> (self.width - 1 - i)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.width).map(|i| self.bit(i)).collect()
    }

    pub fn count_ones(&self) -> u32 {
        self.value.count_ones()
    }

    pub fn is_all_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_all_one(&self) -> bool {
        self.value == mask(self.width)
    }

    /// Bitwise complement at the same width.
    pub fn complement(&self) -> Self {
        Self {
            value: !self.value & mask(self.width),
            width: self.width,
        }
    }

    /// Bitwise XOR of two strings of equal width.
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.width != other.width {
            return Err(Error::InvalidParameter(format!(
                "xor of widths {} and {}",
                self.width, other.width
            )));
        }
        Ok(Self {
            value: self.value ^ other.value,
            width: self.width,
        })
    }

    /// First binary derivative: XOR of each adjacent pair, one bit shorter.
    pub fn derivative(&self) -> Result<Self> {
        binary_derivative(self)
    }

    /// Proportion of 1-bits.
    pub fn ones_proportion(&self) -> f64 {
        ones_proportion(self)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width)
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidParameter(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&digits)
    }
}

/// Encodes `x` as exactly `width` bits, zero-padded on the left.
pub fn encode_binary(x: u64, width: usize) -> Result<BitString> {
    if width < 2 {
        return Err(Error::WidthUnderflow { width, min: 2 });
    }
    BitString::new(x, width)
}

/// XOR of adjacent pairs: bit `i` of the result is `s[i] ^ s[i + 1]`.
pub fn binary_derivative(s: &BitString) -> Result<BitString> {
    if s.width < 2 {
        return Err(Error::WidthUnderflow {
            width: s.width,
            min: 2,
        });
    }
    let width = s.width - 1;
    Ok(BitString {
        value: (s.value ^ (s.value >> 1)) & mask(width),
        width,
    })
}

/// A string together with all of its binary derivatives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DerivativeChain {
    levels: Vec<BitString>,
}

impl DerivativeChain {
    /// Level 0 is the input, level `k` has width `n - k`, the last level has width 1.
    pub fn levels(&self) -> &[BitString] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Option<&BitString> {
        self.levels.get(k)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of the first all-zero derivative (k >= 1), if any.
    pub fn first_zero_level(&self) -> Option<usize> {
        self.levels
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, l)| l.is_all_zero())
            .map(|(k, _)| k)
    }
}

pub fn derivative_chain(s: &BitString) -> Result<DerivativeChain> {
    if s.width < 2 {
        return Err(Error::WidthUnderflow {
            width: s.width,
            min: 2,
        });
    }
    let mut levels = Vec::with_capacity(s.width);
    let mut current = *s;
    levels.push(current);
    while current.width > 1 {
        current = binary_derivative(&current)?;
        levels.push(current);
    }
    Ok(DerivativeChain { levels })
}

/// True when some derivative level k >= 1 is all zeros.
///
/// Level `2^m` vanishes exactly when the string has period `2^m`, and once a
/// level vanishes every later level does too.
pub fn is_periodic(s: &BitString) -> bool {
    if s.width < 2 {
        return false;
    }
    let mut value = s.value;
    let mut width = s.width;
    while width > 1 {
        width -= 1;
        value = (value ^ (value >> 1)) & mask(width);
        if value == 0 {
            return true;
        }
    }
    false
}

pub fn ones_proportion(s: &BitString) -> f64 {
    f64::from(s.count_ones()) / s.width as f64
}
