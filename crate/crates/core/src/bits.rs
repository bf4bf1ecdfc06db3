//! Binary selection vectors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A configuration `x ∈ {0,1}^n`.
///
/// Index 0 is the first variable. When a configuration is read as an integer,
/// index 0 is the least-significant bit.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn zeros(n: usize) -> Self {
        BitVector { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        BitVector { bits: vec![true; n] }
    }

    /// Builds the configuration whose integer encoding is `code`.
    pub fn from_code(n: usize, code: u64) -> Self {
        BitVector {
            bits: (0..n).map(|i| i < 64 && (code >> i) & 1 == 1).collect(),
        }
    }

    /// Uniform independent bits.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        BitVector {
            bits: (0..n).map(|_| rng.random::<bool>()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Indices of the set bits, ascending.
    pub fn ones_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Integer encoding; `None` when longer than 64 bits and any high bit is set.
    pub fn code(&self) -> Option<u64> {
        let mut code = 0u64;
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                if i >= 64 {
                    return None;
                }
                code |= 1 << i;
            }
        }
        Some(code)
    }

    /// Packs the bits into 64-bit words, bit `i` at word `i / 64`, position `i % 64`.
    pub fn to_words(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.bits.len().div_ceil(64)];
        for i in self.ones_indices() {
            words[i / 64] |= 1 << (i % 64);
        }
        words
    }

    /// First `n` bits.
    pub fn prefix(&self, n: usize) -> BitVector {
        BitVector {
            bits: self.bits[..n].to_vec(),
        }
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        BitVector { bits }
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.bits
    }
}

impl From<Vec<bool>> for BitVector {
    fn from(bits: Vec<bool>) -> Self {
        BitVector { bits }
    }
}

impl<'a> FromIterator<&'a u8> for BitVector {
    fn from_iter<T: IntoIterator<Item = &'a u8>>(iter: T) -> Self {
        BitVector {
            bits: iter.into_iter().map(|&b| b != 0).collect(),
        }
    }
}

impl FromIterator<bool> for BitVector {
    fn from_iter<T: IntoIterator<Item = bool>>(iter: T) -> Self {
        BitVector {
            bits: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '[' | ']'))
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::validation("bits", format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitVector::from)
    }
}

impl From<BitVector> for String {
    fn from(v: BitVector) -> String {
        v.to_string()
    }
}

impl TryFrom<String> for BitVector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_round_trip() {
        let v = BitVector::from_code(5, 0b10110);
        assert_eq!(v.to_string(), "01101");
        assert_eq!(v.code(), Some(0b10110));
        assert_eq!("0,1,1,0,1".parse::<BitVector>().unwrap(), v);
    }

    #[test]
    fn words_pack_lsb_first() {
        let mut v = BitVector::zeros(70);
        v.set(0, true);
        v.set(65, true);
        assert_eq!(v.to_words(), vec![1, 2]);
        assert_eq!(v.code(), None);
    }

    #[test]
    fn rejects_garbage() {
        assert!("01x".parse::<BitVector>().is_err());
    }
}
