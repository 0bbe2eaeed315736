//! Binary strings over {0,1}: assignments, access strings, edge labels and
//! classification-tree tests all share this one type.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitsError {
    #[error("index {index} out of range for a string of length {len}")]
    OutOfRange { index: usize, len: usize },
    #[error("strings have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("cannot flip the first bit of the empty string")]
    Empty,
    #[error("invalid character {0:?} in bit string")]
    BadChar(char),
}

/// A string of bits, stored one bit per byte.
///
/// Ordering is lexicographic on the bits, shorter strings first on ties of
/// the common prefix. The empty string is written `λ` by [`BitString::display_id`].
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn zeros(len: usize) -> Self {
        BitString(vec![0; len])
    }

    /// Builds a string from raw bits; every element must be 0 or 1.
    pub fn from_bits(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|&b| b <= 1));
        BitString(bits)
    }

    /// Concatenation of several bit slices.
    pub fn join(parts: &[&[u8]]) -> Self {
        let len = parts.iter().map(|p| p.len()).sum();
        let mut bits = Vec::with_capacity(len);
        for p in parts {
            bits.extend_from_slice(p);
        }
        BitString(bits)
    }

    /// Low `len` bits of `value`, most significant first.
    pub fn from_index(value: u64, len: usize) -> Self {
        BitString((0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    /// Bit at 0-based position `i`.
    pub fn bit(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn first(&self) -> Option<u8> {
        self.0.first().copied()
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.0.push(bit);
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        BitString::join(&[&self.0, &other.0])
    }

    /// The first `i` bits.
    pub fn pre(&self, i: usize) -> Result<BitString, BitsError> {
        if i > self.len() {
            return Err(BitsError::OutOfRange { index: i, len: self.len() });
        }
        Ok(BitString(self.0[..i].to_vec()))
    }

    /// The last `i` bits.
    pub fn suf(&self, i: usize) -> Result<BitString, BitsError> {
        if i > self.len() {
            return Err(BitsError::OutOfRange { index: i, len: self.len() });
        }
        Ok(BitString(self.0[self.len() - i..].to_vec()))
    }

    /// `pre(a, |a| - j) · suf(b, j)`, defined for `0 <= j <= |a|`.
    pub fn cro(a: &BitString, b: &BitString, j: usize) -> Result<BitString, BitsError> {
        if a.len() != b.len() {
            return Err(BitsError::LengthMismatch { left: a.len(), right: b.len() });
        }
        if j > a.len() {
            return Err(BitsError::OutOfRange { index: j, len: a.len() });
        }
        let split = a.len() - j;
        Ok(BitString::join(&[&a.0[..split], &b.0[split..]]))
    }

    pub fn flip_first(&self) -> Result<BitString, BitsError> {
        let mut bits = self.0.clone();
        match bits.first_mut() {
            Some(b) => *b ^= 1,
            None => return Err(BitsError::Empty),
        }
        Ok(BitString(bits))
    }

    /// Rendering used in dumps and logs: `λ` for the empty string.
    pub fn display_id(&self) -> String {
        if self.is_empty() {
            "λ".to_string()
        } else {
            self.to_string()
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.display_id())
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    /// Accepts `0`/`1` characters; `λ` (or the empty string) is the empty string.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "λ" {
            return Ok(BitString::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(BitsError::BadChar(other)),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
