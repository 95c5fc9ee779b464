use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::Error;

/// An element of `Z_2^n`: one flip bit per level.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GroupElement {
    bits: Vec<bool>,
}

impl GroupElement {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        GroupElement { bits }
    }

    pub fn identity(len: usize) -> Self {
        GroupElement {
            bits: vec![false; len],
        }
    }

    /// Element whose bit `k` is bit `k` of `code`, for `k < len`.
    pub fn from_code(code: u64, len: usize) -> Self {
        GroupElement {
            bits: (0..len).map(|k| (code >> k) & 1 == 1).collect(),
        }
    }

    /// All `2^len` elements, ordered by [`GroupElement::from_code`].
    pub fn all(len: usize) -> impl Iterator<Item = GroupElement> {
        assert!(len < 64);
        (0..1u64 << len).map(move |c| GroupElement::from_code(c, len))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        GroupElement {
            bits: (0..len).map(|_| rng.random::<bool>()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Group law. The shorter operand is padded with zeros.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let n = self.len().max(other.len());
        let get = |g: &GroupElement, k: usize| g.bits.get(k).copied().unwrap_or(false);
        GroupElement {
            bits: (0..n).map(|k| get(self, k) ^ get(other, k)).collect(),
        }
    }

    /// Drops the first bit.
    pub fn shift(&self) -> GroupElement {
        GroupElement {
            bits: self.bits.iter().skip(1).copied().collect(),
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    position: i + 1,
                    found: c,
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(GroupElement::from_bits)
    }
}
