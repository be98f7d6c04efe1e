//! The Hadamard code `H_k` of length `2^k`.
//!
//! Index `i` is read little-endian: `i = sum_s i_s 2^s`, so bit `s` of the
//! message `w` contributes to every coordinate whose index has bit `s` set.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest code parameter accepted anywhere in the crate.
pub const MAX_K: u32 = 20;

/// A word of `H_k`: the `2^k` values `w . i` for `i = 0 .. 2^k - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    k: u32,
    bits: Vec<bool>,
}

impl Codeword {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits_to_string(&self.bits))
    }
}

impl FromStr for Codeword {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = parse_bits(s)?;
        let k = log2_exact(bits.len())?;
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if !is_codeword(&bits)? {
            return Err(Error::PromiseViolation);
        }
        Ok(Codeword { k, bits })
    }
}

impl Serialize for Codeword {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Codeword {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Renders bits as a `'0'`/`'1'` string, index 0 leftmost.
pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidInput(format!(
                "unexpected character {other:?} in bit string"
            ))),
        })
        .collect()
}

fn log2_exact(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}

/// Parity of `w . i` where `w` is given as a bitmask.
#[inline]
pub(crate) fn inner_product(w: u64, i: u64) -> bool {
    (w & i).count_ones() & 1 == 1
}

/// Encodes `w` (bit `s` of the message at position `s`) into `h(w)`.
pub fn encode(w: &[bool]) -> Result<Codeword> {
    let k = w.len() as u32;
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > MAX_K {
        return Err(Error::Unsupported(format!("k = {k} exceeds {MAX_K}")));
    }
    let mask = bits_to_mask(w);
    Ok(encode_mask(mask, k))
}

pub(crate) fn bits_to_mask(w: &[bool]) -> u64 {
    w.iter()
        .enumerate()
        .fold(0u64, |acc, (s, &b)| acc | (u64::from(b) << s))
}

pub(crate) fn encode_mask(w: u64, k: u32) -> Codeword {
    let bits = (0..1u64 << k).map(|i| inner_product(w, i)).collect();
    Codeword { k, bits }
}

/// All `2^k` codewords of `H_k`, ordered by message `w` read as an integer.
pub fn all_codewords(k: u32) -> Result<Vec<Codeword>> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    if k > MAX_K {
        return Err(Error::Unsupported(format!("k = {k} exceeds {MAX_K}")));
    }
    Ok((0..1u64 << k).map(|w| encode_mask(w, k)).collect())
}

/// Membership in `H_k` by comparison against every codeword.
pub fn is_codeword(x: &[bool]) -> Result<bool> {
    let k = log2_exact(x.len())?;
    if k == 0 {
        // H_0 is not defined; a single bit is never accepted as a word.
        return Err(Error::ZeroK);
    }
    if k > MAX_K {
        return Err(Error::Unsupported(format!("k = {k} exceeds {MAX_K}")));
    }
    Ok((0..1u64 << k).any(|w| {
        x.iter()
            .enumerate()
            .all(|(i, &b)| inner_product(w, i as u64) == b)
    }))
}

/// Checks `x_i = x_{[i]} xor x_{i-[i]}` for every `i` in `S_k`.
///
/// For `x_0 = 0` this is equivalent to membership in `H_k`.
pub fn local_test(x: &[bool]) -> Result<bool> {
    log2_exact(x.len())?;
    if x[0] {
        return Err(Error::NonZeroFirstBit);
    }
    Ok(first_local_violation(x).is_none())
}

/// The smallest `j` in `S_k` at which the local condition fails, if any.
/// Assumes `x.len()` is a power of two.
pub fn first_local_violation(x: &[bool]) -> Option<usize> {
    let k = x.len().trailing_zeros();
    index::non_powers(k).find(|&i| {
        let top = index::floor_pow2(i);
        x[i] != (x[top] ^ x[i - top])
    })
}

/// Recovers `w` from a word known to lie in `H_k`: `w_s = x_{2^s}`.
pub fn promise_decode(x: &[bool]) -> Result<Vec<bool>> {
    if !is_codeword(x)? {
        return Err(Error::PromiseViolation);
    }
    let k = x.len().trailing_zeros();
    Ok((0..k).map(|s| x[1usize << s]).collect())
}

/// Index helpers shared by the code, the protocols and the polynomials.
pub mod index {
    /// `[i]`, the largest power of two not exceeding `i`. Requires `i >= 1`.
    #[inline]
    pub fn floor_pow2(i: usize) -> usize {
        debug_assert!(i >= 1);
        1usize << (usize::BITS - 1 - i.leading_zeros())
    }

    /// Indices in `[1, 2^k - 1]` that are not powers of two (the set `S_k`).
    pub fn non_powers(k: u32) -> impl Iterator<Item = usize> + Clone {
        (1usize..1usize << k).filter(|i| !i.is_power_of_two())
    }

    pub fn is_non_power(k: u32, j: usize) -> bool {
        j >= 1 && j < (1usize << k) && !j.is_power_of_two()
    }

    /// `|S_k| = 2^k - k - 1`.
    pub fn non_powers_len(k: u32) -> usize {
        (1usize << k) - k as usize - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&[false, false]).unwrap().to_string(), "0000");
        assert_eq!(encode(&[true, false]).unwrap().to_string(), "0101");
        assert_eq!(encode(&[true, true]).unwrap().to_string(), "0110");
        assert_eq!(encode(&[]), Err(Error::ZeroK));
    }

    #[test]
    fn membership_examples() {
        assert!(is_codeword(&bits("0000")).unwrap());
        assert!(is_codeword(&bits("0101")).unwrap());
        assert!(!is_codeword(&bits("0100")).unwrap());
        assert_eq!(is_codeword(&bits("010")), Err(Error::NotPowerOfTwo(3)));
    }

    #[test]
    fn local_test_examples() {
        assert!(local_test(&bits("0101")).unwrap());
        assert!(!local_test(&bits("0100")).unwrap());
        assert!(local_test(&[false; 16]).unwrap());
        assert_eq!(local_test(&bits("1101")), Err(Error::NonZeroFirstBit));
        // k = 1: S_1 is empty.
        assert!(local_test(&bits("01")).unwrap());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(promise_decode(&bits("0000")).unwrap(), vec![false, false]);
        assert_eq!(promise_decode(&bits("0101")).unwrap(), vec![true, false]);
        assert_eq!(promise_decode(&bits("0110")).unwrap(), vec![true, true]);
        assert_eq!(promise_decode(&bits("0100")), Err(Error::PromiseViolation));
    }

    #[test]
    fn index_tools() {
        for k in 1..=8 {
            let s: Vec<_> = index::non_powers(k).collect();
            assert_eq!(s.len(), index::non_powers_len(k));
            for i in s {
                let top = index::floor_pow2(i);
                assert!(1 <= i - top && i - top < top && top < i);
            }
        }
        assert_eq!(index::non_powers(2).collect::<Vec<_>>(), vec![3]);
        assert_eq!(index::non_powers(3).collect::<Vec<_>>(), vec![3, 5, 6, 7]);
    }

    #[test]
    fn codeword_string_roundtrip() {
        let c = encode(&[true, false, true]).unwrap();
        let back: Codeword = c.to_string().parse().unwrap();
        assert_eq!(back, c);
        assert!("0100".parse::<Codeword>().is_err());
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, "\"01011010\"");
    }
}
