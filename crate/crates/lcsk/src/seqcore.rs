//! Alphabet-encoded sequences and Hamming-distance primitives.
//!
//! Symbols are stored as 1-based codes in `{1..sigma}`; external characters
//! are mapped at ingestion by [`Alphabet`]. All types are immutable after
//! construction and the operations are pure functions.

use crate::error::{Error, Result};

/// A small alphabet: a bijection between external byte symbols and the codes
/// `1..=sigma`, with `2 <= sigma <= 256`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    codes: Vec<Option<u16>>, // indexed by byte value
}

impl Alphabet {
    pub fn new(symbols: &[u8]) -> Result<Self> {
        if symbols.len() < 2 || symbols.len() > 256 {
            return Err(Error::AlphabetSize(symbols.len()));
        }
        let mut codes = vec![None; 256];
        for (i, &s) in symbols.iter().enumerate() {
            if codes[s as usize].is_some() {
                return Err(Error::DuplicateSymbol(s as char));
            }
            codes[s as usize] = Some(i as u16 + 1);
        }
        Ok(Alphabet {
            symbols: symbols.to_vec(),
            codes,
        })
    }

    /// The four-character DNA alphabet `{A, C, G, T}`.
    pub fn dna() -> Self {
        Alphabet::new(b"ACGT").expect("static alphabet")
    }

    /// The first `sigma` uppercase Latin letters, `2 <= sigma <= 26`.
    pub fn latin(sigma: u16) -> Result<Self> {
        if !(2..=26).contains(&sigma) {
            return Err(Error::AlphabetSize(sigma as usize));
        }
        Alphabet::new(&b"ABCDEFGHIJKLMNOPQRSTUVWXYZ"[..sigma as usize])
    }

    pub fn size(&self) -> u16 {
        self.symbols.len() as u16
    }

    pub fn code_of(&self, symbol: u8) -> Option<u16> {
        self.codes[symbol as usize]
    }

    pub fn symbol_of(&self, code: u16) -> Option<u8> {
        if code == 0 {
            return None;
        }
        self.symbols.get(code as usize - 1).copied()
    }

    /// Encode a byte string, rejecting symbols outside the alphabet.
    ///
    /// Silent remapping would corrupt distances, so unknown symbols are an
    /// error here; see [`Alphabet::encode_mapping_unknown`] for the opt-in
    /// alternative.
    pub fn encode(&self, text: &[u8]) -> Result<Sequence> {
        let mut codes = Vec::with_capacity(text.len());
        for (position, &b) in text.iter().enumerate() {
            match self.code_of(b) {
                Some(c) => codes.push(c),
                None => {
                    return Err(Error::UnknownSymbol {
                        symbol: b as char,
                        position,
                    })
                }
            }
        }
        Ok(Sequence {
            codes,
            sigma: self.size(),
        })
    }

    /// Encode a byte string, mapping symbols outside the alphabet to
    /// `fallback` (which must itself be in the alphabet).
    pub fn encode_mapping_unknown(&self, text: &[u8], fallback: u8) -> Result<Sequence> {
        let fallback_code = self.code_of(fallback).ok_or(Error::UnknownSymbol {
            symbol: fallback as char,
            position: 0,
        })?;
        let codes = text
            .iter()
            .map(|&b| self.code_of(b).unwrap_or(fallback_code))
            .collect();
        Ok(Sequence {
            codes,
            sigma: self.size(),
        })
    }

    pub fn decode(&self, seq: &Sequence) -> Vec<u8> {
        seq.codes
            .iter()
            .map(|&c| self.symbol_of(c).unwrap_or(b'?'))
            .collect()
    }
}

/// An encoded string over a small alphabet: codes in `{1..sigma}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    codes: Vec<u16>,
    sigma: u16,
}

impl Sequence {
    pub fn from_codes(codes: Vec<u16>, sigma: u16) -> Result<Self> {
        if sigma < 2 {
            return Err(Error::AlphabetSize(sigma as usize));
        }
        for &c in &codes {
            if c == 0 || c > sigma {
                return Err(Error::CodeOutOfRange { code: c, sigma });
            }
        }
        Ok(Sequence { codes, sigma })
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn sigma(&self) -> u16 {
        self.sigma
    }

    pub fn codes(&self) -> &[u16] {
        &self.codes
    }

    /// The window `[start, start + length)` as a code slice.
    pub fn window(&self, start: usize, length: usize) -> Result<&[u16]> {
        if start + length > self.codes.len() {
            return Err(Error::WindowOutOfBounds {
                start,
                length,
                seq_len: self.codes.len(),
            });
        }
        Ok(&self.codes[start..start + length])
    }
}

/// Which input string a window refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Source {
    X,
    Y,
}

/// A length-`length` window of one of the two input strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub source: Source,
    pub start: usize,
    pub length: usize,
}

impl Window {
    pub fn validate(&self, seq: &Sequence) -> Result<()> {
        if self.start + self.length > seq.len() {
            return Err(Error::WindowOutOfBounds {
                start: self.start,
                length: self.length,
                seq_len: seq.len(),
            });
        }
        Ok(())
    }
}

/// Number of positions where `u` and `v` differ.
pub fn hamming_distance(u: &[u16], v: &[u16]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}

/// Result of a capped Hamming-distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CappedDistance {
    Within(usize),
    ExceedsCap,
}

impl CappedDistance {
    pub fn is_within(&self) -> bool {
        matches!(self, CappedDistance::Within(_))
    }
}

/// Hamming distance with early exit: returns the exact distance when it is
/// at most `cap`, and `ExceedsCap` otherwise. Used for witness verification.
pub fn hamming_distance_capped(u: &[u16], v: &[u16], cap: usize) -> Result<CappedDistance> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let mut d = 0usize;
    for (a, b) in u.iter().zip(v) {
        if a != b {
            d += 1;
            if d > cap {
                return Ok(CappedDistance::ExceedsCap);
            }
        }
    }
    Ok(CappedDistance::Within(d))
}

/// A packed bit vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn set(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// popcount of the XOR of two equal-length bit vectors.
    pub fn xor_popcount(&self, other: &BitVector) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }
}

/// One-hot expansion: each code `a` becomes the block `0^(a-1) 1 0^(sigma-a)`,
/// so the expansion of a length-`n` string has `sigma * n` bits and the
/// Hamming distance of two expansions is exactly twice the Hamming distance
/// of the original strings.
pub fn mu_expand(codes: &[u16], sigma: u16) -> Result<BitVector> {
    let mut bits = BitVector::zeros(sigma as usize * codes.len());
    for (p, &c) in codes.iter().enumerate() {
        if c == 0 || c > sigma {
            return Err(Error::CodeOutOfRange { code: c, sigma });
        }
        bits.set(sigma as usize * p + (c as usize - 1));
    }
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(s: &str) -> Sequence {
        Alphabet::dna().encode(s.as_bytes()).unwrap()
    }

    #[test]
    fn hamming_basic() {
        assert_eq!(
            hamming_distance(seq("ACGT").codes(), seq("ACGT").codes()).unwrap(),
            0
        );
        assert_eq!(
            hamming_distance(seq("ACGT").codes(), seq("AGGT").codes()).unwrap(),
            1
        );
        assert_eq!(
            hamming_distance(seq("AAAA").codes(), seq("CCCC").codes()).unwrap(),
            4
        );
        assert!(hamming_distance(seq("AC").codes(), seq("ACG").codes()).is_err());
    }

    #[test]
    fn hamming_capped_basic() {
        assert_eq!(
            hamming_distance_capped(seq("ACGT").codes(), seq("AGGT").codes(), 1).unwrap(),
            CappedDistance::Within(1)
        );
        assert_eq!(
            hamming_distance_capped(seq("AAAA").codes(), seq("CCCC").codes(), 2).unwrap(),
            CappedDistance::ExceedsCap
        );
        assert_eq!(
            hamming_distance_capped(seq("AAAA").codes(), seq("AAAA").codes(), 0).unwrap(),
            CappedDistance::Within(0)
        );
    }

    #[test]
    fn mu_expand_definition() {
        // code 1 over sigma=4 -> 1000
        let bits = mu_expand(&[1], 4).unwrap();
        assert_eq!(
            (0..4).map(|i| bits.get(i) as u8).collect::<Vec<_>>(),
            vec![1, 0, 0, 0]
        );
        // "12" over sigma=2 -> 1001
        let bits = mu_expand(&[1, 2], 2).unwrap();
        assert_eq!(
            (0..4).map(|i| bits.get(i) as u8).collect::<Vec<_>>(),
            vec![1, 0, 0, 1]
        );
    }

    #[test]
    fn alphabet_roundtrip_and_unknowns() {
        let a = Alphabet::dna();
        assert_eq!(a.size(), 4);
        let s = a.encode(b"ACGT").unwrap();
        assert_eq!(s.codes(), &[1, 2, 3, 4]);
        assert_eq!(a.decode(&s), b"ACGT".to_vec());

        assert_eq!(
            a.encode(b"ACNT"),
            Err(Error::UnknownSymbol {
                symbol: 'N',
                position: 2
            })
        );
        let mapped = a.encode_mapping_unknown(b"ACNT", b'A').unwrap();
        assert_eq!(mapped.codes(), &[1, 2, 1, 4]);
    }

    #[test]
    fn alphabet_size_limits() {
        assert!(Alphabet::new(b"A").is_err());
        assert!(Alphabet::new(b"AA").is_err());
        assert!(Alphabet::latin(26).is_ok());
        assert!(Alphabet::latin(27).is_err());
        let all: Vec<u8> = (0..=255).collect();
        assert_eq!(Alphabet::new(&all).unwrap().size() as usize, 256);
    }

    #[test]
    fn sequence_window_bounds() {
        let s = seq("ACGT");
        assert_eq!(s.window(1, 3).unwrap(), &[2, 3, 4]);
        assert!(s.window(2, 3).is_err());
        let w = Window {
            source: Source::X,
            start: 2,
            length: 3,
        };
        assert!(w.validate(&s).is_err());
    }

    proptest! {
        #[test]
        fn hamming_is_a_metric(
            u in proptest::collection::vec(1u16..=4, 1..64),
            v in proptest::collection::vec(1u16..=4, 1..64),
            w in proptest::collection::vec(1u16..=4, 1..64),
        ) {
            let n = u.len().min(v.len()).min(w.len());
            let (u, v, w) = (&u[..n], &v[..n], &w[..n]);
            let duv = hamming_distance(u, v).unwrap();
            let dvu = hamming_distance(v, u).unwrap();
            prop_assert_eq!(duv, dvu);
            prop_assert_eq!(hamming_distance(u, u).unwrap(), 0);
            prop_assert_eq!(duv == 0, u == v);
            let duw = hamming_distance(u, w).unwrap();
            let dwv = hamming_distance(w, v).unwrap();
            prop_assert!(duv <= duw + dwv);
        }

        #[test]
        fn mu_doubles_hamming(
            pairs in proptest::collection::vec((1u16..=6, 1u16..=6), 0..64),
        ) {
            let u: Vec<u16> = pairs.iter().map(|p| p.0).collect();
            let v: Vec<u16> = pairs.iter().map(|p| p.1).collect();
            let bu = mu_expand(&u, 6).unwrap();
            let bv = mu_expand(&v, 6).unwrap();
            prop_assert_eq!(
                bu.xor_popcount(&bv).unwrap(),
                2 * hamming_distance(&u, &v).unwrap()
            );
        }

        #[test]
        fn capped_agrees_with_exact(
            pairs in proptest::collection::vec((1u16..=4, 1u16..=4), 0..64),
            cap in 0usize..80,
        ) {
            let u: Vec<u16> = pairs.iter().map(|p| p.0).collect();
            let v: Vec<u16> = pairs.iter().map(|p| p.1).collect();
            let exact = hamming_distance(&u, &v).unwrap();
            match hamming_distance_capped(&u, &v, cap).unwrap() {
                CappedDistance::Within(d) => {
                    prop_assert_eq!(d, exact);
                    prop_assert!(d <= cap);
                }
                CappedDistance::ExceedsCap => prop_assert!(exact > cap),
            }
        }
    }
}
