//! Polynomial-walk hash: blocks of input bits choose which permutation
//! system moves the state, and the final state is the digest.
//!
//! Blocks are read most-significant bit first, input is padded with zeros
//! on the left, and digests are serialized as fixed-width big-endian fields.
//! Padding is not length-strengthened, so `"1"` and `"01"` collide for `r = 2`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::field::Prime;
use crate::system::{Schedule, SystemFamily, TriangularSystem};
use crate::{Error, Result};

/// Largest supported block width; `2^r` members must be stored.
pub const MAX_BLOCK_BITS: u32 = 20;

/// A string of bits, first element first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(pub Vec<bool>);

impl BitString {
    pub fn parse_bits(text: &str) -> Result<Self> {
        text.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Bits(alloc::format!("unexpected {c:?} at position {i}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }

    /// Hex digits expanded to four bits each, most significant first. A `0x`
    /// prefix is optional.
    pub fn parse_hex(text: &str) -> Result<Self> {
        let digits = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")).unwrap_or(text);
        let offset = text.len() - digits.len();
        let mut bits = Vec::with_capacity(4 * digits.len());
        for (i, c) in digits.chars().enumerate() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::Bits(alloc::format!("unexpected {c:?} at position {}", i + offset)))?;
            bits.extend((0..4).rev().map(|b| v >> b & 1 == 1));
        }
        Ok(BitString(bits))
    }

    /// `0x` followed by hex digits; zeros are prepended to reach a multiple of four bits.
    pub fn to_hex(&self) -> String {
        let pad = (4 - self.0.len() % 4) % 4;
        let mut out = String::from("0x");
        let padded: Vec<bool> = core::iter::repeat_n(false, pad).chain(self.0.iter().copied()).collect();
        for nib in padded.chunks(4) {
            let v = nib.iter().fold(0u32, |a, &b| a << 1 | b as u32);
            out.push(char::from_digit(v, 16).expect("nibble"));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

fn check_block_bits(r: u32) -> Result<()> {
    if r == 0 || r > MAX_BLOCK_BITS {
        return Err(Error::InvalidArgument(alloc::format!(
            "block width must be in 1..={MAX_BLOCK_BITS}, got {r}"
        )));
    }
    Ok(())
}

/// Prepends at most `r - 1` zeros so the length is a multiple of `r`.
pub fn pad(input: &BitString, r: u32) -> Result<BitString> {
    check_block_bits(r)?;
    if input.is_empty() {
        return Err(Error::Bits("empty input has no blocks".into()));
    }
    let r = r as usize;
    let extra = (r - input.len() % r) % r;
    let mut bits = Vec::with_capacity(input.len() + extra);
    bits.resize(extra, false);
    bits.extend_from_slice(&input.0);
    Ok(BitString(bits))
}

/// Block indices of a padded string, each block read most-significant bit first.
pub fn split(padded: &BitString, r: u32) -> Result<Vec<usize>> {
    check_block_bits(r)?;
    if !padded.len().is_multiple_of(r as usize) {
        return Err(Error::Bits(alloc::format!(
            "length {} is not a multiple of {r}",
            padded.len()
        )));
    }
    Ok(padded
        .0
        .chunks(r as usize)
        .map(|blk| blk.iter().fold(0usize, |a, &b| a << 1 | b as usize))
        .collect())
}

/// `w` as `n`-bit big-endian fields in coordinate order.
pub fn serialize(w: &[u64], n: u32) -> Result<BitString> {
    let mut bits = Vec::with_capacity(w.len() * n as usize);
    for &x in w {
        if n < 64 && x >> n != 0 {
            return Err(Error::Bits(alloc::format!("{x} does not fit in {n} bits")));
        }
        bits.extend((0..n).rev().map(|b| b < 64 && x >> b & 1 == 1));
    }
    Ok(BitString(bits))
}

pub fn deserialize(bits: &BitString, n: u32) -> Result<Vec<u64>> {
    if n == 0 || n > 64 || !bits.len().is_multiple_of(n as usize) {
        return Err(Error::Bits(alloc::format!(
            "length {} is not a multiple of width {n}",
            bits.len()
        )));
    }
    Ok(bits
        .0
        .chunks(n as usize)
        .map(|c| c.iter().fold(0u64, |a, &b| a << 1 | b as u64))
        .collect())
}

/// Final state of the walk and its serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Digest {
    pub coords: Vec<u64>,
    pub bits: BitString,
}

/// Members indexed by block value, block width and starting vector.
#[derive(Debug, Clone)]
pub struct HashParams {
    family: SystemFamily,
    r: u32,
    w0: Vec<u64>,
}

impl HashParams {
    /// Checks that there are exactly `2^r` valid members sharing shape and
    /// modulus, each a permutation (checked exhaustively up to `guard` points),
    /// and that `w0` lies in `F_p^{m+1}`.
    pub fn new(members: Vec<TriangularSystem>, r: u32, w0: Vec<u64>, guard: u128) -> Result<Self> {
        check_block_bits(r)?;
        if members.len() != 1usize << r {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} members given, 2^{r} = {} required",
                members.len(),
                1usize << r
            )));
        }
        let family = SystemFamily::new(members, Schedule::Cyclic)?;
        for (i, sys) in family.members().iter().enumerate() {
            if !sys.is_permutation(guard)?.bijective {
                return Err(Error::InvalidSystem(alloc::format!("member {i} is not a permutation")));
            }
        }
        if w0.len() != family.arity() {
            return Err(Error::ArityMismatch {
                expected: family.arity(),
                got: w0.len(),
            });
        }
        let p = family.modulus().get();
        if let Some(&x) = w0.iter().find(|&&x| x >= p) {
            return Err(Error::InvalidArgument(alloc::format!("w0 entry {x} is not reduced mod {p}")));
        }
        Ok(HashParams { family, r, w0 })
    }

    pub fn members(&self) -> &[TriangularSystem] {
        self.family.members()
    }

    pub fn block_bits(&self) -> u32 {
        self.r
    }

    pub fn w0(&self) -> &[u64] {
        &self.w0
    }

    pub fn modulus(&self) -> Prime {
        self.family.modulus()
    }

    /// Bits per serialized coordinate: the bit length of `p`.
    pub fn coord_bits(&self) -> u32 {
        self.modulus().bit_len()
    }

    /// The members as a family stepping through `blocks`.
    pub fn schedule_for(&self, blocks: Vec<usize>) -> Result<SystemFamily> {
        self.family.with_schedule(Schedule::Explicit(blocks))
    }

    /// Walk from `start` instead of `w0`.
    pub fn hash_from(&self, start: &[u64], input: &BitString) -> Result<Digest> {
        let blocks = split(&pad(input, self.r)?, self.r)?;
        let mut w = start.to_vec();
        let mut next = w.clone();
        for &l in &blocks {
            self.family.members()[l].apply_into(&w, &mut next);
            core::mem::swap(&mut w, &mut next);
        }
        let bits = serialize(&w, self.coord_bits())?;
        Ok(Digest { coords: w, bits })
    }
}

pub fn hash(params: &HashParams, input: &BitString) -> Result<Digest> {
    params.hash_from(&params.w0, input)
}
