use std::fmt;

use crate::error::{Error, Result};

/// A length-`n` word over the alphabet `{0..q-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HammingWord {
    q: u32,
    symbols: Vec<u32>,
}

impl HammingWord {
    pub fn new(q: u32, symbols: Vec<u32>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("alphabet size q must be >= 1".into()));
        }
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("word of length 0".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= q) {
            return Err(Error::InvalidArgument(format!("symbol {s} not below q = {q}")));
        }
        Ok(Self { q, symbols })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Base-`q` positional index, first symbol most significant.
    pub fn rank(&self) -> Result<u64> {
        positional_rank(self.q, &self.symbols).ok_or(Error::Overflow("hamming word index"))
    }

    pub fn unrank(rank: u64, q: u32, n: usize) -> Result<Self> {
        if q == 0 || n == 0 {
            return Err(Error::InvalidArgument("need q >= 1 and n >= 1".into()));
        }
        let total = (q as u64)
            .checked_pow(n as u32)
            .ok_or(Error::Overflow("hamming class count"))?;
        if rank >= total {
            return Err(Error::OutOfRange {
                index: rank,
                limit: total,
            });
        }
        let mut symbols = vec![0u32; n];
        positional_unrank(rank, q, &mut symbols);
        Ok(Self { q, symbols })
    }
}

pub(crate) fn positional_rank(q: u32, symbols: &[u32]) -> Option<u64> {
    symbols.iter().try_fold(0u64, |acc, &s| {
        acc.checked_mul(q as u64)?.checked_add(s as u64)
    })
}

pub(crate) fn positional_unrank(mut rank: u64, q: u32, out: &mut [u32]) {
    for slot in out.iter_mut().rev() {
        *slot = (rank % q as u64) as u32;
        rank /= q as u64;
    }
}

pub fn hamming_distance(u: &HammingWord, v: &HammingWord) -> Result<usize> {
    if u.n() != v.n() || u.q != v.q {
        return Err(Error::Dimension(format!(
            "words over (q={}, n={}) and (q={}, n={})",
            u.q,
            u.n(),
            v.q,
            v.n()
        )));
    }
    Ok(u
        .symbols
        .iter()
        .zip(&v.symbols)
        .filter(|(a, b)| a != b)
        .count())
}

impl fmt::Display for HammingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::windows::format_symbols(self.q, &self.symbols))
    }
}
