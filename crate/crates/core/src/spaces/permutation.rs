//! Permutations in one-line notation over `{1..n}`.
//!
//! A permutation doubles as an order-type label: the order type of a tuple of
//! distinct reals is the permutation that sends each position to the rank of
//! its value within the tuple (smallest value gets rank 1).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest `n` for which `n!` (and therefore every Lehmer rank) fits in a `u64`.
pub const MAX_RANKABLE_N: usize = 20;

/// `n!` for `n <= 20`.
pub fn factorial_u64(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation from its one-line notation (values `1..=n`).
    pub fn new(image: Vec<u32>) -> Result<Self> {
        if image.is_empty() {
            return Err(Error::InvalidArgument("permutation of length 0".into()));
        }
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            let v = v as usize;
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidArgument(format!(
                    "{image:?} is not a permutation of 1..={n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Self { image })
    }

    pub(crate) fn from_zero_based(image: &[u8]) -> Self {
        Self {
            image: image.iter().map(|&v| v as u32 + 1).collect(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (1..=n as u32).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        check_same_n(self, other)?;
        Ok(Permutation {
            image: other
                .image
                .iter()
                .map(|&x| self.image[x as usize - 1])
                .collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.n()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v as usize - 1] = i as u32 + 1;
        }
        Permutation { image: inv }
    }

    /// Number of cycles in the disjoint-cycle decomposition, fixed points included.
    pub fn cycle_count(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.image[j] as usize - 1;
            }
        }
        cycles
    }

    /// Lexicographic rank via the Lehmer code; the identity has rank 0.
    pub fn rank(&self) -> Result<u64> {
        if self.n() > MAX_RANKABLE_N {
            return Err(Error::Overflow("permutation rank"));
        }
        let zero: Vec<u8> = self.image.iter().map(|&v| (v - 1) as u8).collect();
        Ok(lehmer_rank(&zero))
    }

    pub fn unrank(rank: u64, n: usize) -> Result<Permutation> {
        if n == 0 {
            return Err(Error::InvalidArgument("permutation of length 0".into()));
        }
        if n > MAX_RANKABLE_N {
            return Err(Error::Overflow("permutation rank"));
        }
        let total = factorial_u64(n).expect("n <= 20");
        if rank >= total {
            return Err(Error::OutOfRange {
                index: rank,
                limit: total,
            });
        }
        let mut buf = vec![0u8; n];
        lehmer_unrank(rank, &mut buf);
        Ok(Permutation::from_zero_based(&buf))
    }
}

fn check_same_n(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Dimension(format!(
            "permutations of length {} and {}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// Minimal number of transpositions turning `a` into `b`: `n − cycles(a ∘ b⁻¹)`.
pub fn cayley_distance(a: &Permutation, b: &Permutation) -> Result<usize> {
    check_same_n(a, b)?;
    let quotient = a.compose(&b.inverse())?;
    Ok(a.n() - quotient.cycle_count())
}

/// Rank vector of `xs`: position `i` receives the 1-based rank of `xs[i]`.
/// Returns `None` when two entries compare equal (or are incomparable).
pub fn order_type<T: PartialOrd>(xs: &[T]) -> Option<Permutation> {
    if xs.is_empty() {
        return None;
    }
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    let mut incomparable = false;
    idx.sort_by(|&a, &b| {
        xs[a].partial_cmp(&xs[b]).unwrap_or_else(|| {
            incomparable = true;
            std::cmp::Ordering::Equal
        })
    });
    if incomparable {
        return None;
    }
    let mut image = vec![0u32; xs.len()];
    for (r, w) in idx.windows(2).enumerate() {
        if xs[w[0]].partial_cmp(&xs[w[1]]) != Some(std::cmp::Ordering::Less) {
            return None;
        }
        image[w[0]] = r as u32 + 1;
    }
    image[idx[xs.len() - 1]] = xs.len() as u32;
    Some(Permutation { image })
}

/// Lehmer rank of a zero-based permutation of length `<= 20`.
pub(crate) fn lehmer_rank(p: &[u8]) -> u64 {
    let n = p.len();
    let mut rank = 0u64;
    for i in 0..n {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count() as u64;
        rank = rank * (n - i) as u64 + smaller;
    }
    rank
}

pub(crate) fn lehmer_unrank(mut rank: u64, out: &mut [u8]) {
    let n = out.len();
    let mut digits = vec![0u8; n];
    for i in (0..n).rev() {
        let base = (n - i) as u64;
        digits[i] = (rank % base) as u8;
        rank /= base;
    }
    let mut avail: Vec<u8> = (0..n as u8).collect();
    for i in 0..n {
        out[i] = avail.remove(digits[i] as usize);
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for v in &self.image {
                write!(f, "{v}")?;
            }
        } else {
            for (i, v) in self.image.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts `"2341"` (single digits) or `"2,3,4,1"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let image = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("{s:?}: {e}")))?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("{s:?}"))))
                .collect::<Result<Vec<_>>>()?
        };
        Permutation::new(image)
    }
}
