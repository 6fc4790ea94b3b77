//! The two cover spaces: q-ary Hamming space and permutations (order types)
//! under the Cayley transposition metric.
//!
//! Classes are identified by their rank: the Lehmer (lexicographic) rank for
//! permutations and the base-`q` index, first symbol most significant, for
//! Hamming words. Ranks are the canonical serialization order everywhere.

mod ball;
mod counting;
mod hamming;
mod permutation;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ball::BallEnumerator;
pub use counting::{binomial, factorial, hamming_ball_size, permutation_ball_size, stirling_first};
pub use hamming::{hamming_distance, HammingWord};
pub use permutation::{cayley_distance, factorial_u64, order_type, Permutation, MAX_RANKABLE_N};

pub(crate) use hamming::{positional_rank, positional_unrank};
pub(crate) use permutation::{lehmer_rank, lehmer_unrank};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SpaceKind {
    Hamming { q: u32 },
    Permutation,
}

/// A cover space together with window length `n` and covering radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Space {
    #[serde(flatten)]
    pub kind: SpaceKind,
    pub n: usize,
    #[serde(rename = "R")]
    pub radius: usize,
}

impl Space {
    pub fn hamming(q: u32, n: usize, radius: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("alphabet size q must be >= 1".into()));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("window length n must be >= 1".into()));
        }
        Ok(Self {
            kind: SpaceKind::Hamming { q },
            n,
            radius,
        })
    }

    pub fn permutation(n: usize, radius: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("window length n must be >= 1".into()));
        }
        Ok(Self {
            kind: SpaceKind::Permutation,
            n,
            radius,
        })
    }

    pub fn with_radius(self, radius: usize) -> Self {
        Self { radius, ..self }
    }

    pub fn is_permutation(&self) -> bool {
        matches!(self.kind, SpaceKind::Permutation)
    }

    /// `|Π|`: `qⁿ` for Hamming space, `n!` for permutations.
    pub fn class_count(&self) -> Result<u128> {
        match self.kind {
            SpaceKind::Hamming { q } => (q as u128)
                .checked_pow(self.n as u32)
                .ok_or(Error::Overflow("hamming class count")),
            SpaceKind::Permutation => factorial(self.n),
        }
    }

    /// Exact size `K` of every radius-`R` ball.
    pub fn ball_size(&self) -> Result<u128> {
        match self.kind {
            SpaceKind::Hamming { q } => hamming_ball_size(q, self.n, self.radius),
            SpaceKind::Permutation => permutation_ball_size(self.n, self.radius),
        }
    }

    /// `|Π|` as a `u64`, after checking it against the enumeration caps.
    pub fn checked_class_count(&self, limits: &Limits) -> Result<u64> {
        let count = self.class_count()?;
        let (what, cap) = match self.kind {
            SpaceKind::Hamming { .. } => ("hamming class count", limits.max_hamming_classes),
            SpaceKind::Permutation => ("permutation class count", limits.max_permutation_classes),
        };
        if count > cap {
            return Err(Error::ResourceLimit {
                what,
                requested: count,
                cap,
            });
        }
        u64::try_from(count).map_err(|_| Error::Overflow("class count"))
    }

    pub fn distance(&self, a: &Class, b: &Class) -> Result<usize> {
        self.check_class(a)?;
        self.check_class(b)?;
        match (a, b) {
            (Class::Permutation(x), Class::Permutation(y)) => cayley_distance(x, y),
            (Class::Word(x), Class::Word(y)) => hamming_distance(x, y),
            _ => unreachable!("checked above"),
        }
    }

    pub fn check_class(&self, class: &Class) -> Result<()> {
        let ok = match (self.kind, class) {
            (SpaceKind::Permutation, Class::Permutation(p)) => p.n() == self.n,
            (SpaceKind::Hamming { q }, Class::Word(w)) => w.n() == self.n && w.q() == q,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension(format!("class {class} does not belong to {self}")))
        }
    }

    pub fn rank_class(&self, class: &Class) -> Result<u64> {
        self.check_class(class)?;
        match class {
            Class::Permutation(p) => p.rank(),
            Class::Word(w) => w.rank(),
        }
    }

    pub fn unrank_class(&self, rank: u64) -> Result<Class> {
        match self.kind {
            SpaceKind::Hamming { q } => HammingWord::unrank(rank, q, self.n).map(Class::Word),
            SpaceKind::Permutation => Permutation::unrank(rank, self.n).map(Class::Permutation),
        }
    }

    /// Every class at distance at most `R` from `center`, ascending by rank.
    pub fn ball_enumerate(&self, center: &Class, limits: &Limits) -> Result<Vec<Class>> {
        let balls = BallEnumerator::new(*self, limits)?;
        let mut ranks = Vec::with_capacity(balls.ball_size());
        balls.for_each_in_ball(self.rank_class(center)?, |r| ranks.push(r));
        ranks.sort_unstable();
        ranks.into_iter().map(|r| self.unrank_class(r)).collect()
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SpaceKind::Hamming { q } => write!(f, "hamming(q={q}, n={}, R={})", self.n, self.radius),
            SpaceKind::Permutation => write!(f, "permutation(n={}, R={})", self.n, self.radius),
        }
    }
}

/// An element of `Π`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Permutation(Permutation),
    Word(HammingWord),
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::Permutation(p) => p.fmt(f),
            Class::Word(w) => w.fmt(f),
        }
    }
}

/// Enumeration caps. Exceeding one is reported as [`Error::ResourceLimit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_permutation_classes: u128,
    pub max_hamming_classes: u128,
    pub max_ball: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_permutation_classes: 3_628_800, // 10!
            max_hamming_classes: 1 << 26,
            max_ball: 1 << 26,
        }
    }
}

impl Limits {
    /// Raises every cap to the given number of classes.
    pub fn uniform(cap: u128) -> Self {
        Self {
            max_permutation_classes: cap,
            max_hamming_classes: cap,
            max_ball: cap,
        }
    }
}
