//! Exact verification that a cyclic string is a De Bruijn covering code.
//!
//! Every window with a defined class marks its whole radius-`R` ball in a
//! bitmap indexed by class rank. The metrics are symmetric, so "some chosen
//! root's ball contains `x`" is the same as "`x` lies in the ball enumerated
//! around that root". Marking is an idempotent `fetch_or`, so windows can be
//! split across rayon workers without affecting the result.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spaces::{BallEnumerator, Class, Limits, Space, SpaceKind};
use crate::windows::{CyclicString, Values};

/// Windows handled per parallel task.
const CHUNK: usize = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub space: Space,
    #[serde(rename = "M")]
    pub length: usize,
    pub covered_count: u64,
    /// Uncovered class ranks, ascending; truncated to the requested limit.
    pub uncovered: Vec<u64>,
    pub uncovered_total: u64,
    pub is_covering: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    pub limits: Limits,
    /// Keep at most this many uncovered ranks in the report.
    pub max_listed: Option<usize>,
}


/// Shared bitmap of covered class ranks.
pub struct CoverageMap {
    words: Vec<AtomicU64>,
    classes: u64,
}

impl CoverageMap {
    pub fn new(classes: u64) -> Self {
        let words = (0..classes.div_ceil(64)).map(|_| AtomicU64::new(0)).collect();
        Self { words, classes }
    }

    #[inline]
    pub fn mark(&self, rank: u64) {
        self.words[(rank / 64) as usize].fetch_or(1 << (rank % 64), Ordering::Relaxed);
    }

    pub fn is_marked(&self, rank: u64) -> bool {
        self.words[(rank / 64) as usize].load(Ordering::Relaxed) & (1 << (rank % 64)) != 0
    }

    pub fn count(&self) -> u64 {
        self.words
            .iter()
            .map(|w| w.load(Ordering::Relaxed).count_ones() as u64)
            .sum()
    }

    /// Unmarked ranks in ascending order.
    pub fn unmarked(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.classes).filter(|&r| !self.is_marked(r))
    }
}

/// Marks the ball of every window of `string` (windows split across the
/// current rayon pool).
pub fn mark_windows(
    string: &CyclicString,
    balls: &BallEnumerator,
    map: &CoverageMap,
) -> Result<()> {
    let space = *balls.space();
    let m = string.len();
    // fail early on payload mismatch
    string.window_ranks_in(&space, 0..0)?;
    (0..m.div_ceil(CHUNK)).into_par_iter().for_each(|chunk| {
        let range = chunk * CHUNK..((chunk + 1) * CHUNK).min(m);
        let ranks = string
            .window_ranks_in(&space, range)
            .expect("checked above");
        for rank in ranks.flatten() {
            balls.for_each_in_ball(rank, |r| map.mark(r));
        }
    });
    Ok(())
}

pub fn verify(string: &CyclicString, space: &Space, options: &VerifyOptions) -> Result<CoverageReport> {
    string.check_space(space)?;
    let classes = space.checked_class_count(&options.limits)?;
    let balls = BallEnumerator::new(*space, &options.limits)?;
    let map = CoverageMap::new(classes);
    mark_windows(string, &balls, &map)?;

    let covered_count = map.count();
    let uncovered_total = classes - covered_count;
    let listed = options.max_listed.unwrap_or(usize::MAX);
    let uncovered: Vec<u64> = map.unmarked().take(listed).collect();
    Ok(CoverageReport {
        space: *space,
        length: string.len(),
        covered_count,
        uncovered,
        uncovered_total,
        is_covering: uncovered_total == 0,
    })
}

/// Ranks of all classes no window ball reaches, ascending.
pub fn uncovered_ranks(string: &CyclicString, space: &Space, limits: &Limits) -> Result<Vec<u64>> {
    let options = VerifyOptions {
        limits: *limits,
        max_listed: None,
    };
    Ok(verify(string, space, &options)?.uncovered)
}

pub fn uncovered(string: &CyclicString, space: &Space, limits: &Limits) -> Result<Vec<Class>> {
    uncovered_ranks(string, space, limits)?
        .into_iter()
        .map(|r| space.unrank_class(r))
        .collect()
}

/// Convenience: the word of a Hamming class or the one-line notation of a
/// permutation class, in the payload type a string over `space` uses.
pub(crate) fn class_values(space: &Space, class: &Class) -> Values {
    match (space.kind, class) {
        (SpaceKind::Hamming { q }, Class::Word(w)) => Values::Symbols {
            q,
            data: w.symbols().to_vec(),
        },
        (_, Class::Permutation(p)) => {
            Values::Integers(p.image().iter().map(|&v| v as i64).collect())
        }
        _ => unreachable!("class checked against space"),
    }
}
