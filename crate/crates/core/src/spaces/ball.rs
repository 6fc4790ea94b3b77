//! Exact enumeration of radius-`R` balls by rank.
//!
//! Both spaces are transitive, so a ball is a fixed "unit ball" of offsets
//! translated to its center:
//!
//! * Hamming: error patterns of weight at most `R`, applied symbol-wise mod `q`.
//! * Permutations: every `σ` with at least `n − R` cycles; the ball around `c`
//!   is `{c ∘ σ}`, because `c ∘ σ⁻¹ ∘ c⁻¹` has the cycle type of `σ`.
//!
//! The permutation offsets come from the factorization `σ = τ₂ τ₃ ⋯ τₙ` where
//! each `τₖ` is the identity or a transposition `(a k)` with `a < k`. Every
//! permutation has exactly one such factorization and its Cayley weight is the
//! number of non-identity factors, so the offsets are produced without
//! duplicates.

use super::{lehmer_rank, lehmer_unrank, positional_unrank, Limits, Space, SpaceKind, MAX_RANKABLE_N};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct BallEnumerator {
    space: Space,
    ball_size: usize,
    offsets: Offsets,
}

#[derive(Clone, Debug)]
enum Offsets {
    Hamming {
        q: u32,
        /// Place value of each position, `q^(n-1-pos)`.
        weights: Vec<u64>,
        /// Flattened `(position, delta)` lists; `starts[i]..starts[i+1]` is pattern `i`.
        changes: Vec<(u32, u32)>,
        starts: Vec<usize>,
    },
    Permutation {
        /// Zero-based one-line images, `n` entries per offset.
        images: Vec<u8>,
    },
}

impl BallEnumerator {
    pub fn new(space: Space, limits: &Limits) -> Result<Self> {
        let k = space.ball_size()?;
        if k > limits.max_ball {
            return Err(Error::ResourceLimit {
                what: "ball size",
                requested: k,
                cap: limits.max_ball,
            });
        }
        // ranks must fit in u64
        if u64::try_from(space.class_count()?).is_err()
            || (space.is_permutation() && space.n > MAX_RANKABLE_N)
        {
            return Err(Error::Overflow("class rank"));
        }
        let n = space.n;
        let offsets = match space.kind {
            SpaceKind::Hamming { q } => {
                let weights = (0..n)
                    .map(|pos| (q as u64).pow((n - 1 - pos) as u32))
                    .collect();
                let mut changes = Vec::new();
                let mut starts = vec![0];
                let mut current = Vec::new();
                hamming_patterns(q, n, space.radius, 0, &mut current, &mut |pattern| {
                    changes.extend_from_slice(pattern);
                    starts.push(changes.len());
                });
                Offsets::Hamming {
                    q,
                    weights,
                    changes,
                    starts,
                }
            }
            SpaceKind::Permutation => {
                let mut images = Vec::with_capacity(k as usize * n);
                let mut sigma: Vec<u8> = (0..n as u8).collect();
                cayley_offsets(&mut sigma, 1, space.radius, &mut images);
                Offsets::Permutation { images }
            }
        };
        let enumerator = Self {
            space,
            ball_size: k as usize,
            offsets,
        };
        debug_assert_eq!(enumerator.offset_count(), enumerator.ball_size);
        Ok(enumerator)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn ball_size(&self) -> usize {
        self.ball_size
    }

    fn offset_count(&self) -> usize {
        match &self.offsets {
            Offsets::Hamming { starts, .. } => starts.len() - 1,
            Offsets::Permutation { images } => images.len() / self.space.n.max(1),
        }
    }

    /// Calls `f` with the rank of every class in the ball around `center`.
    /// Order follows the offset table, not rank order.
    pub fn for_each_in_ball(&self, center: u64, mut f: impl FnMut(u64)) {
        match &self.offsets {
            Offsets::Hamming { q, .. } => {
                let mut symbols = vec![0u32; self.space.n];
                positional_unrank(center, *q, &mut symbols);
                self.hamming_ball(center, &symbols, &mut f);
            }
            Offsets::Permutation { .. } => {
                let mut c = vec![0u8; self.space.n];
                lehmer_unrank(center, &mut c);
                self.permutation_ball(&c, &mut f);
            }
        }
    }

    /// Ball around a word given by its symbols (no validation).
    pub(crate) fn hamming_ball(&self, center: u64, symbols: &[u32], f: &mut impl FnMut(u64)) {
        let Offsets::Hamming {
            q,
            weights,
            changes,
            starts,
        } = &self.offsets
        else {
            unreachable!("hamming ball on permutation space")
        };
        for w in starts.windows(2) {
            let mut rank = center;
            for &(pos, delta) in &changes[w[0]..w[1]] {
                let pos = pos as usize;
                let old = symbols[pos];
                let new = (old + delta) % q;
                rank = rank
                    .wrapping_sub(old as u64 * weights[pos])
                    .wrapping_add(new as u64 * weights[pos]);
            }
            f(rank);
        }
    }

    /// Ball around a zero-based permutation (no validation).
    pub(crate) fn permutation_ball(&self, center: &[u8], f: &mut impl FnMut(u64)) {
        let Offsets::Permutation { images } = &self.offsets else {
            unreachable!("permutation ball on hamming space")
        };
        let n = self.space.n;
        let mut y = vec![0u8; n];
        for sigma in images.chunks_exact(n) {
            for (slot, &s) in y.iter_mut().zip(sigma) {
                *slot = center[s as usize];
            }
            f(lehmer_rank(&y));
        }
    }

    /// Distance between two classes given by rank.
    pub fn distance(&self, a: u64, b: u64) -> usize {
        let n = self.space.n;
        match self.space.kind {
            SpaceKind::Hamming { q } => {
                let mut x = vec![0u32; n];
                let mut y = vec![0u32; n];
                positional_unrank(a, q, &mut x);
                positional_unrank(b, q, &mut y);
                x.iter().zip(&y).filter(|(s, t)| s != t).count()
            }
            SpaceKind::Permutation => {
                let mut x = vec![0u8; n];
                let mut y = vec![0u8; n];
                lehmer_unrank(a, &mut x);
                lehmer_unrank(b, &mut y);
                perm_distance(&x, &inverse(&y))
            }
        }
    }

    /// `|ball(a) ∩ ball(b)|`.
    pub fn intersection_size(&self, a: u64, b: u64) -> u64 {
        let n = self.space.n;
        let radius = self.space.radius;
        if self.distance(a, b) > 2 * radius {
            return 0;
        }
        let mut count = 0u64;
        match self.space.kind {
            SpaceKind::Hamming { q } => {
                let mut x = vec![0u32; n];
                let mut other = vec![0u32; n];
                let mut y = vec![0u32; n];
                positional_unrank(a, q, &mut x);
                positional_unrank(b, q, &mut other);
                self.hamming_ball(a, &x, &mut |r| {
                    positional_unrank(r, q, &mut y);
                    if y.iter().zip(&other).filter(|(s, t)| s != t).count() <= radius {
                        count += 1;
                    }
                });
            }
            SpaceKind::Permutation => {
                let mut x = vec![0u8; n];
                let mut other = vec![0u8; n];
                let mut y = vec![0u8; n];
                lehmer_unrank(a, &mut x);
                lehmer_unrank(b, &mut other);
                let other_inv = inverse(&other);
                self.permutation_ball(&x, &mut |r| {
                    lehmer_unrank(r, &mut y);
                    if perm_distance(&y, &other_inv) <= radius {
                        count += 1;
                    }
                });
            }
        }
        count
    }
}

fn inverse(p: &[u8]) -> Vec<u8> {
    let mut inv = vec![0u8; p.len()];
    for (i, &v) in p.iter().enumerate() {
        inv[v as usize] = i as u8;
    }
    inv
}

/// `n − cycles(x ∘ y_inv)` for zero-based permutations.
fn perm_distance(x: &[u8], y_inv: &[u8]) -> usize {
    let n = x.len();
    let mut seen = [false; MAX_RANKABLE_N];
    let mut cycles = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = x[y_inv[j] as usize] as usize;
        }
    }
    n - cycles
}

fn hamming_patterns(
    q: u32,
    n: usize,
    budget: usize,
    from: usize,
    current: &mut Vec<(u32, u32)>,
    emit: &mut impl FnMut(&[(u32, u32)]),
) {
    emit(current);
    if budget == 0 {
        return;
    }
    for pos in from..n {
        for delta in 1..q {
            current.push((pos as u32, delta));
            hamming_patterns(q, n, budget - 1, pos + 1, current, emit);
            current.pop();
        }
    }
}

/// Emits `τ_k ⋯ τ_n` products on top of `sigma` for positions `k..n`.
fn cayley_offsets(sigma: &mut Vec<u8>, k: usize, budget: usize, out: &mut Vec<u8>) {
    let n = sigma.len();
    if k >= n {
        out.extend_from_slice(sigma);
        return;
    }
    cayley_offsets(sigma, k + 1, budget, out);
    if budget > 0 {
        for a in 0..k {
            // right-multiplying by (a k) swaps the images at positions a and k
            sigma.swap(a, k);
            cayley_offsets(sigma, k + 1, budget - 1, out);
            sigma.swap(a, k);
        }
    }
}
