//! Length bounds, the window-overlap statistic `E(T_k)`, and the Janson
//! probability bound.
//!
//! `T_k` is `|ball(Π(Λ₁..Λₙ)) ∩ ball(Π(Λ_{k+1}..Λ_{k+n}))|` for a uniform
//! random string `Λ` of length `n + k`. It is estimated either by exhaustive
//! enumeration of all strings (all arrangements of `1..=n+k` in permutation
//! mode) or by seeded Monte Carlo sampling. Sample sums are kept as integers,
//! so the result does not depend on how batches are spread over workers.

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::rng_for;
use crate::error::{Error, Result};
use crate::spaces::{
    binomial, factorial, lehmer_rank, positional_rank, BallEnumerator, Limits, Space, SpaceKind,
};

/// Exhaustive mode is allowed up to this many strings `Λ`.
pub const EXHAUSTIVE_MAX: u128 = 1 << 20;

const BATCH: u64 = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub space: Space,
    #[serde(rename = "C")]
    pub c: f64,
    pub class_count: u128,
    #[serde(rename = "K")]
    pub ball_size: u128,
    /// `⌈|Π| / K⌉`: no covering string is shorter.
    pub lower: u128,
    /// `C·|Π|·ln n / K`.
    pub upper_target: f64,
    /// `qⁿ / C(n, R)` or `n! / n^{2R}`.
    pub asymptotic_lower: f64,
    /// The same times `ln n`.
    pub asymptotic_upper: f64,
}

pub fn bounds(space: &Space, c: f64) -> Result<BoundsReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {c}")));
    }
    let classes = space.class_count()?;
    let k = space.ball_size()?;
    let ln_n = (space.n as f64).ln();
    let asymptotic_lower = match space.kind {
        SpaceKind::Hamming { .. } => classes as f64 / binomial(space.n, space.radius)? as f64,
        SpaceKind::Permutation => classes as f64 / (space.n as f64).powi(2 * space.radius as i32),
    };
    Ok(BoundsReport {
        space: *space,
        c,
        class_count: classes,
        ball_size: k,
        lower: classes.div_ceil(k),
        upper_target: c * classes as f64 * ln_n / k as f64,
        asymptotic_lower,
        asymptotic_upper: asymptotic_lower * ln_n,
    })
}

/// `n^{2R} / (2^R · R!)`, the leading term of the permutation ball size.
pub fn cayley_ball_asymptotic(n: usize, radius: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    let mut value = 1.0f64;
    for j in 1..=radius {
        value *= (n as f64).powi(2) / (2.0 * j as f64);
    }
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow("cayley ball asymptotic"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Sampling {
    Exhaustive,
    MonteCarlo { samples: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapEstimate {
    pub k: usize,
    pub samples: u64,
    pub exact: bool,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapStats {
    pub space: Space,
    #[serde(rename = "K")]
    pub ball_size: u64,
    pub per_k: Vec<OverlapEstimate>,
    pub sum_estimate: f64,
    pub sum_std_error: f64,
    pub hypothesis_ratio: f64,
}

/// Integer accumulator of `T` and `T²`.
#[derive(Clone, Copy, Default)]
struct Moments {
    count: u64,
    sum: u128,
    sum_sq: u128,
}

impl Moments {
    fn add(&mut self, t: u64, times: u64) {
        self.count += times;
        self.sum += t as u128 * times as u128;
        self.sum_sq += (t as u128 * t as u128) * times as u128;
    }

    fn merge(mut self, other: Moments) -> Moments {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        let var = ((self.sum_sq as f64) - n * mean * mean).max(0.0) / (n - 1.0);
        (var / n).sqrt()
    }
}

/// Window class ranks at offsets `0` and `k` of `lambda`.
fn window_pair(space: &Space, lambda: &[u32], k: usize) -> (u64, u64) {
    let n = space.n;
    match space.kind {
        SpaceKind::Hamming { q } => (
            positional_rank(q, &lambda[..n]).expect("rankable"),
            positional_rank(q, &lambda[k..k + n]).expect("rankable"),
        ),
        SpaceKind::Permutation => (order_rank(&lambda[..n]), order_rank(&lambda[k..k + n])),
    }
}

/// Lehmer rank of the order type of distinct values.
fn order_rank(w: &[u32]) -> u64 {
    let mut idx: Vec<u8> = (0..w.len() as u8).collect();
    idx.sort_unstable_by_key(|&i| w[i as usize]);
    let mut ranks = vec![0u8; w.len()];
    for (r, &i) in idx.iter().enumerate() {
        ranks[i as usize] = r as u8;
    }
    lehmer_rank(&ranks)
}

fn string_count(space: &Space, k: usize) -> Result<u128> {
    match space.kind {
        SpaceKind::Hamming { q } => (q as u128)
            .checked_pow((space.n + k) as u32)
            .ok_or(Error::Overflow("string count")),
        SpaceKind::Permutation => factorial(space.n + k),
    }
}

/// Advances `v` to the next string in lexicographic order; `false` at the end.
fn next_string(space: &Space, v: &mut [u32]) -> bool {
    match space.kind {
        SpaceKind::Hamming { q } => {
            for slot in v.iter_mut().rev() {
                *slot += 1;
                if *slot < q {
                    return true;
                }
                *slot = 0;
            }
            false
        }
        SpaceKind::Permutation => {
            let Some(i) = (0..v.len().saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
                return false;
            };
            let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("exists");
            v.swap(i, j);
            v[i + 1..].reverse();
            true
        }
    }
}

fn draw_string(space: &Space, len: usize, rng: &mut impl Rng, out: &mut [u32]) {
    match space.kind {
        SpaceKind::Hamming { q } => {
            for slot in out.iter_mut() {
                *slot = rng.random_range(0..q);
            }
        }
        SpaceKind::Permutation => {
            for (i, slot) in out.iter_mut().enumerate() {
                *slot = i as u32;
            }
            for i in (1..len).rev() {
                let j = rng.random_range(0..=i);
                out.swap(i, j);
            }
        }
    }
}

/// Estimates `E(T_k)`. `k >= n` is accepted (independent windows).
pub fn overlap_expectation(
    space: &Space,
    k: usize,
    sampling: Sampling,
    seed: u64,
    limits: &Limits,
) -> Result<OverlapEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("offset k must be >= 1".into()));
    }
    let balls = BallEnumerator::new(*space, limits)?;
    let len = space.n + k;
    let moments = match sampling {
        Sampling::Exhaustive => {
            let total = string_count(space, k)?;
            if total > EXHAUSTIVE_MAX {
                return Err(Error::ResourceLimit {
                    what: "exhaustive overlap strings",
                    requested: total,
                    cap: EXHAUSTIVE_MAX,
                });
            }
            // tally window-class pairs, then evaluate each distinct pair once
            let mut pairs: HashMap<(u64, u64), u64> = HashMap::new();
            let mut lambda: Vec<u32> = match space.kind {
                SpaceKind::Hamming { .. } => vec![0; len],
                SpaceKind::Permutation => (0..len as u32).collect(),
            };
            loop {
                *pairs.entry(window_pair(space, &lambda, k)).or_default() += 1;
                if !next_string(space, &mut lambda) {
                    break;
                }
            }
            let mut pairs: Vec<_> = pairs.into_iter().collect();
            pairs.sort_unstable();
            pairs
                .par_iter()
                .map(|&((a, b), times)| {
                    let mut m = Moments::default();
                    m.add(balls.intersection_size(a, b), times);
                    m
                })
                .reduce(Moments::default, Moments::merge)
        }
        Sampling::MonteCarlo { samples } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("samples must be >= 1".into()));
            }
            let batches = samples.div_ceil(BATCH);
            (0..batches)
                .into_par_iter()
                .map(|b| {
                    let mut rng = rng_for(seed, ((k as u64) << 40) | b);
                    let todo = BATCH.min(samples - b * BATCH);
                    let mut lambda = vec![0u32; len];
                    let mut m = Moments::default();
                    for _ in 0..todo {
                        draw_string(space, len, &mut rng, &mut lambda);
                        let (a, c) = window_pair(space, &lambda, k);
                        m.add(balls.intersection_size(a, c), 1);
                    }
                    m
                })
                .reduce(Moments::default, Moments::merge)
        }
    };
    let exact = matches!(sampling, Sampling::Exhaustive);
    Ok(OverlapEstimate {
        k,
        samples: moments.count,
        exact,
        mean: moments.mean(),
        std_error: if exact { 0.0 } else { moments.std_error() },
    })
}

/// `Σ_{k=1}^{n-1} E(T_k) / K`.
pub fn hypothesis_ratio(space: &Space, sampling: Sampling, seed: u64, limits: &Limits) -> Result<OverlapStats> {
    if let Sampling::MonteCarlo { samples: 0 } = sampling {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let per_k = (1..space.n)
        .map(|k| overlap_expectation(space, k, sampling, seed, limits))
        .collect::<Result<Vec<_>>>()?;
    let k = u64::try_from(space.ball_size()?).map_err(|_| Error::Overflow("ball size"))?;
    let sum_estimate: f64 = per_k.iter().map(|e| e.mean).sum();
    let sum_std_error = per_k.iter().map(|e| e.std_error.powi(2)).sum::<f64>().sqrt();
    Ok(OverlapStats {
        space: *space,
        ball_size: k,
        per_k,
        sum_estimate,
        sum_std_error,
        hypothesis_ratio: sum_estimate / k as f64,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JansonInputs {
    pub mu: f64,
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    pub delta: f64,
}

/// `exp(−min(μ²/(8Δ), μ/2, μ/(6δ)))`; a zero `Δ` or `δ` drops its term.
pub fn janson_bound(inputs: &JansonInputs) -> Result<f64> {
    let JansonInputs { mu, big_delta, delta } = *inputs;
    for (name, v) in [("mu", mu), ("Delta", big_delta), ("delta", delta)] {
        if v.is_nan() || v < 0.0 {
            return Err(Error::InvalidArgument(format!("{name} must be >= 0, got {v}")));
        }
    }
    let first = if big_delta == 0.0 {
        f64::INFINITY
    } else {
        mu * mu / (8.0 * big_delta)
    };
    let third = if delta == 0.0 { f64::INFINITY } else { mu / (6.0 * delta) };
    let exponent = first.min(mu / 2.0).min(third);
    Ok((-exponent).exp().clamp(0.0, 1.0))
}

/// Janson inputs for the event "class π is missed" by a random length-`m`
/// string, with `B_i ∼ B_j` iff the windows are within `n` of each other.
///
/// `μ = M·K/|Π|`, `δ = 2n·K/|Π|`, and `Δ = (M/|Π|)·2·Σ_{k=1}^{n} E(T_k)`
/// counting ordered pairs.
pub fn janson_inputs_estimate(
    space: &Space,
    m: usize,
    sampling: Sampling,
    seed: u64,
    limits: &Limits,
) -> Result<JansonInputs> {
    if m == 0 {
        return Err(Error::InvalidArgument("string length M must be >= 1".into()));
    }
    let classes = space.class_count()? as f64;
    let k = space.ball_size()? as f64;
    let overlap_sum = (1..=space.n)
        .map(|off| overlap_expectation(space, off, sampling, seed, limits).map(|e| e.mean))
        .sum::<Result<f64>>()?;
    Ok(JansonInputs {
        mu: m as f64 * k / classes,
        big_delta: m as f64 / classes * 2.0 * overlap_sum,
        delta: 2.0 * space.n as f64 * k / classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{order_type, Class, HammingWord};
    use std::collections::BTreeSet;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn bounds_examples() {
        let b = bounds(&Space::permutation(4, 1).unwrap(), 4.0).unwrap();
        assert_eq!((b.class_count, b.ball_size, b.lower), (24, 7, 4));
        let b = bounds(&Space::hamming(2, 3, 0).unwrap(), 4.0).unwrap();
        assert_eq!((b.ball_size, b.lower), (1, 8));
        let b = bounds(&Space::permutation(5, 1).unwrap(), 4.0).unwrap();
        assert!(rel_close(b.upper_target, 4.0 * 120.0 * 5f64.ln() / 11.0, 1e-12));
        assert!((b.upper_target - 70.23).abs() < 0.01);
        assert!(b.lower as f64 <= b.upper_target);
        assert!(b.ball_size * b.lower >= b.class_count);
        assert!(bounds(&Space::permutation(40, 1).unwrap(), 4.0).is_err());
    }

    #[test]
    fn asymptotic_examples() {
        assert_eq!(cayley_ball_asymptotic(10, 0).unwrap(), 1.0);
        assert_eq!(cayley_ball_asymptotic(10, 1).unwrap(), 50.0);
        let exact = Space::permutation(10, 1).unwrap().ball_size().unwrap();
        assert_eq!(exact, 46);
        assert!((50.0f64 / 46.0 - 1.087).abs() < 1e-3);
        assert_eq!(cayley_ball_asymptotic(100, 1).unwrap(), 5000.0);
        assert_eq!(Space::permutation(100, 1).unwrap().ball_size().unwrap(), 4951);
        assert!(cayley_ball_asymptotic(0, 1).is_err());
    }

    #[test]
    fn asymptotic_ratio_tends_to_one() {
        for r in 1..=2 {
            let ratio = |n: usize| {
                Space::permutation(n, r).unwrap().ball_size().unwrap() as f64
                    / cayley_ball_asymptotic(n, r).unwrap()
            };
            let mut prev = 0.0;
            for n in [10, 20, 50, 100, 200, 400] {
                let now = ratio(n);
                assert!(now > prev && now < 1.0, "R={r} n={n} ratio {now}");
                prev = now;
            }
            assert!(prev > 0.98);
        }
    }

    /// `T_k` averaged over every string, with balls built as sets through the
    /// public distance functions and windows classified by `order_type`.
    fn brute_overlap(space: &Space, k: usize) -> f64 {
        let total = space.class_count().unwrap() as u64;
        let classes: Vec<Class> = (0..total).map(|r| space.unrank_class(r).unwrap()).collect();
        let ball = |c: &Class| -> BTreeSet<usize> {
            (0..classes.len())
                .filter(|&i| space.distance(c, &classes[i]).unwrap() <= space.radius)
                .collect()
        };
        let n = space.n;
        let len = n + k;
        let mut strings: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..len {
            let mut next = Vec::new();
            for s in &strings {
                let alphabet = match space.kind {
                    SpaceKind::Hamming { q } => (0..q).collect::<Vec<_>>(),
                    SpaceKind::Permutation => (0..len as u32).filter(|v| !s.contains(v)).collect(),
                };
                for a in alphabet {
                    let mut t = s.clone();
                    t.push(a);
                    next.push(t);
                }
            }
            strings = next;
        }
        let class_of = |w: &[u32]| match space.kind {
            SpaceKind::Hamming { q } => Class::Word(HammingWord::new(q, w.to_vec()).unwrap()),
            SpaceKind::Permutation => Class::Permutation(order_type(w).unwrap()),
        };
        let sum: usize = strings
            .iter()
            .map(|s| {
                let a = ball(&class_of(&s[..n]));
                let b = ball(&class_of(&s[k..k + n]));
                a.intersection(&b).count()
            })
            .sum();
        sum as f64 / strings.len() as f64
    }

    fn exhaustive(space: &Space, k: usize) -> f64 {
        overlap_expectation(space, k, Sampling::Exhaustive, 0, &Limits::default())
            .unwrap()
            .mean
    }

    #[test]
    fn overlap_examples() {
        let h = Space::hamming(2, 2, 1).unwrap();
        assert!(rel_close(exhaustive(&h, 2), 2.25, 1e-12));
        let p = Space::permutation(2, 0).unwrap();
        assert!(rel_close(exhaustive(&p, 1), 1.0 / 3.0, 1e-12));
        // R = 0: T_k is the indicator that both windows coincide
        let h0 = Space::hamming(2, 3, 0).unwrap();
        assert!(rel_close(exhaustive(&h0, 1), 1.0 / 8.0, 1e-12));
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        let spaces = [
            Space::permutation(3, 1).unwrap(),
            Space::permutation(4, 1).unwrap(),
            Space::permutation(3, 0).unwrap(),
            Space::hamming(2, 3, 1).unwrap(),
            Space::hamming(3, 2, 1).unwrap(),
            Space::hamming(2, 4, 2).unwrap(),
        ];
        for space in spaces {
            for k in 1..=space.n {
                let got = exhaustive(&space, k);
                let want = brute_overlap(&space, k);
                assert!(rel_close(got, want, 1e-12), "{space} k={k}: {got} vs {want}");
            }
        }
    }

    /// Frozen from an independent exhaustive enumeration (exact fractions).
    #[test]
    fn frozen_overlap_values() {
        let perm5 = Space::permutation(5, 1).unwrap();
        let want = [157.0 / 360.0, 247.0 / 360.0, 2803.0 / 3360.0, 391.0 / 420.0];
        for (k, w) in (1..=4).zip(want) {
            assert!(rel_close(exhaustive(&perm5, k), w, 1e-12));
        }
        let perm4 = Space::permutation(4, 1).unwrap();
        let want = [27.0 / 20.0, 16.0 / 9.0, 407.0 / 210.0];
        for (k, w) in (1..=3).zip(want) {
            assert!(rel_close(exhaustive(&perm4, k), w, 1e-12));
        }
        let ham4 = Space::hamming(2, 4, 1).unwrap();
        for k in 1..=4 {
            assert!(rel_close(exhaustive(&ham4, k), 25.0 / 16.0, 1e-12));
        }
    }

    #[test]
    fn monte_carlo_agrees_and_is_deterministic() {
        let limits = Limits::default();
        for space in [Space::permutation(4, 1).unwrap(), Space::hamming(2, 4, 1).unwrap()] {
            for k in 1..space.n {
                let exact = exhaustive(&space, k);
                let mc = overlap_expectation(&space, k, Sampling::MonteCarlo { samples: 20_000 }, 9, &limits)
                    .unwrap();
                assert!((mc.mean - exact).abs() <= 4.0 * mc.std_error, "{space} k={k}");
                let again = overlap_expectation(&space, k, Sampling::MonteCarlo { samples: 20_000 }, 9, &limits)
                    .unwrap();
                assert_eq!(mc, again);
            }
        }
    }

    #[test]
    fn exhaustive_cap_and_preconditions() {
        let limits = Limits::default();
        let big = Space::permutation(6, 1).unwrap();
        assert!(matches!(
            overlap_expectation(&big, 5, Sampling::Exhaustive, 0, &limits),
            Err(Error::ResourceLimit { .. })
        ));
        assert!(overlap_expectation(&big, 0, Sampling::Exhaustive, 0, &limits).is_err());
        assert!(hypothesis_ratio(&big, Sampling::MonteCarlo { samples: 0 }, 0, &limits).is_err());
    }

    #[test]
    fn hypothesis_ratio_values() {
        let limits = Limits::default();
        let stats = hypothesis_ratio(&Space::permutation(4, 1).unwrap(), Sampling::Exhaustive, 0, &limits).unwrap();
        let want = (27.0 / 20.0 + 16.0 / 9.0 + 407.0 / 210.0) / 7.0;
        assert!(rel_close(stats.hypothesis_ratio, want, 1e-12));
        assert_eq!(stats.per_k.len(), 3);
        let stats = hypothesis_ratio(&Space::hamming(2, 3, 1).unwrap(), Sampling::Exhaustive, 0, &limits).unwrap();
        assert!(rel_close(stats.hypothesis_ratio, 1.0, 1e-12));
    }

    #[test]
    fn janson_examples() {
        let j = |mu, big_delta, delta| janson_bound(&JansonInputs { mu, big_delta, delta }).unwrap();
        assert_eq!(j(0.0, 1.0, 1.0), 1.0);
        assert!(rel_close(j(8.0, 1.0, 0.1), (-4.0f64).exp(), 1e-12));
        assert!(rel_close(j(10.0, 100.0, 1.0), (-0.125f64).exp(), 1e-12));
        assert!(rel_close(j(4.0, 0.0, 0.0), (-2.0f64).exp(), 1e-12));
        assert!(janson_bound(&JansonInputs { mu: -1.0, big_delta: 0.0, delta: 0.0 }).is_err());
        assert!(janson_bound(&JansonInputs { mu: f64::NAN, big_delta: 0.0, delta: 0.0 }).is_err());
    }

    #[test]
    fn janson_inputs_examples() {
        let limits = Limits::default();
        let h = Space::hamming(2, 2, 1).unwrap();
        let inputs = janson_inputs_estimate(&h, 4, Sampling::Exhaustive, 0, &limits).unwrap();
        assert!(rel_close(inputs.mu, 3.0, 1e-12));
        // E(T_1) = E(T_2) = 9/4 here
        assert!(rel_close(inputs.big_delta, 4.0 / 4.0 * 2.0 * 4.5, 1e-12));
        let p = Space::permutation(4, 1).unwrap();
        for m in [1, 50] {
            let inputs = janson_inputs_estimate(&p, m, Sampling::Exhaustive, 0, &limits).unwrap();
            assert!(rel_close(inputs.delta, 7.0 / 3.0, 1e-12));
        }
        assert!(janson_inputs_estimate(&h, 0, Sampling::Exhaustive, 0, &limits).is_err());
    }
}
