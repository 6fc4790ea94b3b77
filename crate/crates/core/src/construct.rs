//! Randomized construction with patching.
//!
//! Draw a uniform random cyclic string of length `M = ⌈C·|Π|·ln n / K⌉`,
//! verify it, and if few enough classes are left uncovered return
//! `S ⧺ S ⧺ rep(c₁) ⧺ … ⧺ rep(c_u)`. The doubled copy keeps every cyclic
//! window of `S` as an interior window, and each representative block is a
//! window of its own class.
//!
//! Randomness: ChaCha8 seeded with `seed_from_u64(seed)`; attempt `a` reads
//! stream `a` (`set_stream`). Permutation mode shuffles `1..=M` with an
//! explicit Fisher–Yates pass. This layout is part of the golden outputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::coverage::{class_values, verify, CoverageReport, VerifyOptions};
use crate::error::{Error, Result};
use crate::spaces::{Class, Limits, Space, SpaceKind};
use crate::windows::{CyclicString, Values};

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// How permutation-mode strings are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RealMode {
    /// A uniformly random arrangement of `1..=M`; tie-free, same window
    /// order-type distribution as i.i.d. reals.
    #[default]
    Shuffle,
    /// I.i.d. uniform reals in `[0, 1)` with 53 random bits each.
    Iid,
}

pub fn random_string_with(space: &Space, m: usize, mode: RealMode, rng: &mut impl Rng) -> Result<CyclicString> {
    if m == 0 {
        return Err(Error::InvalidArgument("string length M must be >= 1".into()));
    }
    match space.kind {
        SpaceKind::Hamming { q } => {
            CyclicString::symbols(q, (0..m).map(|_| rng.random_range(0..q)).collect())
        }
        SpaceKind::Permutation => match mode {
            RealMode::Shuffle => {
                let mut v: Vec<i64> = (1..=m as i64).collect();
                for i in (1..m).rev() {
                    let j = rng.random_range(0..=i);
                    v.swap(i, j);
                }
                CyclicString::integers(v)
            }
            RealMode::Iid => CyclicString::reals((0..m).map(|_| rng.random::<f64>()).collect()),
        },
    }
}

/// Uniform random string of length `m`, deterministic in `seed`.
pub fn random_string(space: &Space, m: usize, seed: u64) -> Result<CyclicString> {
    random_string_with(space, m, RealMode::Shuffle, &mut rng_for(seed, 0))
}

/// A word whose class is `class`: the word itself, or the one-line notation.
pub fn representative(space: &Space, class: &Class) -> Result<Values> {
    space.check_class(class)?;
    Ok(class_values(space, class))
}

/// `S ⧺ S ⧺ rep(c₁) ⧺ … ⧺ rep(c_u)` for the given uncovered class ranks.
///
/// Needs `M ≥ n − 1` so that the doubled copy contains every cyclic window of
/// `S`.
pub fn patch(string: &CyclicString, space: &Space, uncovered: &[u64]) -> Result<CyclicString> {
    string.check_space(space)?;
    if string.len() + 1 < space.n {
        return Err(Error::InvalidArgument(format!(
            "cannot patch a string of length {} for window length {}",
            string.len(),
            space.n
        )));
    }
    let mut out = string.clone();
    out.extend_with(string.values())?;
    for &rank in uncovered {
        let class = space.unrank_class(rank)?;
        out.extend_with(&class_values(space, &class))?;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ConstructOptions {
    pub c: f64,
    pub max_attempts: u32,
    /// Accept a draw when `uncovered ≤ patch_slack · ⌈|Π| / n⌉`.
    pub patch_slack: u64,
    pub real_mode: RealMode,
    pub limits: Limits,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        Self {
            c: 4.0,
            max_attempts: 8,
            patch_slack: 2,
            real_mode: RealMode::Shuffle,
            limits: Limits::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionResult {
    pub space: Space,
    pub seed: u64,
    #[serde(rename = "C")]
    pub c: f64,
    /// `C` of the successful attempt (doubled once per rejected attempt).
    #[serde(rename = "C_used")]
    pub c_used: f64,
    pub real_mode: RealMode,
    #[serde(rename = "base_M")]
    pub base_length: usize,
    pub patched_classes: usize,
    pub final_length: usize,
    pub attempts: u32,
    /// `final_length / (|Π|·ln n / K)`; absent when `ln n = 0`.
    pub length_ratio: Option<f64>,
    #[serde(serialize_with = "as_text")]
    pub code: CyclicString,
    pub report: CoverageReport,
}

fn as_text<S: Serializer>(code: &CyclicString, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(code)
}

/// `⌈C·|Π|·ln n / K⌉`, at least `max(1, n − 1)`.
pub fn base_length(space: &Space, c: f64) -> Result<usize> {
    let classes = space.class_count()? as f64;
    let k = space.ball_size()? as f64;
    let raw = (c * classes * (space.n as f64).ln() / k).ceil();
    Ok((raw as usize).max(space.n.saturating_sub(1)).max(1))
}

pub fn construct(space: &Space, seed: u64, options: &ConstructOptions) -> Result<ConstructionResult> {
    if !(options.c > 0.0 && options.c.is_finite()) {
        return Err(Error::InvalidArgument(format!("C must be positive, got {}", options.c)));
    }
    if options.max_attempts == 0 {
        return Err(Error::InvalidArgument("max_attempts must be >= 1".into()));
    }
    let classes = space.checked_class_count(&options.limits)?;
    let verify_options = VerifyOptions {
        limits: options.limits,
        max_listed: None,
    };
    let allowed = classes.div_ceil(space.n as u64) * options.patch_slack;
    let mut c = options.c;
    let mut best_uncovered = u64::MAX;
    for attempt in 0..options.max_attempts {
        let m = base_length(space, c)?;
        let mut rng = rng_for(seed, attempt as u64);
        let draw = random_string_with(space, m, options.real_mode, &mut rng)?;
        let report = verify(&draw, space, &verify_options)?;
        best_uncovered = best_uncovered.min(report.uncovered_total);
        if report.uncovered_total > allowed {
            c *= 2.0;
            continue;
        }
        let code = patch(&draw, space, &report.uncovered)?;
        let report_after = verify(&code, space, &verify_options)?;
        assert!(
            report_after.is_covering,
            "patched string failed to cover {space}: {} classes left",
            report_after.uncovered_total
        );
        let patched = report.uncovered.len();
        let final_length = code.len();
        debug_assert_eq!(final_length, 2 * m + space.n * patched);
        let scale = classes as f64 * (space.n as f64).ln() / space.ball_size()? as f64;
        return Ok(ConstructionResult {
            space: *space,
            seed,
            c: options.c,
            c_used: c,
            real_mode: options.real_mode,
            base_length: m,
            patched_classes: patched,
            final_length,
            attempts: attempt + 1,
            length_ratio: (scale > 0.0).then(|| final_length as f64 / scale),
            code,
            report: report_after,
        });
    }
    Err(Error::AttemptsExhausted {
        attempts: options.max_attempts,
        best_uncovered,
        allowed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::uncovered_ranks;

    #[test]
    fn random_string_is_deterministic() {
        let space = Space::hamming(2, 3, 0).unwrap();
        assert_eq!(
            random_string(&space, 8, 42).unwrap(),
            random_string(&space, 8, 42).unwrap()
        );
        assert_ne!(
            random_string(&space, 64, 42).unwrap(),
            random_string(&space, 64, 43).unwrap()
        );
    }

    #[test]
    fn permutation_payload_is_tie_free() {
        let space = Space::permutation(4, 1).unwrap();
        let s = random_string(&space, 10, 7).unwrap();
        let Values::Integers(mut v) = s.values().clone() else {
            panic!("expected integers")
        };
        v.sort_unstable();
        assert_eq!(v, (1..=10).collect::<Vec<_>>());
        assert!(s.all_distinct());
    }

    #[test]
    fn symbol_frequencies_are_fair() {
        // binomial test: 10^5 single-symbol draws, q = 2
        let space = Space::hamming(2, 1, 0).unwrap();
        let mut rng = rng_for(2024, 0);
        let draws = 100_000u32;
        let ones: u32 = (0..draws)
            .map(|_| {
                let s = random_string_with(&space, 1, RealMode::Shuffle, &mut rng).unwrap();
                let Values::Symbols { data, .. } = s.values() else { unreachable!() };
                data[0]
            })
            .sum();
        let sigma = (draws as f64 * 0.25).sqrt();
        assert!((ones as f64 - draws as f64 / 2.0).abs() < 3.0 * sigma, "{ones}");
    }

    #[test]
    fn representatives() {
        let perm = Space::permutation(4, 0).unwrap();
        let class = Class::Permutation("2341".parse().unwrap());
        assert_eq!(representative(&perm, &class).unwrap(), Values::Integers(vec![2, 3, 4, 1]));
        let perm3 = Space::permutation(3, 0).unwrap();
        let class = Class::Permutation("312".parse().unwrap());
        assert_eq!(representative(&perm3, &class).unwrap(), Values::Integers(vec![3, 1, 2]));
        let ham = Space::hamming(2, 4, 0).unwrap();
        let class = ham.unrank_class(6).unwrap();
        assert_eq!(class.to_string(), "0110");
        assert_eq!(
            representative(&ham, &class).unwrap(),
            Values::Symbols { q: 2, data: vec![0, 1, 1, 0] }
        );
        assert!(representative(&perm3, &Class::Permutation("1234".parse().unwrap())).is_err());
    }

    #[test]
    fn patch_examples() {
        let limits = Limits::default();
        let space = Space::hamming(2, 2, 0).unwrap();
        let s = CyclicString::parse(space.kind, "0").unwrap();
        let missing = uncovered_ranks(&s, &space, &limits).unwrap();
        let patched = patch(&s, &space, &missing).unwrap();
        assert_eq!(patched.to_string(), "00011011");
        assert!(verify(&patched, &space, &VerifyOptions::default()).unwrap().is_covering);

        let s = CyclicString::parse(space.kind, "0011").unwrap();
        let patched = patch(&s, &space, &[]).unwrap();
        assert_eq!(patched.to_string(), "00110011");

        // permutation block lands at offset 2M with its own class
        let space = Space::permutation(3, 0).unwrap();
        let s = CyclicString::integers(vec![1, 2, 3, 4, 5]).unwrap();
        let rank_321 = space.rank_class(&Class::Permutation("321".parse().unwrap())).unwrap();
        let patched = patch(&s, &space, &[rank_321]).unwrap();
        assert_eq!(patched.len(), 13);
        assert_eq!(patched.window_at(3, 10).unwrap(), Values::Integers(vec![3, 2, 1]));
        let classes = patched.window_classes(&space).unwrap();
        assert_eq!(classes[10].as_ref().unwrap().to_string(), "321");

        assert!(patch(&CyclicString::integers(vec![1]).unwrap(), &space, &[]).is_err());
    }

    #[test]
    fn real_payload_patch_appends_reals() {
        let space = Space::permutation(2, 0).unwrap();
        let s = CyclicString::reals(vec![0.25, 0.75]).unwrap();
        let patched = patch(&s, &space, &[]).unwrap();
        assert_eq!(patched.values(), &Values::Reals(vec![0.25, 0.75, 0.25, 0.75]));
    }

    #[test]
    fn construct_examples() {
        let options = ConstructOptions::default();

        let full = Space::permutation(4, 3).unwrap();
        let result = construct(&full, 99, &options).unwrap();
        assert!(result.report.is_covering);
        assert_eq!(result.patched_classes, 0);

        let ham = Space::hamming(2, 3, 0).unwrap();
        let result = construct(&ham, 5, &options).unwrap();
        assert!(result.report.is_covering);
        assert!(result.final_length >= 8);

        let perm = Space::permutation(5, 1).unwrap();
        let result = construct(&perm, 1, &options).unwrap();
        assert!(result.report.is_covering);
        assert_eq!(result.base_length, 71);
        assert_eq!(
            result.final_length,
            2 * result.base_length + 5 * result.patched_classes
        );
    }

    #[test]
    fn construct_is_deterministic_and_iid_mode_works() {
        let space = Space::permutation(5, 1).unwrap();
        let options = ConstructOptions {
            real_mode: RealMode::Iid,
            ..ConstructOptions::default()
        };
        let a = construct(&space, 11, &options).unwrap();
        let b = construct(&space, 11, &options).unwrap();
        assert_eq!(a.code, b.code);
        assert!(a.report.is_covering);
        assert!(matches!(a.code.values(), Values::Reals(_)));
    }

    #[test]
    fn exhausted_attempts_are_reported() {
        let space = Space::permutation(6, 0).unwrap();
        let options = ConstructOptions {
            c: 1e-9,
            max_attempts: 1,
            patch_slack: 0,
            ..ConstructOptions::default()
        };
        assert!(matches!(
            construct(&space, 3, &options),
            Err(Error::AttemptsExhausted { attempts: 1, .. })
        ));
        let bad = ConstructOptions {
            c: -1.0,
            ..ConstructOptions::default()
        };
        assert!(construct(&space, 3, &bad).is_err());
    }
}
