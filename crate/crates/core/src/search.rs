//! Exhaustive search for the shortest covering string on tiny instances.
//!
//! Lengths are tried in increasing order. For each length a depth-first search
//! fills positions left to right, keeping a multiplicity count per class so
//! balls can be added and removed as windows become fixed. A branch is cut
//! when even `K` fresh classes per still-open window cannot reach `|Π|`.
//!
//! Permutation mode searches arrangements of `1..=M` (a real string's windows
//! depend only on its overall order type), or strings over `1..=b` when a
//! symbol budget `b` is given.
//!
//! Symmetry reductions, each independently switchable:
//! * rotation: only strings that are lexicographically minimal among their
//!   rotations;
//! * relabel (Hamming only): only strings in first-occurrence order
//!   (`0` first, each new symbol one above the largest so far). With both on,
//!   strings must be minimal over rotations and relabelings combined.
//!
//! Branches below a fixed prefix depth run on the rayon pool; the witness is
//! the lexicographically smallest minimal one under the active reductions.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::spaces::{order_type, positional_rank, BallEnumerator, Limits, Space, SpaceKind};
use crate::windows::CyclicString;

/// Prefix length at which work is split into parallel branches.
const SPLIT_DEPTH: usize = 2;

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub max_length: usize,
    /// Maximum number of distinct values in the string.
    pub symbol_budget: Option<u32>,
    pub rotation: bool,
    pub relabel: bool,
    pub limits: Limits,
}

impl SearchOptions {
    /// Defaults: `M_max = 16` for Hamming, `10` for permutations.
    pub fn for_space(space: &Space) -> Self {
        Self {
            max_length: if space.is_permutation() { 10 } else { 16 },
            symbol_budget: None,
            rotation: true,
            relabel: true,
            limits: Limits::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub space: Space,
    #[serde(rename = "M_max")]
    pub max_length: usize,
    pub symbol_budget: Option<u32>,
    /// `⌈|Π| / K⌉`.
    pub lower_bound: u64,
    /// Shortest covering length, or `None` if there is none `≤ M_max`.
    #[serde(rename = "M_opt")]
    pub optimal_length: Option<usize>,
    #[serde(serialize_with = "witness_text")]
    pub witness: Option<CyclicString>,
    pub nodes_explored: u64,
}

fn witness_text<S: Serializer>(w: &Option<CyclicString>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match w {
        Some(w) => s.collect_str(w),
        None => s.serialize_none(),
    }
}

pub fn optimal_length(space: &Space, options: &SearchOptions) -> Result<SearchResult> {
    let classes = space.checked_class_count(&options.limits)?;
    let balls = BallEnumerator::new(*space, &options.limits)?;
    if let Some(b) = options.symbol_budget {
        if b == 0 {
            return Err(Error::InvalidArgument("symbol budget must be >= 1".into()));
        }
    }
    let k = balls.ball_size() as u64;
    let mut nodes = 0u64;
    for m in 1..=options.max_length {
        let (found, explored) = search_length(space, &balls, classes, m, options);
        nodes += explored;
        if let Some(values) = found {
            let witness = match space.kind {
                SpaceKind::Hamming { q } => CyclicString::symbols(q, values)?,
                SpaceKind::Permutation => {
                    CyclicString::integers(values.into_iter().map(i64::from).collect())?
                }
            };
            return Ok(SearchResult {
                space: *space,
                max_length: options.max_length,
                symbol_budget: options.symbol_budget,
                lower_bound: classes.div_ceil(k),
                optimal_length: Some(m),
                witness: Some(witness),
                nodes_explored: nodes,
            });
        }
    }
    Ok(SearchResult {
        space: *space,
        max_length: options.max_length,
        symbol_budget: options.symbol_budget,
        lower_bound: classes.div_ceil(k),
        optimal_length: None,
        witness: None,
        nodes_explored: nodes,
    })
}

/// Searches strings of length exactly `m`; returns the first witness in
/// lexicographic order and the number of nodes visited.
fn search_length(
    space: &Space,
    balls: &BallEnumerator,
    classes: u64,
    m: usize,
    options: &SearchOptions,
) -> (Option<Vec<u32>>, u64) {
    let root = Searcher::new(space, balls, classes, m, options);
    let mut prefixes = Vec::new();
    let mut scratch = root.clone();
    let mut nodes = 0u64;
    scratch.collect_prefixes(SPLIT_DEPTH.min(m), &mut prefixes, &mut nodes);

    let outcomes: Vec<(Option<Vec<u32>>, u64)> = prefixes
        .par_iter()
        .map(|prefix| {
            let mut s = root.clone();
            for &v in prefix {
                s.push(v);
            }
            // prefix nodes were counted while collecting
            s.nodes = 0;
            let found = s.dfs();
            (found, s.nodes)
        })
        .collect();
    let mut witness = None;
    for (found, explored) in outcomes {
        nodes += explored;
        if witness.is_none() {
            witness = found;
        }
    }
    (witness, nodes)
}

#[derive(Clone)]
struct Searcher<'a> {
    space: Space,
    balls: &'a BallEnumerator,
    classes: u64,
    ball: u64,
    m: usize,
    rotation: bool,
    relabel: bool,
    budget: Option<u32>,
    values: Vec<u32>,
    used: Vec<bool>,
    distinct: u32,
    multiplicity: Vec<u32>,
    covered: u64,
    nodes: u64,
}

impl<'a> Searcher<'a> {
    fn new(space: &Space, balls: &'a BallEnumerator, classes: u64, m: usize, options: &SearchOptions) -> Self {
        let alphabet = match space.kind {
            SpaceKind::Hamming { q } => q as usize,
            SpaceKind::Permutation => options.symbol_budget.map_or(m, |b| b as usize) + 1,
        };
        Self {
            space: *space,
            balls,
            classes,
            ball: balls.ball_size() as u64,
            m,
            rotation: options.rotation,
            relabel: options.relabel && !space.is_permutation(),
            budget: options.symbol_budget,
            values: Vec::with_capacity(m),
            used: vec![false; alphabet],
            distinct: 0,
            multiplicity: vec![0; classes as usize],
            covered: 0,
            nodes: 0,
        }
    }

    /// Distinct permutation mode: every value `1..=M` used once.
    fn arrangement(&self) -> bool {
        self.space.is_permutation() && self.budget.is_none()
    }

    fn candidates(&self) -> Vec<u32> {
        let pos = self.values.len();
        let raw: Vec<u32> = match self.space.kind {
            SpaceKind::Hamming { q } => {
                let top = if self.relabel {
                    let next_new = self.values.iter().max().map_or(0, |&v| v + 1);
                    next_new.min(q - 1)
                } else {
                    q - 1
                };
                (0..=top).collect()
            }
            SpaceKind::Permutation => match self.budget {
                None => (1..=self.m as u32).filter(|&v| !self.used[v as usize]).collect(),
                Some(b) => (1..=b).collect(),
            },
        };
        raw.into_iter()
            .filter(|&v| {
                // a rotation-minimal string starts with its smallest value
                if self.rotation && pos > 0 && v < self.values[0] {
                    return false;
                }
                if self.rotation && pos == 0 && self.arrangement() && v != 1 {
                    return false;
                }
                match self.budget {
                    Some(b) if !self.used[v as usize] => self.distinct < b,
                    _ => true,
                }
            })
            .collect()
    }

    fn window_rank(&self, start: usize) -> Option<u64> {
        let n = self.space.n;
        let w: Vec<u32> = (0..n).map(|j| self.values[(start + j) % self.m]).collect();
        match self.space.kind {
            SpaceKind::Hamming { q } => positional_rank(q, &w),
            SpaceKind::Permutation => order_type(&w).map(|p| p.rank().expect("rankable")),
        }
    }

    fn apply_window(&mut self, start: usize, add: bool) {
        let Some(rank) = self.window_rank(start) else {
            return;
        };
        let (multiplicity, covered) = (&mut self.multiplicity, &mut self.covered);
        self.balls.for_each_in_ball(rank, |r| {
            let slot = &mut multiplicity[r as usize];
            if add {
                if *slot == 0 {
                    *covered += 1;
                }
                *slot += 1;
            } else {
                *slot -= 1;
                if *slot == 0 {
                    *covered -= 1;
                }
            }
        });
    }

    /// Windows that become fully determined once position `pos` is filled.
    fn windows_closed_by(&self, pos: usize) -> Vec<usize> {
        let n = self.space.n;
        let mut starts = Vec::new();
        if pos + 1 >= n {
            starts.push(pos + 1 - n);
        }
        if pos + 1 == self.m {
            // wrap-around windows
            let first = (self.m + 1).saturating_sub(n);
            starts.extend(first..self.m);
        }
        starts
    }

    fn push(&mut self, v: u32) {
        self.nodes += 1;
        let pos = self.values.len();
        self.values.push(v);
        if !self.used[v as usize] {
            self.used[v as usize] = true;
            self.distinct += 1;
        }
        for start in self.windows_closed_by(pos) {
            self.apply_window(start, true);
        }
    }

    fn pop(&mut self) {
        let pos = self.values.len() - 1;
        for start in self.windows_closed_by(pos) {
            self.apply_window(start, false);
        }
        let v = self.values.pop().expect("non-empty");
        if !self.values.contains(&v) {
            self.used[v as usize] = false;
            self.distinct -= 1;
        }
    }

    fn hopeless(&self) -> bool {
        let closed = (self.values.len() + 1).saturating_sub(self.space.n);
        let closed = if self.values.len() == self.m { self.m } else { closed };
        let open = (self.m - closed) as u64;
        self.covered + open * self.ball < self.classes
    }

    fn collect_prefixes(&mut self, depth: usize, out: &mut Vec<Vec<u32>>, nodes: &mut u64) {
        if self.values.len() == depth {
            out.push(self.values.clone());
            return;
        }
        for v in self.candidates() {
            self.push(v);
            *nodes += 1;
            if !self.hopeless() {
                self.collect_prefixes(depth, out, nodes);
            }
            self.pop();
        }
    }

    fn dfs(&mut self) -> Option<Vec<u32>> {
        if self.hopeless() {
            return None;
        }
        if self.values.len() == self.m {
            return (self.covered == self.classes && self.canonical()).then(|| self.values.clone());
        }
        for v in self.candidates() {
            self.push(v);
            let found = self.dfs();
            self.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn canonical(&self) -> bool {
        if !self.rotation {
            return true;
        }
        let s = &self.values;
        (1..self.m).all(|t| {
            let rotated: Vec<u32> = s[t..].iter().chain(&s[..t]).copied().collect();
            let rotated = if self.relabel { relabel(&rotated) } else { rotated };
            s.as_slice() <= rotated.as_slice()
        })
    }
}

/// First-occurrence relabeling: the lexicographically smallest relabeling.
fn relabel(s: &[u32]) -> Vec<u32> {
    let mut map: Vec<(u32, u32)> = Vec::new();
    s.iter()
        .map(|&v| match map.iter().find(|(from, _)| *from == v) {
            Some(&(_, to)) => to,
            None => {
                let to = map.len() as u32;
                map.push((v, to));
                to
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::{verify, VerifyOptions};

    fn run(space: &Space) -> SearchResult {
        optimal_length(space, &SearchOptions::for_space(space)).unwrap()
    }

    fn run_plain(space: &Space, max_length: usize) -> SearchResult {
        let options = SearchOptions {
            max_length,
            rotation: false,
            relabel: false,
            ..SearchOptions::for_space(space)
        };
        optimal_length(space, &options).unwrap()
    }

    #[test]
    fn de_bruijn_length_for_radius_zero() {
        let space = Space::hamming(2, 2, 0).unwrap();
        let result = run(&space);
        assert_eq!(result.optimal_length, Some(4));
        assert_eq!(result.witness.unwrap().to_string(), "0011");
        assert_eq!(run(&Space::hamming(2, 3, 0).unwrap()).optimal_length, Some(8));
        assert_eq!(run(&Space::hamming(3, 2, 0).unwrap()).optimal_length, Some(9));
    }

    #[test]
    fn radius_one_q2_n2() {
        let result = run(&Space::hamming(2, 2, 1).unwrap());
        assert_eq!(result.optimal_length, Some(2));
        assert_eq!(result.witness.unwrap().to_string(), "01");
    }

    #[test]
    fn unpruned_witness_is_lexicographically_smallest() {
        let result = run_plain(&Space::hamming(2, 2, 0).unwrap(), 6);
        assert_eq!(result.witness.unwrap().to_string(), "0011");
    }

    /// Integer payloads with M < n repeat values inside every window, so a
    /// permutation space needs M >= n even when one ball is everything.
    #[test]
    fn full_radius_permutations_need_n_values() {
        let result = run(&Space::permutation(3, 2).unwrap());
        assert_eq!(result.optimal_length, Some(3));
        assert_eq!(result.witness.unwrap().to_string(), "1,2,3");
    }

    #[test]
    fn example_string_length_is_not_beaten_below_bound() {
        let space = Space::permutation(4, 1).unwrap();
        let result = run(&space);
        let m = result.optimal_length.unwrap();
        assert!(m as u64 >= result.lower_bound);
        assert!(m <= 6, "134526 has length 6");
        let witness = result.witness.unwrap();
        assert!(verify(&witness, &space, &VerifyOptions::default()).unwrap().is_covering);
    }

    #[test]
    fn none_within_limit_is_definite() {
        let space = Space::permutation(4, 0).unwrap();
        let result = run(&space);
        assert_eq!(result.optimal_length, None);
        assert!(result.witness.is_none());
    }

    #[test]
    fn symmetry_reductions_are_sound() {
        let mut spaces = Vec::new();
        for n in 1..=4 {
            for r in 0..n {
                spaces.push((Space::hamming(2, n, r).unwrap(), 12));
            }
        }
        for r in 0..2 {
            spaces.push((Space::hamming(3, 2, r).unwrap(), 9));
        }
        for n in 2..=5 {
            for r in 0..n {
                spaces.push((Space::permutation(n, r).unwrap(), 7));
            }
        }
        for (space, max_length) in spaces {
            let reduced = optimal_length(
                &space,
                &SearchOptions {
                    max_length,
                    ..SearchOptions::for_space(&space)
                },
            )
            .unwrap();
            let rotation_only = optimal_length(
                &space,
                &SearchOptions {
                    max_length,
                    relabel: false,
                    ..SearchOptions::for_space(&space)
                },
            )
            .unwrap();
            let plain = run_plain(&space, max_length);
            assert_eq!(reduced.optimal_length, plain.optimal_length, "{space}");
            assert_eq!(rotation_only.optimal_length, plain.optimal_length, "{space}");
            if let Some(w) = &reduced.witness {
                assert!(verify(w, &space, &VerifyOptions::default()).unwrap().is_covering);
                assert!(reduced.optimal_length.unwrap() as u64 >= reduced.lower_bound);
            }
        }
    }

    #[test]
    fn symbol_budget() {
        // two values cannot give a tie-free window of length 3
        let space = Space::permutation(3, 2).unwrap();
        let options = SearchOptions {
            symbol_budget: Some(2),
            max_length: 6,
            ..SearchOptions::for_space(&space)
        };
        assert_eq!(optimal_length(&space, &options).unwrap().optimal_length, None);
        let options = SearchOptions {
            symbol_budget: Some(3),
            ..options
        };
        assert_eq!(optimal_length(&space, &options).unwrap().optimal_length, Some(3));

        let ham = Space::hamming(3, 2, 0).unwrap();
        let options = SearchOptions {
            symbol_budget: Some(2),
            max_length: 9,
            ..SearchOptions::for_space(&ham)
        };
        assert_eq!(optimal_length(&ham, &options).unwrap().optimal_length, None);
    }

    #[test]
    fn schedule_independent() {
        let space = Space::hamming(2, 4, 1).unwrap();
        let results: Vec<_> = [1, 4]
            .iter()
            .map(|&w| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(w)
                    .build()
                    .unwrap()
                    .install(|| run(&space))
            })
            .collect();
        assert_eq!(results[0].optimal_length, results[1].optimal_length);
        assert_eq!(results[0].witness, results[1].witness);
        assert_eq!(results[0].nodes_explored, results[1].nodes_explored);
    }

    #[test]
    fn relabel_helper() {
        assert_eq!(relabel(&[2, 2, 0, 1, 0]), vec![0, 0, 1, 2, 1]);
    }
}
