//! Cyclic strings and their consecutive `n`-windows, indices taken mod `M`.
//!
//! Text format: q-ary payloads are one digit per symbol when `q <= 10` and
//! comma-separated integers otherwise; permutation-mode payloads are
//! comma-separated integers or decimal literals.

use std::fmt;

use crate::error::{Error, Result};
use crate::spaces::{order_type, positional_rank, Class, HammingWord, Space, SpaceKind};

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Symbols { q: u32, data: Vec<u32> },
    Integers(Vec<i64>),
    Reals(Vec<f64>),
}

impl Values {
    pub fn len(&self) -> usize {
        match self {
            Values::Symbols { data, .. } => data.len(),
            Values::Integers(v) => v.len(),
            Values::Reals(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CyclicString {
    values: Values,
    all_distinct: bool,
}

impl CyclicString {
    pub fn new(values: Values) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("cyclic string of length 0".into()));
        }
        match &values {
            Values::Symbols { q, data } => {
                if *q == 0 {
                    return Err(Error::InvalidArgument("alphabet size q must be >= 1".into()));
                }
                if let Some(s) = data.iter().find(|&&s| s >= *q) {
                    return Err(Error::InvalidArgument(format!("symbol {s} not below q = {q}")));
                }
            }
            Values::Reals(v) => {
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidArgument("non-finite real in payload".into()));
                }
            }
            Values::Integers(_) => {}
        }
        let all_distinct = match &values {
            Values::Symbols { data, .. } => distinct(data.clone()),
            Values::Integers(v) => distinct(v.clone()),
            Values::Reals(v) => {
                let mut v = v.clone();
                v.sort_by(f64::total_cmp);
                v.windows(2).all(|w| w[0] < w[1])
            }
        };
        Ok(Self {
            values,
            all_distinct,
        })
    }

    pub fn symbols(q: u32, data: Vec<u32>) -> Result<Self> {
        Self::new(Values::Symbols { q, data })
    }

    pub fn integers(data: Vec<i64>) -> Result<Self> {
        Self::new(Values::Integers(data))
    }

    pub fn reals(data: Vec<f64>) -> Result<Self> {
        Self::new(Values::Reals(data))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    /// Whether all `M` entries are pairwise distinct.
    pub fn all_distinct(&self) -> bool {
        self.all_distinct
    }

    /// `(s_i, s_{i+1}, …, s_{i+n-1})` with indices mod `M`; `M < n` is allowed.
    pub fn window_at(&self, n: usize, i: usize) -> Result<Values> {
        let m = self.len();
        if i >= m {
            return Err(Error::OutOfRange {
                index: i as u64,
                limit: m as u64,
            });
        }
        fn take<T: Copy>(v: &[T], n: usize, i: usize) -> Vec<T> {
            (0..n).map(|j| v[(i + j) % v.len()]).collect()
        }
        Ok(match &self.values {
            Values::Symbols { q, data } => Values::Symbols {
                q: *q,
                data: take(data, n, i),
            },
            Values::Integers(v) => Values::Integers(take(v, n, i)),
            Values::Reals(v) => Values::Reals(take(v, n, i)),
        })
    }

    /// Cyclic rotation: entry `i` of the result is entry `i + t` of `self`.
    pub fn rotate(&self, t: usize) -> Self {
        fn rot<T: Clone>(v: &[T], t: usize) -> Vec<T> {
            let t = t % v.len();
            v[t..].iter().chain(&v[..t]).cloned().collect()
        }
        let values = match &self.values {
            Values::Symbols { q, data } => Values::Symbols {
                q: *q,
                data: rot(data, t),
            },
            Values::Integers(v) => Values::Integers(rot(v, t)),
            Values::Reals(v) => Values::Reals(rot(v, t)),
        };
        Self {
            values,
            all_distinct: self.all_distinct,
        }
    }

    /// Checks that the payload kind fits `space`.
    pub fn check_space(&self, space: &Space) -> Result<()> {
        match (&self.values, space.kind) {
            (Values::Symbols { q, .. }, SpaceKind::Hamming { q: sq }) if *q == sq => Ok(()),
            (Values::Symbols { q, .. }, SpaceKind::Hamming { q: sq }) => Err(
                Error::PayloadMismatch(format!("string over q = {q} but space has q = {sq}")),
            ),
            (Values::Integers(_) | Values::Reals(_), SpaceKind::Permutation) => Ok(()),
            (Values::Symbols { .. }, SpaceKind::Permutation) => Err(Error::PayloadMismatch(
                "q-ary payload given for a permutation space".into(),
            )),
            (_, SpaceKind::Hamming { .. }) => Err(Error::PayloadMismatch(
                "numeric payload given for a hamming space".into(),
            )),
        }
    }

    /// Streams the class rank of every window (`None` for tied windows), `M` items.
    pub fn window_ranks<'a>(&'a self, space: &Space) -> Result<WindowRanks<'a>> {
        self.check_space(space)?;
        if let SpaceKind::Permutation = space.kind {
            if space.n > crate::spaces::MAX_RANKABLE_N {
                return Err(Error::Overflow("class rank"));
            }
        } else if space.class_count().ok().and_then(|c| u64::try_from(c).ok()).is_none() {
            return Err(Error::Overflow("class rank"));
        }
        Ok(WindowRanks {
            string: self,
            n: space.n,
            next: 0,
            end: self.len(),
            rolling: None,
        })
    }

    /// Like [`window_ranks`](Self::window_ranks) restricted to windows `start..end`.
    pub fn window_ranks_in<'a>(
        &'a self,
        space: &Space,
        range: std::ops::Range<usize>,
    ) -> Result<WindowRanks<'a>> {
        let mut it = self.window_ranks(space)?;
        it.next = range.start.min(self.len());
        it.end = range.end.min(self.len()).max(it.next);
        Ok(it)
    }

    /// `Π(S⁽ⁿ⁾ᵢ)` for every `i`, as classes.
    pub fn window_classes(&self, space: &Space) -> Result<Vec<Option<Class>>> {
        self.window_ranks(space)?
            .map(|r| r.map(|r| space.unrank_class(r)).transpose())
            .collect()
    }

    /// Parses the text format for the given space kind.
    pub fn parse(kind: SpaceKind, text: &str) -> Result<Self> {
        let text = text.trim();
        match kind {
            SpaceKind::Hamming { q } => Self::symbols(q, parse_symbols(q, text)?),
            SpaceKind::Permutation => {
                let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
                if let Ok(ints) = tokens.iter().map(|t| t.parse::<i64>()).collect::<std::result::Result<Vec<_>, _>>() {
                    return Self::integers(ints);
                }
                let reals = tokens
                    .iter()
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Parse(format!("{text:?}: {e}")))?;
                Self::reals(reals)
            }
        }
    }

    pub(crate) fn extend_with(&mut self, tail: &Values) -> Result<()> {
        match (&mut self.values, tail) {
            (Values::Symbols { q, data }, Values::Symbols { q: tq, data: t }) if q == tq => {
                data.extend_from_slice(t)
            }
            (Values::Integers(v), Values::Integers(t)) => v.extend_from_slice(t),
            (Values::Reals(v), Values::Reals(t)) => v.extend_from_slice(t),
            (Values::Reals(v), Values::Integers(t)) => v.extend(t.iter().map(|&x| x as f64)),
            _ => return Err(Error::PayloadMismatch("incompatible payloads".into())),
        }
        let rebuilt = Self::new(std::mem::replace(&mut self.values, Values::Integers(vec![0])))?;
        *self = rebuilt;
        Ok(())
    }
}

fn distinct<T: Ord>(mut v: Vec<T>) -> bool {
    v.sort_unstable();
    v.windows(2).all(|w| w[0] != w[1])
}

/// Lazily computed window classes of a [`CyclicString`].
pub struct WindowRanks<'a> {
    string: &'a CyclicString,
    n: usize,
    next: usize,
    end: usize,
    /// Hamming rank of the previous window, for the rolling update.
    rolling: Option<u64>,
}

impl Iterator for WindowRanks<'_> {
    type Item = Option<u64>;

    fn next(&mut self) -> Option<Self::Item> {
        let m = self.string.len();
        let i = self.next;
        if i >= self.end {
            return None;
        }
        self.next += 1;
        let n = self.n;
        Some(match &self.string.values {
            Values::Symbols { q, data } => {
                let q = *q as u64;
                let rank = match self.rolling {
                    Some(prev) if q > 1 => {
                        let lead = q.pow(n as u32 - 1);
                        let dropped = data[(i + m - 1) % m] as u64;
                        (prev - dropped * lead) * q + data[(i + n - 1) % m] as u64
                    }
                    _ => {
                        let w: Vec<u32> = (0..n).map(|j| data[(i + j) % m]).collect();
                        positional_rank(q as u32, &w).expect("checked in window_ranks")
                    }
                };
                self.rolling = Some(rank);
                Some(rank)
            }
            Values::Integers(v) => perm_rank(v, n, i),
            Values::Reals(v) => perm_rank(v, n, i),
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.end - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for WindowRanks<'_> {}

fn perm_rank<T: PartialOrd + Copy>(v: &[T], n: usize, i: usize) -> Option<u64> {
    let m = v.len();
    let w: Vec<T> = (0..n).map(|j| v[(i + j) % m]).collect();
    order_type(&w).map(|p| p.rank().expect("checked in window_ranks"))
}

pub(crate) fn format_symbols(q: u32, data: &[u32]) -> String {
    if q <= 10 {
        data.iter()
            .map(|&s| char::from_digit(s, 10).expect("symbol below 10"))
            .collect()
    } else {
        join(data)
    }
}

fn join<T: fmt::Display>(data: &[T]) -> String {
    data.iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_symbols(q: u32, text: &str) -> Result<Vec<u32>> {
    let parsed = if text.contains(',') || q > 10 {
        text.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?
    } else {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(format!("bad symbol {c:?}"))))
            .collect::<Result<Vec<_>>>()?
    };
    if let Some(s) = parsed.iter().find(|&&s| s >= q) {
        return Err(Error::Parse(format!("symbol {s} not below q = {q}")));
    }
    Ok(parsed)
}

impl fmt::Display for CyclicString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.values {
            Values::Symbols { q, data } => f.write_str(&format_symbols(*q, data)),
            Values::Integers(v) => f.write_str(&join(v)),
            Values::Reals(v) => f.write_str(&join(v)),
        }
    }
}

impl From<HammingWord> for CyclicString {
    fn from(w: HammingWord) -> Self {
        CyclicString::symbols(w.q(), w.symbols().to_vec()).expect("valid word")
    }
}
