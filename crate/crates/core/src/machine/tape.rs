//! Tape storage: sparse-by-construction bit overlays for the writable tapes
//! and lazily evaluated input reals.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A writable tape: a finite set of cells holding 1, every other cell 0.
///
/// Backed by a bitset whose trailing zero words are always trimmed, so the
/// derived equality and hash only see the cells that hold 1.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Overlay {
    words: Vec<u64>,
}

impl Overlay {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cells<I: IntoIterator<Item = usize>>(cells: I) -> Self {
        let mut out = Overlay::new();
        for c in cells {
            out.set(c, true);
        }
        out
    }

    #[inline]
    pub fn get(&self, cell: usize) -> bool {
        self.words
            .get(cell / 64)
            .is_some_and(|w| w >> (cell % 64) & 1 == 1)
    }

    /// Writes `bit` and returns the previous value.
    #[inline]
    pub fn set(&mut self, cell: usize, bit: bool) -> bool {
        let (word, shift) = (cell / 64, cell % 64);
        if bit {
            if word >= self.words.len() {
                self.words.resize(word + 1, 0);
            }
            let old = self.words[word] >> shift & 1 == 1;
            self.words[word] |= 1 << shift;
            old
        } else {
            let Some(w) = self.words.get_mut(word) else {
                return false;
            };
            let old = *w >> shift & 1 == 1;
            *w &= !(1 << shift);
            if old && word + 1 == self.words.len() {
                self.trim();
            }
            old
        }
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Cells holding 1, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn intersect_with(&mut self, other: &Overlay) {
        self.words.truncate(other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        self.trim();
    }

    pub fn union_with(&mut self, other: &Overlay) {
        if other.words.len() > self.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// True iff every 1-cell of `self` is a 1-cell of `other`.
    pub fn is_subset(&self, other: &Overlay) -> bool {
        self.words.iter().enumerate().all(|(i, &w)| {
            let o = other.words.get(i).copied().unwrap_or(0);
            w & !o == 0
        })
    }

    /// Number of backing words; a proxy for the written extent.
    pub fn extent(&self) -> usize {
        self.words.len() * 64
    }
}

impl fmt::Debug for Overlay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

impl Serialize for Overlay {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.ones())
    }
}

impl<'de> Deserialize<'de> for Overlay {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let cells = Vec::<usize>::deserialize(d)?;
        Ok(Overlay::from_cells(cells))
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TapeError {
    #[error("periodic tape needs a nonempty period")]
    EmptyPeriod,
    #[error("rule {rule} needs up to {needed} steps per cell, bound is {bound}")]
    BoundTooSmall {
        rule: String,
        needed: u64,
        bound: u64,
    },
    #[error("stride must be positive and offset below it")]
    BadStride,
}

/// A total computable bit rule with a known worst-case cost per cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratedRule {
    /// Pseudo-random bits from a seeded mixer.
    Random { seed: u64 },
    /// Parity of the number of 1-bits of the cell index.
    ThueMorse,
    /// `inner[c / stride]` at cells `c` congruent to `offset`, 0 elsewhere.
    Strided {
        inner: Box<RealTape>,
        stride: usize,
        offset: usize,
    },
}

impl GeneratedRule {
    pub fn name(&self) -> String {
        match self {
            GeneratedRule::Random { seed } => format!("random({seed})"),
            GeneratedRule::ThueMorse => "thue-morse".into(),
            GeneratedRule::Strided { stride, offset, .. } => format!("strided({stride},{offset})"),
        }
    }

    /// Worst-case number of elementary steps to evaluate one cell.
    pub fn max_steps(&self) -> u64 {
        match self {
            GeneratedRule::Random { .. } => 1,
            GeneratedRule::ThueMorse => 64,
            GeneratedRule::Strided { inner, .. } => 1 + inner.max_read_steps(),
        }
    }

    fn eval(&self, cell: usize, steps: &mut u64) -> bool {
        match self {
            GeneratedRule::Random { seed } => {
                *steps += 1;
                splitmix64(seed ^ splitmix64(cell as u64)) & 1 == 1
            }
            GeneratedRule::ThueMorse => {
                let mut n = cell as u64;
                let mut parity = false;
                while n != 0 {
                    *steps += 1;
                    parity ^= n & 1 == 1;
                    n >>= 1;
                }
                parity
            }
            GeneratedRule::Strided {
                inner,
                stride,
                offset,
            } => {
                *steps += 1;
                if cell % stride == *offset {
                    inner.read_counting(cell / stride, steps)
                } else {
                    false
                }
            }
        }
    }
}

pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// An input real: an element of Cantor space that can be read cell by cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealTape {
    /// Finitely many 1s.
    FinSupport(BTreeSet<usize>),
    /// `prefix` followed by `period` repeated forever.
    EventuallyPeriodic {
        prefix: Vec<bool>,
        period: Vec<bool>,
    },
    /// Cells computed by a rule; `bound` is the declared per-cell step bound.
    Generated { rule: GeneratedRule, bound: u64 },
}

impl RealTape {
    pub fn zero() -> Self {
        RealTape::FinSupport(BTreeSet::new())
    }

    pub fn fin_support<I: IntoIterator<Item = usize>>(cells: I) -> Self {
        RealTape::FinSupport(cells.into_iter().collect())
    }

    /// Finitely supported tape from a bit string like `"0110"`.
    pub fn from_bits(bits: &[bool]) -> Self {
        Self::fin_support(bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    pub fn eventually_periodic(prefix: Vec<bool>, period: Vec<bool>) -> Result<Self, TapeError> {
        if period.is_empty() {
            return Err(TapeError::EmptyPeriod);
        }
        Ok(RealTape::EventuallyPeriodic { prefix, period })
    }

    pub fn generated(rule: GeneratedRule, bound: u64) -> Result<Self, TapeError> {
        let needed = rule.max_steps();
        if needed > bound {
            return Err(TapeError::BoundTooSmall {
                rule: rule.name(),
                needed,
                bound,
            });
        }
        Ok(RealTape::Generated { rule, bound })
    }

    /// Spreads `inner` so that its cell `c` sits at `stride * c + offset`.
    pub fn strided(inner: RealTape, stride: usize, offset: usize) -> Result<Self, TapeError> {
        if stride == 0 || offset >= stride {
            return Err(TapeError::BadStride);
        }
        let rule = GeneratedRule::Strided {
            inner: Box::new(inner),
            stride,
            offset,
        };
        let bound = rule.max_steps();
        Self::generated(rule, bound)
    }

    fn max_read_steps(&self) -> u64 {
        match self {
            RealTape::Generated { bound, .. } => *bound,
            _ => 1,
        }
    }

    fn read_counting(&self, cell: usize, steps: &mut u64) -> bool {
        match self {
            RealTape::FinSupport(ones) => {
                *steps += 1;
                ones.contains(&cell)
            }
            RealTape::EventuallyPeriodic { prefix, period } => {
                *steps += 1;
                match prefix.get(cell) {
                    Some(&b) => b,
                    None => period[(cell - prefix.len()) % period.len()],
                }
            }
            RealTape::Generated { rule, .. } => rule.eval(cell, steps),
        }
    }

    pub fn read(&self, cell: usize) -> bool {
        let mut steps = 0;
        let bit = self.read_counting(cell, &mut steps);
        debug_assert!(steps <= self.max_read_steps());
        bit
    }

    /// The first `n` cells.
    pub fn prefix_bits(&self, n: usize) -> Vec<bool> {
        (0..n).map(|c| self.read(c)).collect()
    }
}

impl Default for RealTape {
    fn default() -> Self {
        Self::zero()
    }
}

/// Per-run reader that memoizes generated cells.
#[derive(Debug)]
pub struct InputReader<'a> {
    tape: &'a RealTape,
    memo: HashMap<usize, bool>,
}

impl<'a> InputReader<'a> {
    pub fn new(tape: &'a RealTape) -> Self {
        InputReader {
            tape,
            memo: HashMap::new(),
        }
    }

    #[inline]
    pub fn read(&mut self, cell: usize) -> bool {
        match self.tape {
            RealTape::Generated { .. } => {
                let tape = self.tape;
                *self.memo.entry(cell).or_insert_with(|| tape.read(cell))
            }
            t => t.read(cell),
        }
    }

    pub fn tape(&self) -> &'a RealTape {
        self.tape
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlay_stays_canonical() {
        let mut a = Overlay::new();
        a.set(3, true);
        a.set(200, true);
        a.set(200, false);
        assert_eq!(a, Overlay::from_cells([3]));
        a.set(3, false);
        assert_eq!(a, Overlay::new());
        assert!(a.is_empty());
    }

    #[test]
    fn overlay_set_ops() {
        let mut a = Overlay::from_cells([1, 2, 70]);
        let b = Overlay::from_cells([2, 70, 300]);
        let mut u = a.clone();
        u.union_with(&b);
        assert_eq!(u.ones().collect::<Vec<_>>(), vec![1, 2, 70, 300]);
        a.intersect_with(&b);
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![2, 70]);
        assert!(a.is_subset(&b));
        assert!(!b.is_subset(&a));
    }

    #[test]
    fn periodic_reads() {
        let t = RealTape::eventually_periodic(vec![true, false], vec![false, true, true]).unwrap();
        assert_eq!(
            t.prefix_bits(8),
            vec![true, false, false, true, true, false, true, true]
        );
        assert!(RealTape::eventually_periodic(vec![], vec![]).is_err());
    }

    #[test]
    fn generated_bound_is_checked_at_construction() {
        assert!(RealTape::generated(GeneratedRule::ThueMorse, 10).is_err());
        let t = RealTape::generated(GeneratedRule::ThueMorse, 64).unwrap();
        assert_eq!(
            t.prefix_bits(8),
            vec![false, true, true, false, true, false, false, true]
        );
    }

    #[test]
    fn strided_spreads_cells() {
        let inner = RealTape::fin_support([0, 2]);
        let t = RealTape::strided(inner, 3, 1).unwrap();
        let ones: Vec<_> = (0..12).filter(|&c| t.read(c)).collect();
        assert_eq!(ones, vec![1, 7]);
        assert!(RealTape::strided(RealTape::zero(), 2, 2).is_err());
    }

    #[test]
    fn memoized_reader_matches_direct_reads() {
        let t = RealTape::generated(GeneratedRule::Random { seed: 9 }, 1).unwrap();
        let mut r = InputReader::new(&t);
        for c in [5, 1, 5, 900, 1] {
            assert_eq!(r.read(c), t.read(c));
        }
    }
}
