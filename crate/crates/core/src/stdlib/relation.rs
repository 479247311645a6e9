use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::machine::RealTape;

/// A binary relation on a finite support, coded as a real.
///
/// Element `k` of the support sets cell `2k + 2`; a pair `a R b` sets cell
/// `2 * pair(a, b) + 3`, where `pair` is the Cantor pairing. Cells 0 and 1
/// stay 0. Pairs with an endpoint outside the support are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelationCode {
    support: BTreeSet<usize>,
    pairs: BTreeSet<(usize, usize)>,
}

/// Cantor pairing `(a + b)(a + b + 1) / 2 + b`.
pub fn pairing(a: usize, b: usize) -> usize {
    (a + b) * (a + b + 1) / 2 + b
}

pub fn support_cell(k: usize) -> usize {
    2 * k + 2
}

pub fn pair_cell(a: usize, b: usize) -> usize {
    2 * pairing(a, b) + 3
}

impl RelationCode {
    pub fn new<S, P>(support: S, pairs: P) -> Self
    where
        S: IntoIterator<Item = usize>,
        P: IntoIterator<Item = (usize, usize)>,
    {
        let support: BTreeSet<usize> = support.into_iter().collect();
        let pairs = pairs
            .into_iter()
            .filter(|(a, b)| support.contains(a) && support.contains(b))
            .collect();
        RelationCode { support, pairs }
    }

    /// The relation on `{0, ..., n-1}` whose pair `(a, b)` is present iff
    /// bit `a * n + b` of `mask` is set.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let pairs = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| mask >> (a * n + b) & 1 == 1);
        RelationCode::new(0..n, pairs)
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn pairs(&self) -> &BTreeSet<(usize, usize)> {
        &self.pairs
    }

    pub fn relates(&self, a: usize, b: usize) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn cells(&self) -> BTreeSet<usize> {
        self.support
            .iter()
            .map(|&k| support_cell(k))
            .chain(self.pairs.iter().map(|&(a, b)| pair_cell(a, b)))
            .collect()
    }

    pub fn to_tape(&self) -> RealTape {
        RealTape::fin_support(self.cells())
    }

    /// Reads back the relation on the elements below `bound`.
    pub fn decode(tape: &RealTape, bound: usize) -> Self {
        let support: Vec<usize> = (0..bound).filter(|&k| tape.read(support_cell(k))).collect();
        let pairs: Vec<(usize, usize)> = support
            .iter()
            .flat_map(|&a| support.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| tape.read(pair_cell(a, b)))
            .collect();
        RelationCode::new(support, pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_are_disjoint() {
        let mut seen = BTreeSet::new();
        for k in 0..12 {
            assert!(seen.insert(support_cell(k)));
        }
        for a in 0..12 {
            for b in 0..12 {
                assert!(seen.insert(pair_cell(a, b)));
            }
        }
        assert!(!seen.contains(&0) && !seen.contains(&1));
    }

    #[test]
    fn decode_round_trip() {
        let r = RelationCode::new([0, 2, 5], [(0, 2), (2, 5), (5, 5), (1, 0)]);
        assert!(!r.relates(1, 0));
        assert_eq!(RelationCode::decode(&r.to_tape(), 8), r);
        for mask in [0u64, 0b101, 0x1ff, 0x0a5] {
            let r = RelationCode::from_mask(3, mask);
            assert_eq!(RelationCode::decode(&r.to_tape(), 3), r);
        }
    }
}
