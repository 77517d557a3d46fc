//! Demand-bounded subset sums over a bitset.

use crate::instance::Weight;

/// Bitset of all sums in `0..=limit` reachable with at most `count` copies of
/// each weight. Bit `s` is set iff `s` is reachable.
pub fn reachable_sums(items: &[(Weight, u64)], limit: Weight) -> SumSet {
    let mut set = SumSet::zero(limit);
    for &(w, count) in items {
        if w <= 0 || w > limit {
            continue;
        }
        // Binary splitting: copies 1, 2, 4, ... then the remainder.
        let mut left = count.min((limit / w) as u64);
        let mut chunk = 1u64;
        while left > 0 {
            let take = chunk.min(left);
            set.or_shifted(take as usize * w as usize);
            left -= take;
            chunk *= 2;
        }
    }
    set
}

pub fn can_reach(items: &[(Weight, u64)], target: Weight) -> bool {
    if target < 0 {
        return false;
    }
    reachable_sums(items, target).contains(target)
}

#[derive(Clone, Debug)]
pub struct SumSet {
    bits: Vec<u64>,
    limit: usize,
}

impl SumSet {
    fn zero(limit: Weight) -> Self {
        let limit = limit.max(0) as usize;
        let mut bits = vec![0u64; limit / 64 + 1];
        bits[0] = 1;
        Self { bits, limit }
    }

    pub fn contains(&self, s: Weight) -> bool {
        if s < 0 || s as usize > self.limit {
            return false;
        }
        let s = s as usize;
        self.bits[s / 64] >> (s % 64) & 1 == 1
    }

    /// self |= self << shift, truncated at `limit`.
    fn or_shifted(&mut self, shift: usize) {
        if shift > self.limit {
            return;
        }
        let words = shift / 64;
        let bits = shift % 64;
        for i in (words..self.bits.len()).rev() {
            let src = i - words;
            let mut v = self.bits[src] << bits;
            if bits > 0 && src > 0 {
                v |= self.bits[src - 1] >> (64 - bits);
            }
            self.bits[i] |= v;
        }
        let tail = (self.limit + 1) % 64;
        if tail != 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= (1u64 << tail) - 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(items: &[(Weight, u64)], limit: Weight) -> Vec<bool> {
        let mut r = vec![false; limit as usize + 1];
        r[0] = true;
        for &(w, c) in items {
            for _ in 0..c {
                for s in (0..=limit as usize).rev() {
                    if r[s] && s + w as usize <= limit as usize {
                        r[s + w as usize] = true;
                    }
                }
            }
        }
        r
    }

    #[test]
    fn matches_unit_expansion() {
        let items = [(7, 3), (13, 2), (64, 1), (65, 2), (1, 4)];
        for limit in [0, 5, 63, 64, 65, 130, 200] {
            let set = reachable_sums(&items, limit);
            let b = brute(&items, limit);
            for s in 0..=limit {
                assert_eq!(set.contains(s), b[s as usize], "limit {limit} sum {s}");
            }
        }
    }

    #[test]
    fn simple_queries() {
        assert!(can_reach(&[], 0));
        assert!(!can_reach(&[(3, 1)], 6));
        assert!(can_reach(&[(3, 2)], 6));
        assert!(!can_reach(&[(3, 2)], -1));
    }
}
