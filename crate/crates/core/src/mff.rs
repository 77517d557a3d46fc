//! Adjacency graph of the multiplicity-flow network.
//!
//! Vertex `(i, p)` means types `0..i` have been decided with total weight `p`.
//! An arc `(p, m)` of type `i` takes `m ≥ 1` units of type `i` from `(i, p)` to
//! `(i + 1, p + m·w_i)`. Only arcs on some source-to-sink path are kept, so
//! the paths are exactly the full patterns. Arcs of each type are stored in
//! increasing `p`.

use std::fmt::Write as _;

use crate::instance::{Instance, Weight};
use crate::subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub p: u32,
    pub m: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjGraph {
    capacity: Weight,
    weights: Vec<Weight>,
    adj: Vec<Vec<Arc>>,
}

impl AdjGraph {
    /// Forward pass over all capacities, then a backward filter.
    pub fn build(inst: &Instance) -> Self {
        let cap = inst.capacity() as usize;
        let weights = inst.weights();
        let mut adj: Vec<Vec<Arc>> = Vec::with_capacity(weights.len());
        let mut fwd = vec![false; cap + 1];
        fwd[0] = true;
        for it in inst.items() {
            let w = it.weight as usize;
            let old = fwd.clone();
            let mut list = Vec::new();
            for p in (0..=cap - w).rev() {
                if !old[p] {
                    continue;
                }
                let max_m = it.demand.min(((cap - p) / w) as u64);
                for m in 1..=max_m {
                    list.push(Arc { p: p as u32, m: m as u32 });
                    fwd[p + m as usize * w] = true;
                }
            }
            list.reverse();
            adj.push(list);
        }
        let mut g = Self {
            capacity: inst.capacity(),
            weights,
            adj,
        };
        g.backward_filter(None);
        g
    }

    /// Drops arcs invalidated by reduced demands. Runs in O(|Adj| + W).
    pub fn prune(&self, demands: &[u64]) -> Self {
        assert_eq!(demands.len(), self.weights.len());
        let cap = self.capacity as usize;
        let mut fwd = vec![false; cap + 1];
        fwd[0] = true;
        let mut adj = Vec::with_capacity(self.adj.len());
        let mut pending = Vec::new();
        for (i, list) in self.adj.iter().enumerate() {
            let w = self.weights[i] as usize;
            let mut kept = Vec::with_capacity(list.len());
            if demands[i] > 0 {
                for &a in list {
                    if a.m as u64 <= demands[i] && fwd[a.p as usize] {
                        kept.push(a);
                        pending.push(a.p as usize + a.m as usize * w);
                    }
                }
            }
            for q in pending.drain(..) {
                fwd[q] = true;
            }
            adj.push(kept);
        }
        let mut g = Self {
            capacity: self.capacity,
            weights: self.weights.clone(),
            adj,
        };
        g.backward_filter(Some(demands));
        g
    }

    fn backward_filter(&mut self, demands: Option<&[u64]>) {
        let cap = self.capacity as usize;
        let mut bwd = vec![false; cap + 1];
        bwd[cap] = true;
        let mut pending = Vec::new();
        for i in (0..self.adj.len()).rev() {
            let w = self.weights[i] as usize;
            let limit = demands.map_or(u64::MAX, |d| d[i]);
            self.adj[i].retain(|a| {
                let keep = a.m as u64 <= limit && bwd[a.p as usize + a.m as usize * w];
                if keep {
                    pending.push(a.p as usize);
                }
                keep
            });
            for p in pending.drain(..) {
                bwd[p] = true;
            }
        }
    }

    pub fn capacity(&self) -> Weight {
        self.capacity
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn arcs(&self, ty: usize) -> &[Arc] {
        &self.adj[ty]
    }

    pub fn num_types(&self) -> usize {
        self.adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_arc(&self, ty: usize, p: u32, m: u32) -> bool {
        self.adj[ty].binary_search(&Arc { p, m }).is_ok()
    }

    /// Whether some multiset of units sums to `target`, using at most
    /// `demands[i] - exclusions[i]` units of each type. `demands` must not
    /// exceed the demands the graph was built or pruned with.
    ///
    /// When `W - target` is the weight of a type heavier than W/2, every such
    /// multiset completes a full pattern headed by that type, so the graph
    /// answers the query; otherwise a direct subset-sum check is used.
    pub fn reach_excluding(&self, demands: &[u64], target: Weight, exclusions: &[(usize, u64)]) -> bool {
        if target == 0 {
            return true;
        }
        if target < 0 || target > self.capacity {
            return false;
        }
        let mut avail = demands.to_vec();
        for &(t, c) in exclusions {
            avail[t] = avail[t].saturating_sub(c);
        }
        let head = self.capacity - target;
        if 2 * head > self.capacity {
            if let Ok(q) = self.weights.binary_search_by(|w| head.cmp(w)) {
                if demands[q] > 0 {
                    return self.has_arc(q, 0, 1) && self.backward_reaches(q + 1, &avail, head as usize);
                }
            }
        }
        let items: Vec<(Weight, u64)> = self.weights.iter().copied().zip(avail).collect();
        subset::can_reach(&items, target)
    }

    /// Backward reachability from W over arcs of types `from..`, bounded by
    /// `avail`; reports whether position `goal` is reached.
    fn backward_reaches(&self, from: usize, avail: &[u64], goal: usize) -> bool {
        let cap = self.capacity as usize;
        let mut bwd = vec![false; cap + 1];
        bwd[cap] = true;
        let mut pending = Vec::new();
        for i in (from..self.adj.len()).rev() {
            if avail[i] == 0 {
                continue;
            }
            let w = self.weights[i] as usize;
            for a in &self.adj[i] {
                let p = a.p as usize;
                if p >= goal && a.m as u64 <= avail[i] && bwd[p + a.m as usize * w] {
                    pending.push(p);
                }
            }
            for p in pending.drain(..) {
                bwd[p] = true;
            }
            if bwd[goal] {
                return true;
            }
        }
        bwd[goal]
    }

    /// One `weight p m` line per arc.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, list) in self.adj.iter().enumerate() {
            for a in list {
                let _ = writeln!(out, "{} {} {}", self.weights[i], a.p, a.m);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Instance {
        Instance::normalize([(7, 1), (5, 1), (3, 1), (2, 1)], 10).unwrap()
    }

    fn arcs(g: &AdjGraph, w: Weight) -> Vec<(u32, u32)> {
        let i = g.weights().iter().position(|&x| x == w).unwrap();
        g.arcs(i).iter().map(|a| (a.p, a.m)).collect()
    }

    #[test]
    fn builds_example() {
        let g = AdjGraph::build(&example());
        assert_eq!(arcs(&g, 7), vec![(0, 1)]);
        assert_eq!(arcs(&g, 5), vec![(0, 1)]);
        assert_eq!(arcs(&g, 3), vec![(5, 1), (7, 1)]);
        assert_eq!(arcs(&g, 2), vec![(8, 1)]);
        assert_eq!(g.arc_count(), 5);
    }

    #[test]
    fn single_type_uses_multiplicity() {
        let g = AdjGraph::build(&Instance::normalize([(5, 2)], 10).unwrap());
        assert_eq!(arcs(&g, 5), vec![(0, 2)]);
    }

    #[test]
    fn no_full_pattern_gives_empty_graph() {
        let g = AdjGraph::build(&Instance::normalize([(4, 1), (3, 1)], 10).unwrap());
        assert_eq!(g.arc_count(), 0);
    }

    #[test]
    fn prune_cases() {
        let g = AdjGraph::build(&example());
        assert_eq!(g.prune(&[1, 1, 1, 1]), g);
        assert_eq!(g.prune(&[1, 1, 0, 1]).arc_count(), 0);
        let p = g.prune(&[1, 1, 1, 0]);
        assert_eq!(arcs(&p, 7), vec![(0, 1)]);
        assert_eq!(arcs(&p, 3), vec![(7, 1)]);
        assert_eq!(p.arc_count(), 2);
    }

    #[test]
    fn reach_queries() {
        let g = AdjGraph::build(&example());
        let d = [1, 1, 1, 1];
        assert!(g.reach_excluding(&d, 3, &[]));
        assert!(!g.reach_excluding(&d, 3, &[(2, 1)]));
        assert!(g.reach_excluding(&d, 0, &[(0, 1), (1, 1)]));
        // W - 5 = 5 goes through the fallback: 3 + 2.
        assert!(g.reach_excluding(&d, 5, &[]));
        assert!(!g.reach_excluding(&d, 5, &[(1, 1), (2, 1), (3, 1)]));
    }

    #[test]
    fn dump_lines() {
        let g = AdjGraph::build(&example());
        assert_eq!(g.dump(), "7 0 1\n5 0 1\n3 5 1\n3 7 1\n2 8 1\n");
    }
}
