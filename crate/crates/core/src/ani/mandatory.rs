//! Mandatory-weight sets computed over the adjacency graph.

use smallvec::SmallVec;

use crate::instance::Weight;
use crate::mff::AdjGraph;

/// Weights every completion from a partial capacity must cover, or the
/// infeasible state when no completion exists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MandatorySet {
    Infeasible,
    /// Ascending, no duplicates.
    Feasible(SmallVec<[Weight; 4]>),
}

impl MandatorySet {
    pub fn empty() -> Self {
        MandatorySet::Feasible(SmallVec::new())
    }

    pub fn from_weights(ws: &[Weight]) -> Self {
        let mut v: SmallVec<[Weight; 4]> = ws.iter().copied().collect();
        v.sort_unstable();
        v.dedup();
        MandatorySet::Feasible(v)
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, MandatorySet::Feasible(_))
    }

    pub fn weights(&self) -> Option<&[Weight]> {
        match self {
            MandatorySet::Infeasible => None,
            MandatorySet::Feasible(v) => Some(v),
        }
    }

    pub fn contains(&self, w: Weight) -> bool {
        self.weights().is_some_and(|v| v.binary_search(&w).is_ok())
    }

    /// `self ∪ {w}`; stays infeasible when infeasible.
    pub fn with(&self, w: Weight) -> Self {
        match self {
            MandatorySet::Infeasible => MandatorySet::Infeasible,
            MandatorySet::Feasible(v) => {
                let mut out = v.clone();
                if let Err(pos) = out.binary_search(&w) {
                    out.insert(pos, w);
                }
                MandatorySet::Feasible(out)
            }
        }
    }

    /// Intersection where the infeasible state is the identity.
    pub fn intersect(&self, other: &Self) -> Self {
        match (self, other) {
            (MandatorySet::Infeasible, x) | (x, MandatorySet::Infeasible) => x.clone(),
            (MandatorySet::Feasible(a), MandatorySet::Feasible(b)) => {
                let mut out = SmallVec::new();
                let (mut i, mut j) = (0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            out.push(a[i]);
                            i += 1;
                            j += 1;
                        }
                    }
                }
                MandatorySet::Feasible(out)
            }
        }
    }
}

/// `dp[p]` for every partial capacity `p` in `0..=W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MandatoryTable {
    pub dp: Vec<MandatorySet>,
}

impl MandatoryTable {
    pub fn get(&self, p: Weight) -> &MandatorySet {
        &self.dp[p as usize]
    }
}

/// Processes types from lightest to heaviest, updating in place. Arcs are in
/// increasing `p`, so each read at `p + m·w` precedes any write there by the
/// same type.
pub fn mandatory_dp(graph: &AdjGraph, demands: &[u64]) -> MandatoryTable {
    let cap = graph.capacity();
    let mut dp = vec![MandatorySet::Infeasible; cap as usize + 1];
    dp[cap as usize] = MandatorySet::empty();
    for i in (0..graph.num_types()).rev() {
        let d = demands[i];
        if d == 0 {
            continue;
        }
        let w = graph.weights()[i];
        for a in graph.arcs(i) {
            if a.m as u64 > d {
                continue;
            }
            let p = a.p as usize;
            let q = p + a.m as usize * w as usize;
            if !dp[q].is_feasible() {
                continue;
            }
            let via = dp[q].with(w);
            dp[p] = if !dp[p].is_feasible() || p as Weight + w == cap {
                via
            } else {
                dp[p].intersect(&via)
            };
        }
    }
    MandatoryTable { dp }
}
