//! Brute-force oracles and random instance sources shared by the test targets.
#![allow(dead_code)]

use std::collections::BTreeSet;

use aiani_core::mff::AdjGraph;
use aiani_core::{Instance, Weight};
use proptest::prelude::*;
use rand::Rng;

/// Minimum bins by DP over subsets of units: best `(bins, load of last bin)`.
pub fn brute_min_bins(units: &[Weight], cap: Weight) -> u64 {
    let n = units.len();
    assert!(n <= 16, "oracle limited to 16 units");
    let full = (1usize << n) - 1;
    let mut best = vec![(u64::MAX, 0 as Weight); 1 << n];
    best[0] = (0, cap);
    for mask in 0..=full {
        let (bins, load) = best[mask];
        if bins == u64::MAX {
            continue;
        }
        for (j, &w) in units.iter().enumerate() {
            if mask >> j & 1 == 1 {
                continue;
            }
            let next = if load + w <= cap { (bins, load + w) } else { (bins + 1, w) };
            let slot = &mut best[mask | 1 << j];
            if next < *slot {
                *slot = next;
            }
        }
    }
    best[full].0
}

pub fn brute_min_bins_inst(inst: &Instance) -> u64 {
    brute_min_bins(&inst.expand(), inst.capacity())
}

/// Count vectors (per type) of every nonempty multiset with load exactly `W`.
pub fn full_patterns(inst: &Instance) -> BTreeSet<Vec<u64>> {
    fn rec(ws: &[Weight], ds: &[u64], i: usize, left: Weight, cur: &mut Vec<u64>, out: &mut BTreeSet<Vec<u64>>) {
        if left == 0 {
            out.insert(cur.clone());
            return;
        }
        if i == ws.len() {
            return;
        }
        for c in 0..=ds[i] {
            let used = c as Weight * ws[i];
            if used > left {
                break;
            }
            cur[i] = c;
            rec(ws, ds, i + 1, left - used, cur, out);
        }
        cur[i] = 0;
    }
    let ws = inst.weights();
    let ds = inst.demands();
    let mut out = BTreeSet::new();
    rec(&ws, &ds, 0, inst.capacity(), &mut vec![0; ws.len()], &mut out);
    out
}

/// Count vectors of every source-to-sink path; duplicates kept.
pub fn graph_paths(g: &AdjGraph) -> Vec<Vec<u64>> {
    fn rec(g: &AdjGraph, from: usize, p: u32, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if p as Weight == g.capacity() {
            out.push(cur.clone());
            return;
        }
        for t in from..g.num_types() {
            for a in g.arcs(t) {
                if a.p == p {
                    cur[t] = a.m as u64;
                    rec(g, t + 1, p + a.m * g.weights()[t] as u32, cur, out);
                    cur[t] = 0;
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(g, 0, 0, &mut vec![0; g.num_types()], &mut out);
    out
}

/// `None` is the infeasible state.
pub type RefSet = Option<BTreeSet<Weight>>;

/// Unit-level mandatory-weight table: row `u` allows units `u..`, heaviest
/// first; row `N` is the base case.
pub fn reference_table(inst: &Instance) -> Vec<Vec<RefSet>> {
    let units = inst.expand();
    let cap = inst.capacity() as usize;
    let n = units.len();
    let mut t = vec![vec![None; cap + 1]; n + 1];
    t[n][cap] = Some(BTreeSet::new());
    for u in (0..n).rev() {
        let wi = units[u] as usize;
        for w in 0..=cap {
            t[u][w] = if w + wi > cap {
                t[u + 1][w].clone()
            } else if w + wi == cap {
                Some(BTreeSet::from([wi as Weight]))
            } else {
                let via = t[u + 1][w + wi].clone().map(|mut s| {
                    s.insert(wi as Weight);
                    s
                });
                match (t[u + 1][w].clone(), via) {
                    (None, x) | (x, None) => x,
                    (Some(a), Some(b)) => Some(a.intersection(&b).copied().collect()),
                }
            };
        }
    }
    t
}

/// Expected final graph value at each capacity: the reference row at the
/// first unit of the first type whose arcs may start at `p`.
pub fn expected_graph_dp(inst: &Instance) -> Vec<RefSet> {
    let table = reference_table(inst);
    let cap = inst.capacity() as usize;
    let ws = inst.weights();
    let ds = inst.demands();
    let n = ws.len();
    let mut first_unit = vec![0usize; n + 1];
    for i in 0..n {
        first_unit[i + 1] = first_unit[i] + ds[i] as usize;
    }
    // reach[i][p]: p reachable with types 0..i.
    let mut reach = vec![vec![false; cap + 1]; n + 1];
    reach[0][0] = true;
    for i in 0..n {
        let w = ws[i] as usize;
        for p in 0..=cap {
            if !reach[i][p] {
                continue;
            }
            for m in 0..=ds[i] as usize {
                if p + m * w > cap {
                    break;
                }
                reach[i + 1][p + m * w] = true;
            }
        }
    }
    (0..=cap)
        .map(|p| match (0..=n).find(|&i| reach[i][p]) {
            Some(i) => table[first_unit[i]][p].clone(),
            // The sink is the base case whether or not it is reachable.
            None if p == cap => table[first_unit[n]][p].clone(),
            None => None,
        })
        .collect()
}

/// Whether `target` is a sum of a sub-multiset within `avail`.
pub fn brute_reach(weights: &[Weight], avail: &[u64], target: Weight) -> bool {
    fn rec(ws: &[Weight], av: &[u64], i: usize, left: Weight) -> bool {
        if left == 0 {
            return true;
        }
        if i == ws.len() || left < 0 {
            return false;
        }
        (0..=av[i]).any(|c| {
            let used = c as Weight * ws[i];
            used <= left && rec(ws, av, i + 1, left - used)
        })
    }
    rec(weights, avail, 0, target)
}

/// Random instance with capacity in `2..=max_cap` and at most `max_units` units.
pub fn random_instance<R: Rng>(rng: &mut R, max_cap: Weight, max_units: u64) -> Instance {
    let cap = rng.gen_range(2..=max_cap);
    let units = rng.gen_range(1..=max_units);
    let raw: Vec<(Weight, u64)> = (0..units).map(|_| (rng.gen_range(1..=cap), 1)).collect();
    Instance::normalize(raw, cap).unwrap()
}

/// Units cut from `k` full bins, so a perfect packing exists.
pub fn random_perfect<R: Rng>(rng: &mut R, max_cap: Weight, max_units: u64) -> Instance {
    let cap = rng.gen_range(2..=max_cap);
    let mut raw = Vec::new();
    while (raw.len() as u64) < max_units {
        let mut left = cap;
        let mut bin = Vec::new();
        while left > 0 {
            let w = if rng.gen_bool(0.3) { left } else { rng.gen_range(1..=left) };
            bin.push((w, 1u64));
            left -= w;
        }
        if raw.len() + bin.len() > max_units as usize {
            break;
        }
        raw.extend(bin);
    }
    if raw.is_empty() {
        raw.push((cap, 1));
    }
    Instance::normalize(raw, cap).unwrap()
}

/// A perfect-packing instance with weight moved between two units, keeping
/// the total: often no perfect packing remains.
pub fn random_near_perfect<R: Rng>(rng: &mut R, max_cap: Weight, max_units: u64) -> Instance {
    let base = random_perfect(rng, max_cap, max_units);
    let mut units = base.expand();
    if units.len() >= 2 {
        let i = rng.gen_range(0..units.len());
        let j = (i + rng.gen_range(1..units.len())) % units.len();
        let room = (base.capacity() - units[j]).min(units[i] - 1);
        if room > 0 {
            let delta = rng.gen_range(1..=room);
            units[i] -= delta;
            units[j] += delta;
        }
    }
    Instance::normalize(units.into_iter().map(|w| (w, 1)), base.capacity()).unwrap()
}

/// Proptest source: capacity up to `max_cap`, CSP demands, at most `max_units` units.
pub fn instance_strategy(max_cap: Weight, max_units: u64) -> impl Strategy<Value = Instance> {
    (2..=max_cap).prop_flat_map(move |cap| {
        prop::collection::vec((1..=cap, 1..=3u64), 1..=max_units as usize).prop_map(move |raw| {
            let mut left = max_units;
            let mut kept = Vec::new();
            for (w, d) in raw {
                let d = d.min(left);
                if d == 0 {
                    break;
                }
                left -= d;
                kept.push((w, d));
            }
            Instance::normalize(kept, cap).unwrap()
        })
    })
}

/// Proptest source built from full bins, so `Σw` is a multiple of `W`.
pub fn perfect_strategy(max_cap: Weight, max_bins: usize) -> impl Strategy<Value = Instance> {
    (2..=max_cap).prop_flat_map(move |cap| {
        prop::collection::vec(prop::collection::vec(1..=cap, 1..=4), 1..=max_bins).prop_map(move |bins| {
            let mut raw = Vec::new();
            for cuts in bins {
                // Cut points inside (0, cap) give the unit sizes of one full bin.
                let mut pts: Vec<Weight> = cuts.into_iter().filter(|&c| c < cap).collect();
                pts.sort_unstable();
                pts.dedup();
                let mut prev = 0;
                for p in pts.into_iter().chain([cap]) {
                    raw.push((p - prev, 1));
                    prev = p;
                }
            }
            Instance::normalize(raw, cap).unwrap()
        })
    })
}
