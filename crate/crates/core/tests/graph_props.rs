mod common;

use std::collections::BTreeSet;

use aiani_core::ani::{fix_full_pairs, mandatory_dp, MandatorySet};
use aiani_core::exact::find_perfect_packing;
use aiani_core::mff::AdjGraph;
use aiani_core::{Instance, Weight};
use common::*;
use proptest::prelude::*;

fn as_ref_set(s: &MandatorySet) -> RefSet {
    s.weights().map(|w| w.iter().copied().collect())
}

/// Some perfect packing puts a unit of `wa` and a unit of `wb` in one bin.
fn co_packed(inst: &Instance, wa: Weight, wb: Weight) -> bool {
    let a = inst.index_of(wa).unwrap();
    let b = inst.index_of(wb).unwrap();
    full_patterns(inst).into_iter().any(|p| {
        let need_b = if a == b { 2 } else { 1 };
        if p[a] == 0 || p[b] < need_b {
            return false;
        }
        let rest: Vec<u64> = inst.demands().iter().zip(&p).map(|(d, c)| d - c).collect();
        let r = inst.with_demands(&rest);
        r.is_empty() || find_perfect_packing(&r, r.lower_bound()).unwrap().is_some()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn paths_are_full_patterns(inst in instance_strategy(60, 12)) {
        let g = AdjGraph::build(&inst);
        let paths = graph_paths(&g);
        let set: BTreeSet<Vec<u64>> = paths.iter().cloned().collect();
        prop_assert_eq!(set.len(), paths.len(), "duplicate paths");
        prop_assert_eq!(set, full_patterns(&inst));
    }

    #[test]
    fn prune_equals_rebuild(inst in instance_strategy(60, 14), cuts in prop::collection::vec(0..=3u64, 1..14)) {
        let g = AdjGraph::build(&inst);
        let d: Vec<u64> = inst.demands().iter().enumerate().map(|(i, &d)| d.saturating_sub(cuts[i % cuts.len()])).collect();
        let pruned = g.prune(&d);
        prop_assert!(pruned.arc_count() <= g.arc_count());
        let reduced = inst.with_demands(&d);
        let fresh = AdjGraph::build(&reduced);
        for (t, &w) in inst.weights().iter().enumerate() {
            match reduced.index_of(w) {
                Some(r) => prop_assert_eq!(pruned.arcs(t), fresh.arcs(r)),
                None => prop_assert!(pruned.arcs(t).is_empty()),
            }
        }
    }

    #[test]
    fn reach_excluding_matches_enumeration(
        inst in instance_strategy(60, 14),
        target in 0..=60i64,
        ex in prop::collection::vec((any::<prop::sample::Index>(), 1..=2u64), 0..3),
    ) {
        let g = AdjGraph::build(&inst);
        let d = inst.demands();
        let target = target.min(inst.capacity());
        let ex: Vec<(usize, u64)> = ex.into_iter().map(|(i, c)| (i.index(d.len()), c)).collect();
        let mut avail = d.clone();
        for &(t, c) in &ex {
            avail[t] = avail[t].saturating_sub(c);
        }
        prop_assert_eq!(g.reach_excluding(&d, target, &ex), brute_reach(&inst.weights(), &avail, target));
    }

    #[test]
    fn heavy_head_reach_matches_enumeration(inst in instance_strategy(60, 14), pick in any::<prop::sample::Index>()) {
        // Exercises the graph path: target = W - w for a type heavier than W/2.
        let heavy: Vec<usize> = (0..inst.num_types()).filter(|&t| 2 * inst.weights()[t] > inst.capacity()).collect();
        prop_assume!(!heavy.is_empty());
        let a = heavy[pick.index(heavy.len())];
        let g = AdjGraph::build(&inst);
        let d = inst.demands();
        let target = inst.capacity() - inst.weights()[a];
        let lighter: Vec<usize> = (a + 1..d.len()).collect();
        for &b in &lighter {
            let ex = [(a, 1), (b, 1)];
            let mut avail = d.clone();
            avail[a] -= 1;
            avail[b] -= 1;
            prop_assert_eq!(g.reach_excluding(&d, target, &ex), brute_reach(&inst.weights(), &avail, target));
        }
    }

    #[test]
    fn dp_matches_reference(inst in instance_strategy(200, 14)) {
        let g = AdjGraph::build(&inst);
        let table = mandatory_dp(&g, &inst.demands());
        let expected = expected_graph_dp(&inst);
        for p in 0..=inst.capacity() {
            prop_assert_eq!(as_ref_set(table.get(p)), expected[p as usize].clone(), "capacity {}", p);
        }
    }

    #[test]
    fn dp_after_prune_matches_reference(inst in instance_strategy(100, 14), cuts in prop::collection::vec(0..=2u64, 1..14)) {
        let d: Vec<u64> = inst.demands().iter().enumerate().map(|(i, &d)| d.saturating_sub(cuts[i % cuts.len()])).collect();
        let reduced = inst.with_demands(&d);
        prop_assume!(!reduced.is_empty());
        let g = AdjGraph::build(&inst).prune(&d);
        let table = mandatory_dp(&g, &d);
        let expected = expected_graph_dp(&reduced);
        for p in 0..=inst.capacity() {
            prop_assert_eq!(as_ref_set(table.get(p)), expected[p as usize].clone(), "capacity {}", p);
        }
    }

    #[test]
    fn mandatory_weight_is_co_packed(inst in perfect_strategy(24, 3)) {
        // Heads are only read after full pairs are fixed; a W/2 head with a
        // second unit would otherwise miss the completion by its twin.
        let mut d = inst.demands();
        fix_full_pairs(&inst.weights(), &mut d, inst.capacity());
        let inst = inst.with_demands(&d);
        prop_assume!(!inst.is_empty());
        let g = AdjGraph::build(&inst);
        let table = mandatory_dp(&g, &inst.demands());
        for &wa in inst.weights().iter().filter(|&&w| 2 * w >= inst.capacity()) {
            let Some(set) = table.get(wa).weights() else { continue };
            for &wb in set {
                let avail = if wb == wa { inst.demand_of(wa) >= 2 } else { inst.demand_of(wb) >= 1 };
                if avail {
                    prop_assert!(co_packed(&inst, wa, wb), "w_a={} w_b={}", wa, wb);
                }
            }
        }
    }
}

#[test]
fn half_weight_twin_needs_pair_fixing() {
    let inst = Instance::normalize([(7, 1), (5, 1), (4, 2), (3, 1), (1, 1)], 8).unwrap();
    let table = mandatory_dp(&AdjGraph::build(&inst), &inst.demands());
    // Only lighter types are seen from the head, so the 4+4 bin is missed.
    assert_eq!(table.get(4).weights().map(|w| w.to_vec()), Some(vec![1, 3]));
    let mut d = inst.demands();
    let pairs = fix_full_pairs(&inst.weights(), &mut d, 8);
    assert!(pairs.iter().any(|(p, _)| p.count_of(4) == 2));
}

#[test]
fn path_example() {
    let inst = Instance::normalize([(7, 1), (5, 1), (3, 1), (2, 1)], 10).unwrap();
    let g = AdjGraph::build(&inst);
    let paths: BTreeSet<Vec<u64>> = graph_paths(&g).into_iter().collect();
    assert_eq!(paths, BTreeSet::from([vec![1, 0, 1, 0], vec![0, 1, 1, 1]]));
}
