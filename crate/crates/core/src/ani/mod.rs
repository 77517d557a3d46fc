//! Reduction pipeline for augmented non-IRUP instances.
//!
//! Patterns that belong to some perfect packing whenever one exists are fixed
//! repeatedly (complementary pairs, then triplets found through mandatory
//! weights). The small residual is then settled exactly: either it packs
//! perfectly, or one extra bin is optimal for the whole instance.

pub mod mandatory;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::exact::{exact_packing, find_perfect_packing_with_cap, DEFAULT_EXACT_CAP};
use crate::instance::{Instance, Weight};
use crate::mff::AdjGraph;
use crate::solution::{verify_solution, Certificate, Pattern, Solution, SolveOutcome};

pub use mandatory::{mandatory_dp, MandatorySet, MandatoryTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FixMode {
    /// Accept a triplet only if its head has no full pattern avoiding it.
    Checked,
    /// Accept every identified triplet.
    Fast,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AniParams {
    pub alpha: u64,
    pub beta: u64,
    /// Largest residual bin count settled exactly.
    pub residual_cap: u64,
    pub mode: FixMode,
    pub merge: bool,
    /// Unit cap for the exact residual routines.
    pub exact_cap: u64,
    pub time_limit: Option<Duration>,
}

impl Default for AniParams {
    fn default() -> Self {
        Self {
            alpha: 15,
            beta: 3,
            residual_cap: 5,
            mode: FixMode::Checked,
            merge: false,
            exact_cap: DEFAULT_EXACT_CAP,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AniStats {
    /// Mandatory-weight DP runs.
    pub iterations: u64,
    pub fixed_triplets: u64,
    /// Bins fixed as complementary pairs or single full items.
    pub fixed_pairs: u64,
    pub merges: u64,
    /// Units left after reduction.
    pub residual_size: u64,
    /// Mean over DP runs of `W · Σd / |Adj|`.
    pub dp_ratio: f64,
    /// Some large type lies in no full pattern of the residual.
    pub obstruction: bool,
    pub timed_out: bool,
    /// Seconds.
    pub wall_time: f64,
}

/// Fixed patterns plus what is left to pack.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub fixed: Vec<(Pattern, u64)>,
    pub residual: Instance,
    pub stats: AniStats,
    composites: Composites,
}

impl Reduction {
    /// Completes a packing of the residual into one of the whole instance.
    pub fn assemble(&self, residual_sol: Solution) -> Solution {
        let sol = Solution::from_grouped(self.fixed.iter().cloned()).merge(residual_sol);
        self.composites.expand(sol)
    }
}

/// Merged units, keyed by their total weight, with their constituents.
#[derive(Clone, Debug, Default)]
struct Composites {
    by_weight: BTreeMap<Weight, Vec<(Weight, Weight)>>,
}

impl Composites {
    fn add(&mut self, a: Weight, b: Weight) {
        self.by_weight.entry(a + b).or_default().push((a, b));
    }

    /// Replaces composite units by their parts, heaviest first, so that a
    /// composite built from another is split before its part.
    fn expand(&self, sol: Solution) -> Solution {
        if self.by_weight.is_empty() {
            return sol;
        }
        let mut bins: Vec<Vec<Weight>> = Vec::new();
        for (p, m) in &sol.patterns {
            for _ in 0..*m {
                bins.push(p.units());
            }
        }
        for (&w, parts) in self.by_weight.iter().rev() {
            let mut left = parts.iter();
            'outer: for bin in bins.iter_mut() {
                while let Some(pos) = bin.iter().position(|&x| x == w) {
                    let Some(&(a, b)) = left.next() else { break 'outer };
                    bin.swap_remove(pos);
                    bin.push(a);
                    bin.push(b);
                }
            }
        }
        Solution::from_patterns(bins.iter().map(|b| Pattern::from_units(b)))
    }
}

/// Fixes every complementary pair `w_e + w_f = W` as often as demands allow,
/// and every unit of weight `W` in its own bin. Demands are updated in place.
pub fn fix_full_pairs(weights: &[Weight], demands: &mut [u64], capacity: Weight) -> Vec<(Pattern, u64)> {
    let mut out = Vec::new();
    for e in 0..weights.len() {
        let we = weights[e];
        if demands[e] == 0 {
            continue;
        }
        if we == capacity {
            out.push((Pattern::new([(we, 1)]), demands[e]));
            demands[e] = 0;
            continue;
        }
        let wf = capacity - we;
        if wf > we {
            continue;
        }
        if wf == we {
            let m = demands[e] / 2;
            if m > 0 {
                out.push((Pattern::new([(we, 2)]), m));
                demands[e] -= 2 * m;
            }
            continue;
        }
        if let Ok(f) = weights.binary_search_by(|w| wf.cmp(w)) {
            let m = demands[e].min(demands[f]);
            if m > 0 {
                out.push((Pattern::new([(we, 1), (wf, 1)]), m));
                demands[e] -= m;
                demands[f] -= m;
            }
        }
    }
    out
}

/// Output of reading the mandatory table at each large weight.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Identification {
    /// Type-index triples: the head, then the other two types in index order.
    pub triplets: Vec<[usize; 3]>,
    /// `(a, c)`: head and a type whose weight is mandatory for it.
    pub mergeable: Vec<(usize, usize)>,
    /// Large types with demand that lie in no full pattern.
    pub obstructions: Vec<usize>,
}

/// For each large type with demand, heaviest first, reads `dp[w_a]`.
pub fn identify_triplets(table: &MandatoryTable, weights: &[Weight], demands: &[u64], capacity: Weight) -> Identification {
    let mut out = Identification::default();
    let find = |w: Weight| weights.binary_search_by(|x| w.cmp(x)).ok();
    for a in 0..weights.len() {
        let wa = weights[a];
        if demands[a] == 0 || 2 * wa < capacity || wa == capacity {
            continue;
        }
        let Some(set) = table.get(wa).weights() else {
            out.obstructions.push(a);
            continue;
        };
        for &wc in set {
            let Some(c) = find(wc) else { continue };
            let mut need = vec![(a, 1u64)];
            bump(&mut need, c);
            if need.iter().all(|&(t, k)| demands[t] >= k) {
                out.mergeable.push((a, c));
            }
            let wb = capacity - wa - wc;
            if wb < 1 {
                continue;
            }
            let Some(b) = find(wb) else { continue };
            bump(&mut need, b);
            let t = [a, b.min(c), b.max(c)];
            if need.iter().all(|&(t, k)| demands[t] >= k) && !out.triplets.contains(&t) {
                out.triplets.push(t);
            }
        }
    }
    out
}

fn bump(need: &mut Vec<(usize, u64)>, t: usize) {
    match need.iter_mut().find(|(x, _)| *x == t) {
        Some((_, k)) => *k += 1,
        None => need.push((t, 1)),
    }
}

/// Removes one unit each of the triplet's types if they are available and,
/// in checked mode, the head has no full pattern avoiding the three units.
pub fn fix_triplet(graph: &AdjGraph, demands: &mut [u64], t: [usize; 3], mode: FixMode) -> bool {
    let mut need = Vec::with_capacity(3);
    for x in t {
        bump(&mut need, x);
    }
    if need.iter().any(|&(x, k)| demands[x] < k) {
        return false;
    }
    if mode == FixMode::Checked {
        let target = graph.capacity() - graph.weights()[t[0]];
        if graph.reach_excluding(demands, target, &need) {
            return false;
        }
    }
    for (x, k) in need {
        demands[x] -= k;
    }
    true
}

/// Runs pair fixing and triplet rounds until nothing is fixed, the residual
/// fits in `beta` bins, or it has at most `alpha` units.
pub fn reduce(inst: &Instance, params: &AniParams) -> Reduction {
    let start = Instant::now();
    let deadline = params.time_limit.map(|t| start + t);
    let capacity = inst.capacity();
    let mut stats = AniStats::default();
    let mut fixed: Vec<(Pattern, u64)> = Vec::new();
    let mut composites = Composites::default();
    let mut current = inst.clone();
    let mut weights = current.weights();
    let mut demands = current.demands();
    let mut graph = AdjGraph::build(&current);
    let mut ratio_sum = 0.0;

    let pairs = fix_full_pairs(&weights, &mut demands, capacity);
    stats.fixed_pairs += pairs.iter().map(|(_, m)| m).sum::<u64>();
    fixed.extend(pairs);

    loop {
        if deadline.is_some_and(|dl| Instant::now() >= dl) {
            stats.timed_out = true;
            break;
        }
        let units: u64 = demands.iter().sum();
        let load: i128 = weights.iter().zip(&demands).map(|(&w, &d)| w as i128 * d as i128).sum();
        let bins = (load + capacity as i128 - 1) / capacity as i128;
        if bins <= params.beta as i128 || units <= params.alpha {
            break;
        }
        graph = graph.prune(&demands);
        let table = mandatory_dp(&graph, &demands);
        stats.iterations += 1;
        if graph.arc_count() > 0 {
            ratio_sum += capacity as f64 * units as f64 / graph.arc_count() as f64;
        }
        let ident = identify_triplets(&table, &weights, &demands, capacity);
        if !ident.obstructions.is_empty() {
            stats.obstruction = true;
            break;
        }
        let mut progress = 0u64;
        for &t in &ident.triplets {
            if fix_triplet(&graph, &mut demands, t, params.mode) {
                fixed.push((Pattern::from_units(&t.map(|x| weights[x])), 1));
                progress += 1;
            }
        }
        stats.fixed_triplets += progress;
        if params.merge && progress == 0 {
            let mut merged = Vec::new();
            let mut used_heads = Vec::new();
            for &(a, c) in &ident.mergeable {
                if used_heads.contains(&a) {
                    continue;
                }
                let mut need = vec![(a, 1u64)];
                bump(&mut need, c);
                if need.iter().all(|&(t, k)| demands[t] >= k) {
                    for (t, k) in need {
                        demands[t] -= k;
                    }
                    merged.push((weights[a], weights[c]));
                    used_heads.push(a);
                }
            }
            if !merged.is_empty() {
                stats.merges += merged.len() as u64;
                let mut raw: Vec<(Weight, u64)> = weights
                    .iter()
                    .zip(&demands)
                    .filter(|(_, &d)| d > 0)
                    .map(|(&w, &d)| (w, d))
                    .collect();
                for &(wa, wc) in &merged {
                    composites.add(wa, wc);
                    raw.push((wa + wc, 1));
                }
                current = Instance::normalize(raw, capacity).expect("merged weights stay within capacity");
                weights = current.weights();
                demands = current.demands();
                graph = AdjGraph::build(&current);
                progress += merged.len() as u64;
            }
        }
        if progress == 0 {
            break;
        }
        let pairs = fix_full_pairs(&weights, &mut demands, capacity);
        stats.fixed_pairs += pairs.iter().map(|(_, m)| m).sum::<u64>();
        fixed.extend(pairs);
    }

    let residual_raw: Vec<(Weight, u64)> = weights
        .iter()
        .zip(&demands)
        .filter(|(_, &d)| d > 0)
        .map(|(&w, &d)| (w, d))
        .collect();
    let residual = Instance::normalize(residual_raw, capacity).expect("residual of a valid instance");
    stats.residual_size = residual.total_units();
    if stats.iterations > 0 {
        stats.dp_ratio = ratio_sum / stats.iterations as f64;
    }
    stats.wall_time = start.elapsed().as_secs_f64();
    Reduction {
        fixed,
        residual,
        stats,
        composites,
    }
}

/// Reduces, then settles the residual exactly when its bin bound is at most
/// `residual_cap`.
pub fn ani_solve(inst: &Instance, params: &AniParams) -> (SolveOutcome, AniStats) {
    let start = Instant::now();
    let elig = inst.check_eligibility();
    let Some(d) = elig.bins.filter(|_| elig.eligible) else {
        let stats = AniStats {
            wall_time: start.elapsed().as_secs_f64(),
            ..AniStats::default()
        };
        return (SolveOutcome::inapplicable(), stats);
    };
    let red = reduce(inst, params);
    let mut stats = red.stats;
    let outcome = finish(inst, &red, d, params);
    stats.wall_time = start.elapsed().as_secs_f64();
    (outcome, stats)
}

fn finish(inst: &Instance, red: &Reduction, d: u64, params: &AniParams) -> SolveOutcome {
    if red.stats.timed_out {
        return SolveOutcome::unsolved();
    }
    let residual = &red.residual;
    let d_res = residual.lower_bound();
    if d_res > params.residual_cap {
        return SolveOutcome::unsolved();
    }
    if !red.stats.obstruction {
        match find_perfect_packing_with_cap(residual, d_res, params.exact_cap) {
            Ok(Some(sol)) => return accept(inst, red.assemble(sol), d, Certificate::PerfectPacking),
            Ok(None) => {}
            Err(_) => return SolveOutcome::unsolved(),
        }
    }
    match exact_packing(residual, d_res + 1, params.exact_cap) {
        Ok(Some(sol)) if sol.value == d_res + 1 => {
            accept(inst, red.assemble(sol), d + 1, Certificate::NoPerfectPackingReduction)
        }
        _ => SolveOutcome::unsolved(),
    }
}

fn accept(inst: &Instance, sol: Solution, value: u64, cert: Certificate) -> SolveOutcome {
    let report = verify_solution(inst, &sol);
    let full_ok = cert != Certificate::PerfectPacking || report.all_full;
    if report.is_valid() && full_ok && sol.value == value {
        SolveOutcome::optimal(sol, cert)
    } else {
        SolveOutcome::unsolved()
    }
}
