//! Solvers for augmented IRUP instances: instances made of `h` full triplets
//! plus a small core that packs perfectly into `β` bins.

pub mod naive;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::exact::{find_perfect_packing_with_cap, DEFAULT_EXACT_CAP};
use crate::instance::{Instance, Weight};
use crate::solution::{verify_solution, Certificate, Pattern, Solution, SolveOutcome};
use crate::triplet::TripletIndex;

pub use naive::naive_ai_solve;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AiParams {
    /// Core size minus one (the core has `alpha + 1` units).
    pub alpha: u64,
    /// Bins used by the core.
    pub beta: u64,
    pub time_limit: Option<Duration>,
}

impl Default for AiParams {
    fn default() -> Self {
        Self {
            alpha: 15,
            beta: 3,
            time_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AiStats {
    pub recursive_calls: u64,
    pub base_cases_reached: u64,
    /// Seconds.
    pub wall_time: f64,
    pub timed_out: bool,
}

/// Backtracking search over triplet fixes and core removals.
///
/// Returns `Inapplicable` for ineligible instances and when there are fewer
/// distinct large weights than triplets to recover. An exhausted search or
/// an expired time limit gives `Unsolved`.
pub fn practical_ai_solve(inst: &Instance, params: &AiParams) -> (SolveOutcome, AiStats) {
    let start = Instant::now();
    let mut stats = AiStats::default();
    let outcome = run(inst, params, start, &mut stats);
    stats.wall_time = start.elapsed().as_secs_f64();
    (outcome, stats)
}

fn run(inst: &Instance, params: &AiParams, start: Instant, stats: &mut AiStats) -> SolveOutcome {
    let elig = inst.check_eligibility();
    let Some(d) = elig.bins.filter(|_| elig.eligible) else {
        return SolveOutcome::inapplicable();
    };
    let Some(h) = d.checked_sub(params.beta) else {
        return SolveOutcome::inapplicable();
    };
    if elig.large_distinct < h {
        return SolveOutcome::inapplicable();
    }
    let mut s = Search {
        idx: TripletIndex::build(inst),
        r: vec![0; inst.num_types()],
        r_units: 0,
        r_weight: 0,
        n_b: 0,
        n_b_max: elig.large_count - h,
        r_log: Vec::new(),
        partial: Vec::new(),
        core: None,
        max_core_units: params.alpha + 1,
        max_core_weight: params.beta as i128 * inst.capacity() as i128,
        deadline: params.time_limit.map(|t| start + t),
        stats,
    };
    let idle: Vec<(usize, u64)> = (0..inst.num_types())
        .filter(|&t| s.idx.tau(t) == 0)
        .map(|t| (t, s.idx.demand(t)))
        .collect();
    s.remove_into_core(idle);
    if !s.solve(0) {
        if s.deadline.is_some_and(|dl| Instant::now() >= dl) {
            s.stats.timed_out = true;
        }
        return SolveOutcome::unsolved();
    }
    let weights = inst.weights();
    let triplets = s
        .partial
        .iter()
        .map(|t| Pattern::from_units(&t.map(|i| weights[i])));
    let sol = Solution::from_patterns(triplets).merge(s.core.take().unwrap_or_default());
    let report = verify_solution(inst, &sol);
    if report.is_valid() && report.all_full && sol.value == d {
        SolveOutcome::optimal(sol, Certificate::PerfectPacking)
    } else {
        SolveOutcome::unsolved()
    }
}

struct Search<'a> {
    idx: TripletIndex,
    /// Units moved to the core, per type.
    r: Vec<u64>,
    r_units: u64,
    r_weight: i128,
    n_b: u64,
    n_b_max: u64,
    r_log: Vec<(usize, u64)>,
    partial: Vec<[usize; 3]>,
    core: Option<Solution>,
    max_core_units: u64,
    max_core_weight: i128,
    deadline: Option<Instant>,
    stats: &'a mut AiStats,
}

type Mark = (usize, usize, usize);

impl Search<'_> {
    fn mark(&self) -> Mark {
        (self.idx.checkpoint(), self.r_log.len(), self.partial.len())
    }

    fn undo(&mut self, (cp, rl, pl): Mark) {
        self.idx.rollback(cp);
        while self.r_log.len() > rl {
            let (t, c) = self.r_log.pop().unwrap();
            self.account(t, c, false);
        }
        self.partial.truncate(pl);
    }

    fn account(&mut self, t: usize, c: u64, add: bool) {
        let w = self.idx.weights()[t];
        let large = self.idx.is_large(t);
        let dw = w as i128 * c as i128;
        if add {
            self.r[t] += c;
            self.r_units += c;
            self.r_weight += dw;
            if large {
                self.n_b += c;
            }
        } else {
            self.r[t] -= c;
            self.r_units -= c;
            self.r_weight -= dw;
            if large {
                self.n_b -= c;
            }
        }
    }

    /// Moves units into the core; types left without any live triplet follow
    /// with all their units.
    fn remove_into_core(&mut self, mut batch: Vec<(usize, u64)>) {
        batch.retain(|&(_, c)| c > 0);
        while !batch.is_empty() {
            let cascade = self.idx.remove_units(&batch);
            for &(t, c) in &batch {
                self.account(t, c, true);
                self.r_log.push((t, c));
            }
            batch = cascade.into_iter().map(|t| (t, self.idx.demand(t))).collect();
        }
    }

    fn fix_triplet(&mut self, t: [usize; 3]) {
        let mut removals: Vec<(usize, u64)> = Vec::with_capacity(3);
        for x in t {
            match removals.iter_mut().find(|(y, _)| *y == x) {
                Some((_, c)) => *c += 1,
                None => removals.push((x, 1)),
            }
        }
        let cascade = self.idx.remove_units(&removals);
        self.partial.push(t);
        let batch = cascade.into_iter().map(|x| (x, self.idx.demand(x))).collect();
        self.remove_into_core(batch);
    }

    fn timed_out(&self) -> bool {
        self.deadline.is_some_and(|dl| Instant::now() >= dl)
    }

    fn base_case(&mut self) -> bool {
        self.stats.base_cases_reached += 1;
        if self.r_units > self.max_core_units || self.r_weight > self.max_core_weight {
            return false;
        }
        let weights = self.idx.weights();
        let core: Vec<(Weight, u64)> = weights
            .iter()
            .zip(&self.r)
            .filter(|(_, &c)| c > 0)
            .map(|(&w, &c)| (w, c))
            .collect();
        let Ok(core_inst) = Instance::normalize(core, self.idx.capacity()) else {
            return false;
        };
        let bins = (self.r_weight / self.idx.capacity() as i128) as u64;
        let cap = self.max_core_units.max(DEFAULT_EXACT_CAP);
        match find_perfect_packing_with_cap(&core_inst, bins, cap) {
            Ok(Some(sol)) => {
                self.core = Some(sol);
                true
            }
            _ => false,
        }
    }

    fn select_a1(&self) -> usize {
        let a1 = self.idx.part(1);
        let mut best = None;
        for &a in a1 {
            let t = self.idx.unique_live_triplet(a).expect("A1 member has one live triplet");
            let kills = self.idx.kill_count(&t);
            // Lower index means larger weight.
            if best.is_none_or(|(k, _)| kills < k) {
                best = Some((kills, a));
            }
        }
        best.expect("A1 nonempty").1
    }

    fn solve(&mut self, n_s: u32) -> bool {
        self.stats.recursive_calls += 1;
        if self.timed_out() {
            return false;
        }
        if self.idx.residual_units() == 0 {
            return self.base_case();
        }
        if self.idx.live_count() == 0
            || self.n_b > self.n_b_max
            || self.r_units > self.max_core_units
            || self.r_weight > self.max_core_weight
        {
            return false;
        }
        if !self.idx.part(1).is_empty() {
            let a = self.select_a1();
            let t = self.idx.unique_live_triplet(a).unwrap();
            let m = self.mark();
            self.fix_triplet(t);
            if self.solve(n_s) {
                return true;
            }
            self.undo(m);
            self.remove_into_core(vec![(a, 1)]);
            if self.solve(n_s) {
                return true;
            }
            self.undo(m);
            return false;
        }
        // Every triplet head is large, so with no large unit left the residual
        // belongs to the core.
        let any_large = (0..self.idx.weights().len()).any(|t| self.idx.is_large(t) && self.idx.demand(t) > 0);
        if !any_large {
            let m = self.mark();
            let rest = (0..self.idx.weights().len()).map(|t| (t, self.idx.demand(t))).collect();
            self.remove_into_core(rest);
            if self.solve(n_s) {
                return true;
            }
            self.undo(m);
            return false;
        }
        if n_s == 2 {
            return false;
        }
        let candidates = self.idx.candidate_set(n_s == 0).expect("A1 is empty here");
        for d in candidates {
            let m = self.mark();
            self.remove_into_core(vec![(d, 1)]);
            if self.solve(n_s + 1) {
                return true;
            }
            self.undo(m);
            if self.timed_out() {
                return false;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution::Status;

    #[test]
    fn ineligible_is_inapplicable() {
        let inst = Instance::normalize([(6, 1), (5, 1)], 10).unwrap();
        assert_eq!(practical_ai_solve(&inst, &AiParams::default()).0.status, Status::Inapplicable);
    }

    #[test]
    fn small_core_only() {
        // D = 3, h = 0: the whole instance is the core.
        let inst = Instance::normalize([(7, 1), (3, 1), (6, 1), (4, 1), (5, 2)], 10).unwrap();
        let (out, stats) = practical_ai_solve(&inst, &AiParams::default());
        assert_eq!(out.status, Status::Optimal);
        assert_eq!(out.value(), Some(3));
        assert!(stats.base_cases_reached >= 1);
        assert!(stats.base_cases_reached <= stats.recursive_calls);
    }

    #[test]
    fn no_perfect_packing_is_unsolved() {
        // Σ = 30, W = 10, yet no bin can be filled exactly.
        let inst = Instance::normalize([(7, 2), (6, 1), (5, 2)], 10).unwrap();
        let (out, _) = practical_ai_solve(&inst, &AiParams::default());
        assert_ne!(out.status, Status::Optimal);
    }
}
