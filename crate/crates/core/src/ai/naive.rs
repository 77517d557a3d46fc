//! Exhaustive core enumeration followed by unique-triplet peeling. Only
//! usable on very small instances; kept as a cross-check for the practical
//! solver.

use crate::ai::AiParams;
use crate::error::{Error, Result};
use crate::exact::find_perfect_packing_with_cap;
use crate::instance::{Instance, Weight};
use crate::solution::{verify_solution, Certificate, Pattern, Solution, SolveOutcome};
use crate::triplet::TripletIndex;

pub const NAIVE_CAP: u64 = 25;

/// Tries every core of `alpha + 1` units with total weight `beta·W` that
/// packs perfectly, then peels the rest one unique triplet at a time.
pub fn naive_ai_solve(inst: &Instance, params: &AiParams) -> Result<SolveOutcome> {
    let units = inst.total_units();
    if units > NAIVE_CAP {
        return Err(Error::SizeCapExceeded { units, cap: NAIVE_CAP });
    }
    let core_units = params.alpha + 1;
    let core_weight = params.beta as Weight * inst.capacity();
    if units < core_units {
        return Ok(SolveOutcome::unsolved());
    }
    let weights = inst.weights();
    let demands = inst.demands();
    let mut pick = vec![0u64; weights.len()];
    let mut found = None;
    enumerate(
        &weights,
        &demands,
        0,
        core_units,
        core_weight,
        &mut pick,
        &mut |pick| {
            match try_core(inst, pick, params.beta) {
                Some(sol) => {
                    found = Some(sol);
                    true
                }
                None => false,
            }
        },
    );
    let Some(sol) = found else {
        return Ok(SolveOutcome::unsolved());
    };
    let report = verify_solution(inst, &sol);
    if report.is_valid() && report.all_full {
        Ok(SolveOutcome::optimal(sol, Certificate::PerfectPacking))
    } else {
        Ok(SolveOutcome::unsolved())
    }
}

/// Calls `visit` on each count vector with `left` units of total weight
/// `rest`; stops early when `visit` returns true.
fn enumerate(
    weights: &[Weight],
    demands: &[u64],
    t: usize,
    left: u64,
    rest: Weight,
    pick: &mut Vec<u64>,
    visit: &mut dyn FnMut(&[u64]) -> bool,
) -> bool {
    if t == weights.len() {
        return left == 0 && rest == 0 && visit(pick);
    }
    if left == 0 {
        return rest == 0 && visit(pick);
    }
    let max = demands[t].min(left);
    for c in (0..=max).rev() {
        let w = c as Weight * weights[t];
        if w > rest {
            continue;
        }
        pick[t] = c;
        if enumerate(weights, demands, t + 1, left - c, rest - w, pick, visit) {
            pick[t] = 0;
            return true;
        }
    }
    pick[t] = 0;
    false
}

fn try_core(inst: &Instance, pick: &[u64], beta: u64) -> Option<Solution> {
    let weights = inst.weights();
    let core: Vec<(Weight, u64)> = weights
        .iter()
        .zip(pick)
        .filter(|(_, &c)| c > 0)
        .map(|(&w, &c)| (w, c))
        .collect();
    let core_inst = Instance::normalize(core, inst.capacity()).ok()?;
    let core_sol = find_perfect_packing_with_cap(&core_inst, beta, NAIVE_CAP).ok()??;

    let rest: Vec<u64> = inst.demands().iter().zip(pick).map(|(d, c)| d - c).collect();
    let residual = inst.with_demands(&rest);
    let types = residual.weights();
    let mut idx = TripletIndex::build(&residual);
    let mut triplets = Vec::new();
    while idx.residual_units() > 0 {
        let a = (0..types.len())
            .filter(|&t| idx.demand(t) > 0)
            .min_by_key(|&t| (idx.tau(t), t))?;
        let t = idx.unique_live_triplet(a)?;
        let mut removals: Vec<(usize, u64)> = Vec::new();
        for x in t {
            match removals.iter_mut().find(|(y, _)| *y == x) {
                Some((_, c)) => *c += 1,
                None => removals.push((x, 1)),
            }
        }
        idx.remove_units(&removals);
        triplets.push(Pattern::from_units(&t.map(|i| types[i])));
    }
    Some(Solution::from_patterns(triplets).merge(core_sol))
}
