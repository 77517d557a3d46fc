//! Exact routines for small instances: minimum bin count and perfect packings.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::instance::{Instance, Weight};
use crate::solution::{Pattern, Solution};

/// Default limit on Σ d_i for the exact routines.
pub const DEFAULT_EXACT_CAP: u64 = 24;

fn check_cap(inst: &Instance, cap: u64) -> Result<()> {
    let units = inst.total_units();
    if units > cap {
        return Err(Error::SizeCapExceeded { units, cap });
    }
    Ok(())
}

/// Optimal bin count, or `None` if it exceeds `upper_limit`.
pub fn exact_min_bins(inst: &Instance, upper_limit: u64) -> Result<Option<u64>> {
    exact_min_bins_with_cap(inst, upper_limit, DEFAULT_EXACT_CAP)
}

pub fn exact_min_bins_with_cap(inst: &Instance, upper_limit: u64, cap: u64) -> Result<Option<u64>> {
    Ok(exact_packing(inst, upper_limit, cap)?.map(|s| s.value))
}

/// An optimal packing, or `None` if the optimum exceeds `upper_limit`.
pub fn exact_packing(inst: &Instance, upper_limit: u64, cap: u64) -> Result<Option<Solution>> {
    check_cap(inst, cap)?;
    if inst.is_empty() {
        return Ok(Some(Solution::default()));
    }
    let units = inst.expand();
    let w = inst.capacity();
    let ffd = first_fit_decreasing(&units, w);
    let lb = inst.lower_bound();
    let ub = ffd.len() as u64;
    for k in lb..ub.min(upper_limit.saturating_add(1)) {
        let bins = if inst.total_weight() == k as Weight * w {
            perfect_bins(inst, k)
        } else {
            fixed_k_search(&units, w, k as usize)
        };
        if let Some(bins) = bins {
            return Ok(Some(to_solution(bins)));
        }
    }
    if ub <= upper_limit {
        Ok(Some(to_solution(ffd)))
    } else {
        Ok(None)
    }
}

/// A k-bin packing with every bin full, if one exists.
pub fn find_perfect_packing(inst: &Instance, k: u64) -> Result<Option<Solution>> {
    find_perfect_packing_with_cap(inst, k, DEFAULT_EXACT_CAP)
}

pub fn find_perfect_packing_with_cap(inst: &Instance, k: u64, cap: u64) -> Result<Option<Solution>> {
    let target = (k as i128) * inst.capacity() as i128;
    if inst.total_weight() as i128 != target {
        return Err(Error::SumMismatch {
            total: inst.total_weight(),
            bins: k,
            capacity: inst.capacity(),
        });
    }
    check_cap(inst, cap)?;
    Ok(perfect_bins(inst, k).map(to_solution))
}

fn to_solution(bins: Vec<Vec<Weight>>) -> Solution {
    Solution::from_patterns(bins.iter().map(|b| Pattern::from_units(b)))
}

fn first_fit_decreasing(units: &[Weight], w: Weight) -> Vec<Vec<Weight>> {
    let mut bins: Vec<(Weight, Vec<Weight>)> = Vec::new();
    for &u in units {
        match bins.iter_mut().find(|(load, _)| load + u <= w) {
            Some((load, b)) => {
                *load += u;
                b.push(u);
            }
            None => bins.push((u, vec![u])),
        }
    }
    bins.into_iter().map(|(_, b)| b).collect()
}

/// Bin-by-bin search at type level. Each bin is anchored on the largest
/// remaining unit; failed residual demand vectors are memoised.
fn perfect_bins(inst: &Instance, k: u64) -> Option<Vec<Vec<Weight>>> {
    let weights = inst.weights();
    let mut demands = inst.demands();
    let mut bins = Vec::with_capacity(k as usize);
    let mut failed = HashSet::new();
    let mut search = PerfectSearch {
        weights: &weights,
        capacity: inst.capacity(),
        failed: &mut failed,
    };
    if search.next_bin(&mut demands, &mut bins) {
        Some(bins)
    } else {
        None
    }
}

struct PerfectSearch<'a> {
    weights: &'a [Weight],
    capacity: Weight,
    failed: &'a mut HashSet<Vec<u64>>,
}

impl PerfectSearch<'_> {
    fn next_bin(&mut self, demands: &mut Vec<u64>, bins: &mut Vec<Vec<Weight>>) -> bool {
        let Some(anchor) = demands.iter().position(|&d| d > 0) else {
            return true;
        };
        if self.failed.contains(demands.as_slice()) {
            return false;
        }
        demands[anchor] -= 1;
        let mut bin = vec![self.weights[anchor]];
        let rem = self.capacity - self.weights[anchor];
        let ok = self.fill(demands, bins, &mut bin, rem, anchor);
        demands[anchor] += 1;
        if !ok {
            self.failed.insert(demands.clone());
        }
        ok
    }

    fn fill(
        &mut self,
        demands: &mut Vec<u64>,
        bins: &mut Vec<Vec<Weight>>,
        bin: &mut Vec<Weight>,
        rem: Weight,
        t: usize,
    ) -> bool {
        if rem == 0 {
            bins.push(bin.clone());
            if self.next_bin(demands, bins) {
                return true;
            }
            bins.pop();
            return false;
        }
        let Some(t) = (t..self.weights.len()).find(|&j| demands[j] > 0 && self.weights[j] <= rem) else {
            return false;
        };
        let w = self.weights[t];
        // Remaining capacity must be coverable by types t.. .
        let avail: i128 = (t..self.weights.len())
            .map(|j| self.weights[j] as i128 * demands[j] as i128)
            .sum();
        if avail < rem as i128 {
            return false;
        }
        let max_c = demands[t].min((rem / w) as u64);
        for c in (0..=max_c).rev() {
            demands[t] -= c;
            bin.extend(std::iter::repeat_n(w, c as usize));
            let ok = self.fill(demands, bins, bin, rem - c as Weight * w, t + 1);
            bin.truncate(bin.len() - c as usize);
            demands[t] += c;
            if ok {
                return true;
            }
        }
        false
    }
}

/// Unit-level search for a packing into exactly `k` bins of capacity `w`.
/// Units are placed in decreasing order; bins with equal load are tried once,
/// and the search fails once unusable space exceeds the slack `kW - Σ`.
fn fixed_k_search(units: &[Weight], w: Weight, k: usize) -> Option<Vec<Vec<Weight>>> {
    let total: Weight = units.iter().sum();
    let slack = k as Weight * w - total;
    if slack < 0 || units.first().is_some_and(|&u| u > w) {
        return None;
    }
    let mut s = UnitSearch {
        units,
        w,
        slack,
        smallest: *units.last()?,
        loads: vec![0; k],
        assign: vec![0; units.len()],
        failed: HashSet::new(),
    };
    if s.place(0) {
        let mut bins = vec![Vec::new(); k];
        for (i, &b) in s.assign.iter().enumerate() {
            bins[b].push(units[i]);
        }
        bins.retain(|b| !b.is_empty());
        Some(bins)
    } else {
        None
    }
}

struct UnitSearch<'a> {
    units: &'a [Weight],
    w: Weight,
    slack: Weight,
    smallest: Weight,
    loads: Vec<Weight>,
    assign: Vec<usize>,
    failed: HashSet<(usize, Vec<Weight>)>,
}

impl UnitSearch<'_> {
    fn place(&mut self, i: usize) -> bool {
        if i == self.units.len() {
            return true;
        }
        let dead: Weight = self
            .loads
            .iter()
            .map(|&l| self.w - l)
            .filter(|&r| r < self.smallest)
            .sum();
        if dead > self.slack {
            return false;
        }
        let mut key = self.loads.clone();
        key.sort_unstable();
        let key = (i, key);
        if self.failed.contains(&key) {
            return false;
        }
        let u = self.units[i];
        let mut tried: Vec<Weight> = Vec::with_capacity(self.loads.len());
        for b in 0..self.loads.len() {
            let l = self.loads[b];
            if l + u > self.w || tried.contains(&l) {
                continue;
            }
            tried.push(l);
            self.loads[b] += u;
            self.assign[i] = b;
            if self.place(i + 1) {
                return true;
            }
            self.loads[b] -= u;
        }
        self.failed.insert(key);
        false
    }
}
