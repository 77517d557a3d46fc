//! Patterns, solutions, verification and solve outcomes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::instance::{Instance, Weight};

/// One bin's content as (weight, count) pairs, decreasing weight, counts ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern {
    counts: Vec<(Weight, u64)>,
}

impl Pattern {
    /// Builds a pattern from arbitrary (weight, count) pairs; zero counts are dropped.
    pub fn new<I: IntoIterator<Item = (Weight, u64)>>(parts: I) -> Self {
        let mut merged: BTreeMap<Weight, u64> = BTreeMap::new();
        for (w, c) in parts {
            if c > 0 {
                *merged.entry(w).or_insert(0) += c;
            }
        }
        Self {
            counts: merged.into_iter().rev().collect(),
        }
    }

    pub fn from_units(units: &[Weight]) -> Self {
        Self::new(units.iter().map(|&w| (w, 1)))
    }

    pub fn counts(&self) -> &[(Weight, u64)] {
        &self.counts
    }

    pub fn count_of(&self, weight: Weight) -> u64 {
        self.counts
            .iter()
            .find(|(w, _)| *w == weight)
            .map_or(0, |&(_, c)| c)
    }

    pub fn load(&self) -> i128 {
        self.counts.iter().map(|&(w, c)| w as i128 * c as i128).sum()
    }

    pub fn num_units(&self) -> u64 {
        self.counts.iter().map(|&(_, c)| c).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn units(&self) -> Vec<Weight> {
        let mut out = Vec::new();
        for &(w, c) in &self.counts {
            out.extend(std::iter::repeat_n(w, c as usize));
        }
        out
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (w, c)) in self.counts.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c} x {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub patterns: Vec<(Pattern, u64)>,
    pub value: u64,
}

impl Solution {
    /// Groups identical patterns; `value` is the number of bins.
    pub fn from_patterns<I: IntoIterator<Item = Pattern>>(patterns: I) -> Self {
        let mut grouped: BTreeMap<Pattern, u64> = BTreeMap::new();
        for p in patterns {
            *grouped.entry(p).or_insert(0) += 1;
        }
        Self::from_grouped(grouped)
    }

    pub fn from_grouped<I: IntoIterator<Item = (Pattern, u64)>>(items: I) -> Self {
        let mut grouped: BTreeMap<Pattern, u64> = BTreeMap::new();
        for (p, m) in items {
            if m > 0 {
                *grouped.entry(p).or_insert(0) += m;
            }
        }
        let patterns: Vec<(Pattern, u64)> = grouped.into_iter().rev().collect();
        let value = patterns.iter().map(|(_, m)| m).sum();
        Self { patterns, value }
    }

    /// Concatenates two solutions, merging equal patterns.
    pub fn merge(self, other: Solution) -> Self {
        Self::from_grouped(self.patterns.into_iter().chain(other.patterns))
    }

    pub fn bins(&self) -> u64 {
        self.patterns.iter().map(|(_, m)| m).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    CapacityExceeded { pattern: usize, load: i128 },
    DemandMismatch { weight: Weight, expected: u64, packed: u64 },
    UnknownWeight { pattern: usize, weight: Weight },
    ValueMismatch { declared: u64, bins: u64 },
    EmptyPattern { pattern: usize },
    ZeroMultiplicity { pattern: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CapacityExceeded { pattern, load } => {
                write!(f, "pattern {pattern}: load {load} exceeds capacity")
            }
            Violation::DemandMismatch { weight, expected, packed } => {
                write!(f, "weight {weight}: demand {expected}, packed {packed}")
            }
            Violation::UnknownWeight { pattern, weight } => {
                write!(f, "pattern {pattern}: weight {weight} not in instance")
            }
            Violation::ValueMismatch { declared, bins } => {
                write!(f, "declared value {declared}, patterns use {bins} bins")
            }
            Violation::EmptyPattern { pattern } => write!(f, "pattern {pattern} is empty"),
            Violation::ZeroMultiplicity { pattern } => {
                write!(f, "pattern {pattern} has multiplicity 0")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
    /// Every pattern has load exactly W.
    pub all_full: bool,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_solution(inst: &Instance, sol: &Solution) -> VerificationReport {
    let mut violations = Vec::new();
    let mut packed: BTreeMap<Weight, u128> = BTreeMap::new();
    let mut all_full = true;
    let cap = inst.capacity() as i128;
    for (k, (pat, mult)) in sol.patterns.iter().enumerate() {
        if *mult == 0 {
            violations.push(Violation::ZeroMultiplicity { pattern: k });
        }
        if pat.is_empty() {
            violations.push(Violation::EmptyPattern { pattern: k });
        }
        let load = pat.load();
        if load > cap {
            violations.push(Violation::CapacityExceeded { pattern: k, load });
        }
        if load != cap {
            all_full = false;
        }
        for &(w, c) in pat.counts() {
            if inst.index_of(w).is_none() {
                violations.push(Violation::UnknownWeight { pattern: k, weight: w });
            }
            *packed.entry(w).or_insert(0) += c as u128 * *mult as u128;
        }
    }
    for it in inst.items() {
        let got = packed.get(&it.weight).copied().unwrap_or(0);
        if got != it.demand as u128 {
            violations.push(Violation::DemandMismatch {
                weight: it.weight,
                expected: it.demand,
                packed: got.min(u64::MAX as u128) as u64,
            });
        }
    }
    let bins = sol.bins();
    if bins != sol.value {
        violations.push(Violation::ValueMismatch {
            declared: sol.value,
            bins,
        });
    }
    VerificationReport {
        violations,
        all_full,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Unsolved,
    Inapplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certificate {
    /// All bins full; value equals Σw / W.
    PerfectPacking,
    /// Reduced instance has no perfect packing; value is Σw / W + 1.
    NoPerfectPackingReduction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: Status,
    pub solution: Option<Solution>,
    pub certificate: Option<Certificate>,
}

impl SolveOutcome {
    pub fn optimal(solution: Solution, certificate: Certificate) -> Self {
        Self {
            status: Status::Optimal,
            solution: Some(solution),
            certificate: Some(certificate),
        }
    }

    pub fn unsolved() -> Self {
        Self {
            status: Status::Unsolved,
            solution: None,
            certificate: None,
        }
    }

    pub fn inapplicable() -> Self {
        Self {
            status: Status::Inapplicable,
            solution: None,
            certificate: None,
        }
    }

    pub fn value(&self) -> Option<u64> {
        self.solution.as_ref().map(|s| s.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst() -> Instance {
        Instance::normalize([(7, 1), (3, 1), (6, 1), (4, 1)], 10).unwrap()
    }

    #[test]
    fn perfect_solution_is_valid_and_full() {
        let sol = Solution::from_patterns([
            Pattern::from_units(&[7, 3]),
            Pattern::from_units(&[6, 4]),
        ]);
        let r = verify_solution(&inst(), &sol);
        assert!(r.is_valid(), "{:?}", r);
        assert!(r.all_full);
        assert_eq!(sol.value, 2);
    }

    #[test]
    fn capacity_violation() {
        let sol = Solution::from_patterns([
            Pattern::from_units(&[7, 6]),
            Pattern::from_units(&[4, 3]),
        ]);
        let r = verify_solution(&inst(), &sol);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::CapacityExceeded { load: 13, .. })));
    }

    #[test]
    fn missing_unit_is_a_demand_violation() {
        let sol = Solution::from_patterns([Pattern::from_units(&[7, 3]), Pattern::from_units(&[6])]);
        let r = verify_solution(&inst(), &sol);
        assert_eq!(
            r.violations,
            vec![Violation::DemandMismatch { weight: 4, expected: 1, packed: 0 }]
        );
        assert!(!r.all_full);
    }

    #[test]
    fn value_and_unknown_weight() {
        let mut sol = Solution::from_patterns([
            Pattern::from_units(&[7, 3]),
            Pattern::from_units(&[6, 4]),
            Pattern::from_units(&[5]),
        ]);
        sol.value = 2;
        let r = verify_solution(&inst(), &sol);
        assert!(r.violations.contains(&Violation::ValueMismatch { declared: 2, bins: 3 }));
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, Violation::UnknownWeight { weight: 5, .. })));
    }

    #[test]
    fn pattern_display() {
        assert_eq!(Pattern::from_units(&[3, 7, 3]).to_string(), "1 x 7, 2 x 3");
    }
}
