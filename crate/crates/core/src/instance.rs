//! Canonical cutting-stock instance: a capacity plus item types with distinct
//! weights, stored in strictly decreasing weight order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Item weights and bin capacities.
pub type Weight = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ItemType {
    pub weight: Weight,
    pub demand: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    capacity: Weight,
    items: Vec<ItemType>,
    total_weight: Weight,
    name: Option<String>,
}

impl Instance {
    /// Merges equal weights (summing demands) and sorts by decreasing weight.
    pub fn normalize<I>(raw: I, capacity: Weight) -> Result<Self>
    where
        I: IntoIterator<Item = (Weight, u64)>,
    {
        if capacity <= 0 {
            return Err(Error::NonPositiveCapacity(capacity));
        }
        let mut merged: BTreeMap<Weight, u64> = BTreeMap::new();
        for (weight, demand) in raw {
            if weight < 1 || weight > capacity {
                return Err(Error::WeightOutOfRange { weight, capacity });
            }
            if demand == 0 {
                return Err(Error::ZeroDemand(weight));
            }
            let slot = merged.entry(weight).or_insert(0);
            *slot = slot.checked_add(demand).ok_or(Error::Overflow)?;
        }
        let items: Vec<ItemType> = merged
            .into_iter()
            .rev()
            .map(|(weight, demand)| ItemType { weight, demand })
            .collect();
        let total_weight = checked_total(&items)?;
        Ok(Self {
            capacity,
            items,
            total_weight,
            name: None,
        })
    }

    pub fn empty(capacity: Weight) -> Result<Self> {
        Self::normalize(std::iter::empty(), capacity)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn capacity(&self) -> Weight {
        self.capacity
    }

    pub fn items(&self) -> &[ItemType] {
        &self.items
    }

    pub fn num_types(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn weights(&self) -> Vec<Weight> {
        self.items.iter().map(|it| it.weight).collect()
    }

    pub fn demands(&self) -> Vec<u64> {
        self.items.iter().map(|it| it.demand).collect()
    }

    /// Σ d_i, the number of unit items.
    pub fn total_units(&self) -> u64 {
        self.items.iter().map(|it| it.demand).sum()
    }

    /// Σ w_i d_i, checked against overflow at construction.
    pub fn total_weight(&self) -> Weight {
        self.total_weight
    }

    /// Position of `weight` in the item list.
    pub fn index_of(&self, weight: Weight) -> Option<usize> {
        self.items
            .binary_search_by(|it| weight.cmp(&it.weight))
            .ok()
    }

    pub fn demand_of(&self, weight: Weight) -> u64 {
        self.index_of(weight).map_or(0, |i| self.items[i].demand)
    }

    /// Unit items in decreasing weight order.
    pub fn expand(&self) -> Vec<Weight> {
        let mut out = Vec::with_capacity(self.total_units() as usize);
        for it in &self.items {
            out.extend(std::iter::repeat_n(it.weight, it.demand as usize));
        }
        out
    }

    /// Same weights with new demands; types whose demand drops to zero are removed.
    pub fn with_demands(&self, demands: &[u64]) -> Self {
        assert_eq!(demands.len(), self.items.len());
        let items: Vec<ItemType> = self
            .items
            .iter()
            .zip(demands)
            .filter(|(_, &d)| d > 0)
            .map(|(it, &d)| ItemType {
                weight: it.weight,
                demand: d,
            })
            .collect();
        let total_weight = checked_total(&items).expect("demands only shrink");
        Self {
            capacity: self.capacity,
            items,
            total_weight,
            name: self.name.clone(),
        }
    }

    /// ⌈Σ w_i d_i / W⌉.
    pub fn lower_bound(&self) -> u64 {
        let w = self.capacity;
        ((self.total_weight + w - 1) / w) as u64
    }

    /// Weight at least half the capacity.
    pub fn is_large(&self, weight: Weight) -> bool {
        2 * weight >= self.capacity
    }

    pub fn check_eligibility(&self) -> EligibilityReport {
        let divisible = self.total_weight % self.capacity == 0;
        let bins = divisible.then(|| (self.total_weight / self.capacity) as u64);
        let large: Vec<&ItemType> = self.items.iter().filter(|it| self.is_large(it.weight)).collect();
        let large_count = large.iter().map(|it| it.demand).sum();
        let large_distinct = large.len() as u64;
        let eligible = match bins {
            Some(d) => large_count + 3 >= d,
            None => false,
        };
        EligibilityReport {
            divisible,
            bins,
            large_count,
            large_distinct,
            eligible,
        }
    }
}

fn checked_total(items: &[ItemType]) -> Result<Weight> {
    items.iter().try_fold(0 as Weight, |acc, it| {
        let d = Weight::try_from(it.demand).map_err(|_| Error::Overflow)?;
        it.weight
            .checked_mul(d)
            .and_then(|x| acc.checked_add(x))
            .ok_or(Error::Overflow)
    })
}

/// Gate for both specialised solvers: the total weight fills `D` bins exactly
/// and at least `D - 3` units are large.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EligibilityReport {
    pub divisible: bool,
    /// `D = Σw / W` when divisible.
    pub bins: Option<u64>,
    /// Units with weight ≥ W/2, counting demands.
    pub large_count: u64,
    /// Distinct weights ≥ W/2.
    pub large_distinct: u64,
    pub eligible: bool,
}
