//! Full weight triplets with per-type counts, maintained under unit removal.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::instance::{Instance, Weight};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Entry {
    /// Type indices, non-decreasing (so weights non-increasing).
    types: [usize; 3],
    live: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Change {
    Demand { ty: usize, old: u64 },
    Kill { t: usize },
}

/// Index over the realizable full weight triplets of an instance.
///
/// Types are addressed by their position in the instance's item list. The
/// sets `A1`, `A2`, `A3` hold large types (2w ≥ W) with remaining demand and
/// exactly 1, 2 or 3 live triplets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripletIndex {
    capacity: Weight,
    weights: Vec<Weight>,
    demands: Vec<u64>,
    large: Vec<bool>,
    triplets: Vec<Entry>,
    by_type: Vec<Vec<usize>>,
    tau: Vec<u32>,
    parts: [BTreeSet<usize>; 3],
    live_count: usize,
    log: Vec<Change>,
}

pub type Checkpoint = usize;

impl TripletIndex {
    pub fn build(inst: &Instance) -> Self {
        let weights = inst.weights();
        let demands = inst.demands();
        let n = weights.len();
        let capacity = inst.capacity();
        let pos: HashMap<Weight, usize> = weights.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let mut triplets = Vec::new();
        let mut by_type = vec![Vec::new(); n];
        let mut tau = vec![0u32; n];
        for i in 0..n {
            for j in i..n {
                let r = capacity - weights[i] - weights[j];
                if r < 1 || r > weights[j] {
                    continue;
                }
                let Some(&k) = pos.get(&r) else { continue };
                let types = [i, j, k];
                if !realizable(&types, &demands) {
                    continue;
                }
                let id = triplets.len();
                triplets.push(Entry { types, live: true });
                for t in distinct(&types) {
                    by_type[t].push(id);
                    tau[t] += 1;
                }
            }
        }
        let large = weights.iter().map(|&w| 2 * w >= capacity).collect();
        let mut idx = Self {
            capacity,
            weights,
            demands,
            large,
            live_count: triplets.len(),
            triplets,
            by_type,
            tau,
            parts: Default::default(),
            log: Vec::new(),
        };
        for t in 0..n {
            idx.refresh(t);
        }
        idx
    }

    fn refresh(&mut self, t: usize) {
        for p in &mut self.parts {
            p.remove(&t);
        }
        let k = self.tau[t] as usize;
        if self.large[t] && self.demands[t] > 0 && (1..=3).contains(&k) {
            self.parts[k - 1].insert(t);
        }
    }

    pub fn capacity(&self) -> Weight {
        self.capacity
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn demands(&self) -> &[u64] {
        &self.demands
    }

    pub fn demand(&self, ty: usize) -> u64 {
        self.demands[ty]
    }

    pub fn tau(&self, ty: usize) -> u32 {
        self.tau[ty]
    }

    pub fn is_large(&self, ty: usize) -> bool {
        self.large[ty]
    }

    /// `A_k` for k in 1..=3, as type indices.
    pub fn part(&self, k: usize) -> &BTreeSet<usize> {
        &self.parts[k - 1]
    }

    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn total_triplets(&self) -> usize {
        self.triplets.len()
    }

    pub fn residual_units(&self) -> u64 {
        self.demands.iter().sum()
    }

    pub fn live_triplets(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.triplets.iter().filter(|e| e.live).map(|e| e.types)
    }

    pub fn live_triplets_of(&self, ty: usize) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.by_type[ty]
            .iter()
            .map(|&id| &self.triplets[id])
            .filter(|e| e.live)
            .map(|e| e.types)
    }

    /// The single live triplet of `ty` when τ(ty) = 1.
    pub fn unique_live_triplet(&self, ty: usize) -> Option<[usize; 3]> {
        if self.tau[ty] != 1 {
            return None;
        }
        self.live_triplets_of(ty).next()
    }

    /// Removes units and kills triplets that are no longer realizable.
    /// Returns the types whose τ dropped to 0 in this call and still have
    /// demand, in increasing index order.
    pub fn remove_units(&mut self, removals: &[(usize, u64)]) -> Vec<usize> {
        let mut touched = BTreeSet::new();
        for &(ty, c) in removals {
            if c == 0 {
                continue;
            }
            let old = self.demands[ty];
            assert!(c <= old, "removing {c} units of type {ty} with demand {old}");
            self.log.push(Change::Demand { ty, old });
            self.demands[ty] = old - c;
            touched.insert(ty);
        }
        let mut affected = BTreeSet::new();
        let mut tau_before: BTreeMap<usize, u32> = BTreeMap::new();
        for &ty in &touched {
            affected.insert(ty);
            for k in 0..self.by_type[ty].len() {
                let id = self.by_type[ty][k];
                let e = &self.triplets[id];
                if e.live && !realizable(&e.types, &self.demands) {
                    let types = e.types;
                    self.triplets[id].live = false;
                    self.live_count -= 1;
                    self.log.push(Change::Kill { t: id });
                    for t in distinct(&types) {
                        tau_before.entry(t).or_insert(self.tau[t]);
                        self.tau[t] -= 1;
                        affected.insert(t);
                    }
                }
            }
        }
        for &t in &affected {
            self.refresh(t);
        }
        tau_before
            .into_iter()
            .filter(|&(t, before)| before > 0 && self.tau[t] == 0 && self.demands[t] > 0)
            .map(|(t, _)| t)
            .collect()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        self.log.len()
    }

    /// Undoes every change made after `cp`.
    pub fn rollback(&mut self, cp: Checkpoint) {
        let mut touched = BTreeSet::new();
        while self.log.len() > cp {
            match self.log.pop().unwrap() {
                Change::Demand { ty, old } => {
                    self.demands[ty] = old;
                    touched.insert(ty);
                }
                Change::Kill { t } => {
                    self.triplets[t].live = true;
                    self.live_count += 1;
                    for ty in distinct(&self.triplets[t].types) {
                        self.tau[ty] += 1;
                        touched.insert(ty);
                    }
                }
            }
        }
        for t in touched {
            self.refresh(t);
        }
    }

    /// Number of other live triplets killed if one unit of each member of
    /// `types` were removed.
    pub fn kill_count(&self, types: &[usize; 3]) -> usize {
        let mut demands: BTreeMap<usize, u64> = BTreeMap::new();
        for &t in types {
            *demands.entry(t).or_insert(self.demands[t]) -= 1;
        }
        let mut killed = BTreeSet::new();
        for &t in demands.keys() {
            for &id in &self.by_type[t] {
                let e = &self.triplets[id];
                if !e.live || e.types == *types {
                    continue;
                }
                let ok = distinct(&e.types).into_iter().all(|x| {
                    let have = demands.get(&x).copied().unwrap_or(self.demands[x]);
                    multiplicity(&e.types, x) <= have
                });
                if !ok {
                    killed.insert(id);
                }
            }
        }
        killed.len()
    }

    /// Types sharing a live triplet with some type of `A2` (and of `A3` when
    /// `include_a3`), the anchors included. Ordered by decreasing weight.
    pub fn candidate_set(&self, include_a3: bool) -> Result<Vec<usize>> {
        if !self.parts[0].is_empty() {
            return Err(Error::Contract("candidate set requested while A1 is nonempty"));
        }
        let mut out = BTreeSet::new();
        let a3 = if include_a3 { Some(&self.parts[2]) } else { None };
        let anchors = self.parts[1].iter().chain(a3.into_iter().flatten());
        for &a in anchors {
            for types in self.live_triplets_of(a) {
                out.extend(types);
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Live triplets as weight triples, for comparison with a fresh build.
    pub fn weight_triplets(&self) -> BTreeSet<(Weight, Weight, Weight)> {
        self.live_triplets()
            .map(|[i, j, k]| (self.weights[i], self.weights[j], self.weights[k]))
            .collect()
    }

    /// τ per weight over types with remaining demand.
    pub fn tau_by_weight(&self) -> BTreeMap<Weight, u32> {
        (0..self.weights.len())
            .filter(|&t| self.demands[t] > 0)
            .map(|t| (self.weights[t], self.tau[t]))
            .collect()
    }

    pub fn part_weights(&self, k: usize) -> BTreeSet<Weight> {
        self.parts[k - 1].iter().map(|&t| self.weights[t]).collect()
    }
}

fn multiplicity(types: &[usize; 3], t: usize) -> u64 {
    types.iter().filter(|&&x| x == t).count() as u64
}

fn realizable(types: &[usize; 3], demands: &[u64]) -> bool {
    types.iter().all(|&t| multiplicity(types, t) <= demands[t])
}

fn distinct(types: &[usize; 3]) -> Vec<usize> {
    let mut v = types.to_vec();
    v.dedup();
    v
}
