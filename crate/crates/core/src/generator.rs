//! Seeded construction of augmented instances: an original 15-item core with
//! `3·W` total weight and no 3-bin perfect packing, extended by full triplets
//! whose head cannot be completed by earlier items.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bpplib::parse_instance;
use crate::error::{Error, Result};
use crate::exact::{exact_min_bins_with_cap, find_perfect_packing_with_cap};
use crate::instance::{Instance, Weight};
use crate::subset::can_reach;

const ORIGINAL_K6: &str = include_str!("../fixtures/original_k6.txt");

/// Unit cap used when validating originals.
pub const ORIGINAL_CAP: u64 = 24;

/// The shipped 15-item original, `W = 10000`.
pub fn fixture_original() -> Instance {
    parse_instance(ORIGINAL_K6)
        .expect("fixture parses")
        .with_name("original_k6")
}

/// Multiplies every weight and the capacity by `factor`.
pub fn scale_instance(inst: &Instance, factor: u64) -> Result<Instance> {
    let f = Weight::try_from(factor).map_err(|_| Error::Overflow)?;
    let cap = inst.capacity().checked_mul(f).ok_or(Error::Overflow)?;
    let mut raw = Vec::with_capacity(inst.num_types());
    for it in inst.items() {
        raw.push((it.weight.checked_mul(f).ok_or(Error::Overflow)?, it.demand));
    }
    let out = Instance::normalize(raw, cap)?;
    Ok(match inst.name() {
        Some(n) => out.with_name(n),
        None => out,
    })
}

/// Scale factor for the fixture that keeps triplet heads easy to place:
/// about `n² / 4000` for `n = 15 + 3h` units.
pub fn auto_scale(h: u64) -> u64 {
    let n = 15 + 3 * h;
    (n * n).div_ceil(4000).max(1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub h: u64,
    /// Smallest weight drawn for the two light triplet items; `None` means
    /// `⌊W/6⌋ + 1`.
    pub min_weight: Option<Weight>,
    /// Heads weigh at least `W/2`.
    pub enforce_large: bool,
    pub seed: u64,
    pub max_retries: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            h: 0,
            min_weight: None,
            enforce_large: true,
            seed: 0,
            max_retries: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginalReport {
    pub units: u64,
    pub size_ok: bool,
    pub sum_ok: bool,
    /// No perfect packing into `beta` bins.
    pub no_perfect_packing: bool,
    pub exact_value: Option<u64>,
    /// The fractional bound equal to `beta` is not checked.
    pub lp_condition: String,
}

impl OriginalReport {
    pub fn passes(&self, beta: u64) -> bool {
        self.size_ok && self.sum_ok && self.no_perfect_packing && self.exact_value == Some(beta + 1)
    }
}

/// Integer-side checks on an original: `alpha` units, total `beta·W`, no
/// `beta`-bin perfect packing and optimum `beta + 1`.
pub fn validate_original(orig: &Instance, alpha: u64, beta: u64) -> Result<OriginalReport> {
    let units = orig.total_units();
    if units > ORIGINAL_CAP {
        return Err(Error::SizeCapExceeded { units, cap: ORIGINAL_CAP });
    }
    let sum_ok = orig.total_weight() == beta as Weight * orig.capacity();
    let no_perfect_packing = if sum_ok {
        find_perfect_packing_with_cap(orig, beta, ORIGINAL_CAP)?.is_none()
    } else {
        false
    };
    let exact_value = exact_min_bins_with_cap(orig, beta + 1, ORIGINAL_CAP)?;
    Ok(OriginalReport {
        units,
        size_ok: units == alpha,
        sum_ok,
        no_perfect_packing,
        exact_value,
        lp_condition: "assumed".to_string(),
    })
}

/// One appended triplet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripletRecord {
    pub k: u64,
    pub head: Weight,
    pub b: Weight,
    pub c: Weight,
    pub retries: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionLog {
    pub triplets: Vec<TripletRecord>,
}

impl ConstructionLog {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.triplets {
            let _ = writeln!(out, "k={} a={} b={} c={} retries={}", t.k, t.head, t.b, t.c, t.retries);
        }
        out
    }
}

/// Appends `params.h` triplets to `orig`. A head is rejected when some subset
/// of the units placed so far completes it to `W`, or when its weight is
/// already used by a large unit.
pub fn generate_ani(orig: &Instance, params: &GenParams) -> Result<(Instance, ConstructionLog)> {
    let cap = orig.capacity();
    let m = params.min_weight.unwrap_or(cap / 6 + 1).max(1);
    let lo = if params.enforce_large { (cap + 1) / 2 } else { 2 * m };
    let hi = cap - 2 * m;
    if params.h > 0 && lo > hi {
        return Err(Error::Generator(format!(
            "no room for triplets: head range [{lo}, {hi}] is empty"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut units: Vec<(Weight, u64)> = orig.items().iter().map(|it| (it.weight, it.demand)).collect();
    let mut log = ConstructionLog::default();
    for k in 1..=params.h {
        let mut retries = 0;
        let head = loop {
            if retries >= params.max_retries {
                return Err(Error::Generator(format!(
                    "retry budget exhausted at triplet {k} of {} after {} placed",
                    params.h,
                    log.triplets.len()
                )));
            }
            let a = rng.gen_range(lo..=hi);
            let taken = units.iter().any(|&(w, _)| w == a && 2 * w >= cap);
            if !taken && !can_reach(&units, cap - a) {
                break a;
            }
            retries += 1;
        };
        let t = cap - head;
        let b = rng.gen_range(m..=t - m);
        let c = t - b;
        units.push((head, 1));
        units.push((b, 1));
        units.push((c, 1));
        log.triplets.push(TripletRecord {
            k,
            head,
            b,
            c,
            retries,
        });
    }
    let name = format!("ani_h{}_s{}", params.h, params.seed);
    Ok((Instance::normalize(units, cap)?.with_name(name), log))
}

/// How one original unit is split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub weight: Weight,
    pub parts: (Weight, Weight),
}

/// Finds a unit `o` of `orig` and `w_o = x + y` with `x, y ≥ 1` such that the
/// split original packs perfectly into `beta` bins.
///
/// With no perfect packing of the original, exactly one bin avoids the split
/// parts: a full subset `S` of the other units; the rest then divides into
/// two groups each short of `W`, their deficits being the parts. Only
/// `beta = 3` is searched.
pub fn find_split(orig: &Instance, beta: u64) -> Result<Option<Split>> {
    let units = orig.expand();
    if units.len() as u64 > ORIGINAL_CAP {
        return Err(Error::SizeCapExceeded {
            units: units.len() as u64,
            cap: ORIGINAL_CAP,
        });
    }
    let cap = orig.capacity();
    let mut seen = Vec::new();
    for (oi, &wo) in units.iter().enumerate() {
        if wo < 2 || seen.contains(&wo) {
            continue;
        }
        seen.push(wo);
        let rest: Vec<Weight> = units.iter().enumerate().filter(|&(j, _)| j != oi).map(|(_, &w)| w).collect();
        if let Some(x) = split_with(&rest, wo, cap, beta) {
            let split = Split {
                weight: wo,
                parts: (x.max(wo - x), x.min(wo - x)),
            };
            let o2 = split_original(orig, split)?;
            if find_perfect_packing_with_cap(&o2, beta, ORIGINAL_CAP)?.is_some() {
                return Ok(Some(split));
            }
        }
    }
    Ok(None)
}

fn split_with(rest: &[Weight], wo: Weight, cap: Weight, beta: u64) -> Option<Weight> {
    if beta != 3 {
        return None;
    }
    let n = rest.len();
    let total: Weight = rest.iter().sum();
    let sum_of = |mask: u32, idx: &[usize]| -> Weight {
        idx.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| rest[j]).sum()
    };
    let all: Vec<usize> = (0..n).collect();
    for s1 in 1u32..(1 << n) {
        if sum_of(s1, &all) != cap {
            continue;
        }
        let r: Vec<usize> = (0..n).filter(|&j| s1 >> j & 1 == 0).collect();
        let rt = total - cap;
        for t in 1u32..(1 << r.len()) {
            let s = sum_of(t, &r);
            if s > cap - wo && s < cap && rt - s < cap {
                return Some(cap - s);
            }
        }
    }
    None
}

/// `orig` with one unit of `split.weight` replaced by its two parts.
pub fn split_original(orig: &Instance, split: Split) -> Result<Instance> {
    let mut raw: Vec<(Weight, u64)> = Vec::new();
    let mut done = false;
    for it in orig.items() {
        if !done && it.weight == split.weight {
            done = true;
            if it.demand > 1 {
                raw.push((it.weight, it.demand - 1));
            }
        } else {
            raw.push((it.weight, it.demand));
        }
    }
    if !done {
        return Err(Error::Generator(format!("no unit of weight {} to split", split.weight)));
    }
    raw.push((split.parts.0, 1));
    raw.push((split.parts.1, 1));
    Instance::normalize(raw, orig.capacity())
}

/// Splits one original unit inside `ani` so that the core packs perfectly.
pub fn derive_ai(ani: &Instance, orig: &Instance, beta: u64) -> Result<(Instance, Split)> {
    let Some(split) = find_split(orig, beta)? else {
        return Err(Error::Generator("no split of any original unit packs perfectly".into()));
    };
    let mut out = split_original(ani, split)?;
    if let Some(n) = ani.name() {
        out = out.with_name(n.replacen("ani", "ai", 1));
    }
    Ok((out, split))
}

/// Scaled fixture, `h` triplets, then the split: `(ani, ai, log)`.
pub fn generate_pair(params: &GenParams, scale: Option<u64>) -> Result<(Instance, Instance, ConstructionLog)> {
    let orig = scale_instance(&fixture_original(), scale.unwrap_or_else(|| auto_scale(params.h)))?;
    let (ani, log) = generate_ani(&orig, params)?;
    let (ai, _) = derive_ai(&ani, &orig, 3)?;
    Ok((ani, ai, log))
}
