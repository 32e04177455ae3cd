//! Random instance generators.
//!
//! * Uniform family: `floor(density * n * m)` item/element pairs are drawn
//!   with replacement over the whole incidence matrix. Duplicate draws
//!   collapse, so the realized density is below the nominal one.
//! * Grouped family: `repeats` times, items and elements are shuffled and cut
//!   into `groups` contiguous groups; inside the l-th item group and l-th
//!   element group, `floor(density * n_l * m_l)` pairs are drawn with
//!   replacement. The incidence is the union over all repeats.
//!
//! Costs and weights are uniform integers from inclusive ranges.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("zero dimensions: n = {n}, m = {m}")]
    ZeroDimensions { n: usize, m: usize },
    #[error("density must lie in (0, 1], got {0}")]
    Density(String),
    #[error("groups ({groups}) must be between 1 and min(n, m) = {limit}")]
    Groups { groups: usize, limit: usize },
    #[error("repeats must be at least 1")]
    Repeats,
    #[error("invalid range {0}")]
    Range(String),
    #[error("negative budget")]
    Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Uniform,
    Grouped,
}

/// Inclusive integer range, written `lo:hi` in JSON and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

impl IntRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IntRange { lo, hi }
    }

    fn check(&self) -> Result<(), GenError> {
        if self.lo < 0 || self.lo > self.hi {
            return Err(GenError::Range(self.to_string()));
        }
        Ok(())
    }
}

impl std::fmt::Display for IntRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl TryFrom<String> for IntRange {
    type Error = GenError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<IntRange> for String {
    fn from(r: IntRange) -> Self {
        r.to_string()
    }
}

impl std::str::FromStr for IntRange {
    type Err = GenError;

    /// Parses `lo:hi`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenError::Range(s.to_string());
        let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
        let r = IntRange::new(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
        );
        r.check()?;
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub family: Family,
    pub n: usize,
    pub m: usize,
    pub budget: i64,
    /// Overall density for the uniform family, per-block density for grouped.
    pub density: f64,
    #[serde(default = "default_groups")]
    pub groups: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default = "default_range")]
    pub cost_range: IntRange,
    #[serde(default = "default_range")]
    pub weight_range: IntRange,
    #[serde(default)]
    pub seed: u64,
}

fn default_groups() -> usize {
    25
}

fn default_repeats() -> usize {
    3
}

fn default_range() -> IntRange {
    IntRange::new(1, 100)
}

impl GenParams {
    pub fn uniform(n: usize, m: usize, density: f64, budget: i64, seed: u64) -> Self {
        GenParams {
            family: Family::Uniform,
            n,
            m,
            budget,
            density,
            groups: default_groups(),
            repeats: default_repeats(),
            cost_range: default_range(),
            weight_range: default_range(),
            seed,
        }
    }

    pub fn grouped(n: usize, m: usize, density: f64, budget: i64, seed: u64) -> Self {
        GenParams {
            family: Family::Grouped,
            ..GenParams::uniform(n, m, density, budget, seed)
        }
    }

    /// Conventional name `bmcp_<n>_<m>_<density>_<budget>`.
    pub fn name(&self) -> String {
        format!("bmcp_{}_{}_{}_{}", self.n, self.m, self.density, self.budget)
    }

    fn validate(&self, grouped: bool) -> Result<(), GenError> {
        if self.n == 0 || self.m == 0 {
            return Err(GenError::ZeroDimensions {
                n: self.n,
                m: self.m,
            });
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return Err(GenError::Density(self.density.to_string()));
        }
        if self.budget < 0 {
            return Err(GenError::Budget);
        }
        self.cost_range.check()?;
        self.weight_range.check()?;
        if grouped {
            let limit = self.n.min(self.m);
            if self.groups == 0 || self.groups > limit {
                return Err(GenError::Groups {
                    groups: self.groups,
                    limit,
                });
            }
            if self.repeats == 0 {
                return Err(GenError::Repeats);
            }
        }
        Ok(())
    }
}

/// Number of pairs drawn for a block of `cells` cells. The small epsilon
/// keeps products such as `0.3 * 1000` from flooring to 299.
pub fn draw_count(density: f64, cells: usize) -> usize {
    (density * cells as f64 + 1e-9).floor() as usize
}

/// Sizes of `groups` contiguous groups over `total` slots; the first
/// `total % groups` groups get one extra slot.
pub fn group_sizes(total: usize, groups: usize) -> Vec<usize> {
    let base = total / groups;
    let extra = total % groups;
    (0..groups).map(|l| base + usize::from(l < extra)).collect()
}

/// Item/element pairs chosen by the grouped family, tagged with the repeat
/// and group that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedDraw {
    pub repeat: usize,
    pub group: usize,
    pub item: usize,
    pub element: usize,
}

pub fn generate(p: &GenParams) -> Result<Instance, GenError> {
    match p.family {
        Family::Uniform => gen_uniform(p),
        Family::Grouped => gen_grouped(p),
    }
}

pub fn gen_uniform(p: &GenParams) -> Result<Instance, GenError> {
    p.validate(false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (costs, weights) = draw_costs_weights(p, &mut rng);
    let mut cover = vec![BTreeSet::new(); p.n];
    for _ in 0..draw_count(p.density, p.n * p.m) {
        let i = rng.random_range(0..p.n);
        let j = rng.random_range(0..p.m);
        cover[i].insert(j);
    }
    Ok(assemble(p, costs, weights, cover))
}

pub fn gen_grouped(p: &GenParams) -> Result<Instance, GenError> {
    grouped_impl(p, None)
}

/// Grouped generation that also returns every drawn pair with its block.
pub fn gen_grouped_traced(p: &GenParams) -> Result<(Instance, Vec<GroupedDraw>), GenError> {
    let mut draws = Vec::new();
    let inst = grouped_impl(p, Some(&mut draws))?;
    Ok((inst, draws))
}

fn grouped_impl(p: &GenParams, mut trace: Option<&mut Vec<GroupedDraw>>) -> Result<Instance, GenError> {
    p.validate(true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (costs, weights) = draw_costs_weights(p, &mut rng);
    let mut cover = vec![BTreeSet::new(); p.n];
    let item_sizes = group_sizes(p.n, p.groups);
    let element_sizes = group_sizes(p.m, p.groups);
    let mut items: Vec<usize> = (0..p.n).collect();
    let mut elements: Vec<usize> = (0..p.m).collect();
    for repeat in 0..p.repeats {
        // a single group covers everything; no partition to randomize
        if p.groups > 1 {
            items.shuffle(&mut rng);
            elements.shuffle(&mut rng);
        }
        let (mut item_start, mut element_start) = (0, 0);
        for group in 0..p.groups {
            let (nl, ml) = (item_sizes[group], element_sizes[group]);
            let block_items = &items[item_start..item_start + nl];
            let block_elements = &elements[element_start..element_start + ml];
            for _ in 0..draw_count(p.density, nl * ml) {
                let item = block_items[rng.random_range(0..nl)];
                let element = block_elements[rng.random_range(0..ml)];
                cover[item].insert(element);
                if let Some(draws) = trace.as_deref_mut() {
                    draws.push(GroupedDraw {
                        repeat,
                        group,
                        item,
                        element,
                    });
                }
            }
            item_start += nl;
            element_start += ml;
        }
    }
    Ok(assemble(p, costs, weights, cover))
}

fn draw_costs_weights(p: &GenParams, rng: &mut ChaCha8Rng) -> (Vec<i64>, Vec<i64>) {
    let costs = (0..p.n)
        .map(|_| rng.random_range(p.cost_range.lo..=p.cost_range.hi))
        .collect();
    let weights = (0..p.m)
        .map(|_| rng.random_range(p.weight_range.lo..=p.weight_range.hi))
        .collect();
    (costs, weights)
}

fn assemble(p: &GenParams, costs: Vec<i64>, weights: Vec<i64>, cover: Vec<BTreeSet<usize>>) -> Instance {
    let cover = cover.into_iter().map(|s| s.into_iter().collect()).collect();
    Instance::new(p.budget, costs, weights, cover).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_use_colon_form_in_json() {
        let p: GenParams = serde_json::from_str(
            r#"{"family": "grouped", "n": 4, "m": 4, "density": 0.5, "budget": 9, "cost_range": "50:150"}"#,
        )
        .unwrap();
        assert_eq!(p.cost_range, IntRange::new(50, 150));
        assert_eq!(p.weight_range, IntRange::new(1, 100));
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["cost_range"], "50:150");
        assert!(serde_json::from_str::<IntRange>(r#""9:3""#).is_err());
    }

    #[test]
    fn group_sizes_spread_remainder_first() {
        assert_eq!(group_sizes(10, 3), vec![4, 3, 3]);
        assert_eq!(group_sizes(1100, 25), vec![44; 25]);
        assert_eq!(group_sizes(1010, 25).iter().sum::<usize>(), 1010);
        assert_eq!(group_sizes(1010, 25)[..10], [41; 10]);
    }

    #[test]
    fn draw_count_floors() {
        assert_eq!(draw_count(0.05, 1_000_000), 50_000);
        assert_eq!(draw_count(0.3, 1000), 300);
        assert_eq!(draw_count(0.5, 1), 0);
    }

    #[test]
    fn tiny_density_draws_nothing() {
        let inst = gen_uniform(&GenParams::uniform(3, 3, 0.1, 10, 7)).unwrap();
        assert_eq!(inst.edge_count(), 0);
    }

    #[test]
    fn deterministic_under_seed() {
        for p in [
            GenParams::uniform(60, 50, 0.1, 100, 11),
            GenParams::grouped(60, 50, 0.5, 100, 11),
        ] {
            assert_eq!(generate(&p).unwrap().to_text(), generate(&p).unwrap().to_text());
            let other = GenParams { seed: 12, ..p.clone() };
            assert_ne!(generate(&p).unwrap(), generate(&other).unwrap());
        }
    }

    #[test]
    fn single_block_matches_uniform() {
        let mut g = GenParams::grouped(40, 30, 0.2, 100, 5);
        g.groups = 1;
        g.repeats = 1;
        let u = GenParams::uniform(40, 30, 0.2, 100, 5);
        assert_eq!(gen_grouped(&g).unwrap(), gen_uniform(&u).unwrap());
    }

    #[test]
    fn ranges_are_respected() {
        let mut p = GenParams::uniform(200, 100, 0.05, 100, 3);
        p.cost_range = IntRange::new(5, 9);
        p.weight_range = IntRange::new(0, 2);
        let inst = gen_uniform(&p).unwrap();
        assert!(inst.costs().iter().all(|c| (5..=9).contains(c)));
        assert!(inst.weights().iter().all(|w| (0..=2).contains(w)));
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            gen_uniform(&GenParams::uniform(0, 5, 0.1, 1, 0)),
            Err(GenError::ZeroDimensions { .. })
        ));
        assert!(matches!(
            gen_uniform(&GenParams::uniform(5, 5, 0.0, 1, 0)),
            Err(GenError::Density(_))
        ));
        assert!(matches!(
            gen_grouped(&GenParams::grouped(30, 20, 0.5, 1, 0)),
            Err(GenError::Groups { groups: 25, limit: 20 })
        ));
        assert!("3:1".parse::<IntRange>().is_err());
        assert!("-1:4".parse::<IntRange>().is_err());
        assert_eq!("1:100".parse::<IntRange>().unwrap(), IntRange::new(1, 100));
    }

    #[test]
    fn name_echoes_parameters() {
        assert_eq!(
            GenParams::grouped(1100, 1000, 0.3, 3000, 0).name(),
            "bmcp_1100_1000_0.3_3000"
        );
        assert_eq!(
            GenParams::uniform(585, 600, 0.05, 2000, 0).name(),
            "bmcp_585_600_0.05_2000"
        );
    }
}
